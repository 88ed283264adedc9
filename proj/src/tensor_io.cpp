#include "snn/tensor_io.hpp"

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

namespace snn {

namespace {

constexpr char kMagic[4] = {'S', 'N', 'N', 'T'};

void put_u32(std::vector<uint8_t> &out, uint32_t v) {
    out.push_back(static_cast<uint8_t>(v & 0xFF));
    out.push_back(static_cast<uint8_t>((v >> 8) & 0xFF));
    out.push_back(static_cast<uint8_t>((v >> 16) & 0xFF));
    out.push_back(static_cast<uint8_t>((v >> 24) & 0xFF));
}

uint32_t get_u32(const std::vector<uint8_t> &in, size_t &pos) {
    if (pos + 4 > in.size()) throw DataError("SNNT: truncated header");
    uint32_t v = static_cast<uint32_t>(in[pos]) | (static_cast<uint32_t>(in[pos + 1]) << 8) |
                 (static_cast<uint32_t>(in[pos + 2]) << 16) |
                 (static_cast<uint32_t>(in[pos + 3]) << 24);
    pos += 4;
    return v;
}

void put_header(std::vector<uint8_t> &out, uint8_t rank, uint32_t t, uint32_t c,
                uint32_t h, uint32_t w, uint8_t kind) {
    out.insert(out.end(), kMagic, kMagic + 4);
    out.push_back(rank);
    put_u32(out, t);
    put_u32(out, c);
    put_u32(out, h);
    put_u32(out, w);
    out.push_back(kind);
}

struct Header {
    uint8_t rank = 0, kind = 0;
    uint32_t t = 0, c = 0, h = 0, w = 0;
    size_t payload = 0; // offset of first payload byte
};

Header parse_header(const std::vector<uint8_t> &in) {
    if (in.size() < 22 || std::memcmp(in.data(), kMagic, 4) != 0)
        throw DataError("SNNT: bad magic");
    Header hd;
    size_t pos = 4;
    hd.rank = in[pos++];
    hd.t = get_u32(in, pos);
    hd.c = get_u32(in, pos);
    hd.h = get_u32(in, pos);
    hd.w = get_u32(in, pos);
    hd.kind = in[pos++];
    hd.payload = pos;
    if (hd.rank != 3 && hd.rank != 4) throw DataError("SNNT: unsupported rank");
    if (hd.kind != 0 && hd.kind != 1) throw DataError("SNNT: unknown element kind");
    if (hd.t == 0 || hd.c == 0 || hd.h == 0 || hd.w == 0)
        throw DataError("SNNT: zero dimension");
    return hd;
}

std::vector<uint8_t> read_all(const std::string &path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot open " + path);
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                               std::istreambuf_iterator<char>());
    return bytes;
}

} // namespace

std::vector<uint8_t> encode_spike_tensor(const SpikeTensor &t) {
    std::vector<uint8_t> out;
    put_header(out, 4, static_cast<uint32_t>(t.t), static_cast<uint32_t>(t.c),
               static_cast<uint32_t>(t.h), static_cast<uint32_t>(t.w), 0);
    int row_bytes = (t.w + 7) / 8;
    for (int ti = 0; ti < t.t; ++ti)
        for (int ci = 0; ci < t.c; ++ci)
            for (int y = 0; y < t.h; ++y) {
                size_t base = out.size();
                out.resize(base + row_bytes, 0);
                for (int x = 0; x < t.w; ++x)
                    if (t.at(ti, ci, y, x)) out[base + x / 8] |= static_cast<uint8_t>(1u << (x % 8));
            }
    return out;
}

std::vector<uint8_t> encode_multibit_tensor(const MultibitTensor &t) {
    std::vector<uint8_t> out;
    put_header(out, 3, 1, static_cast<uint32_t>(t.c), static_cast<uint32_t>(t.h),
               static_cast<uint32_t>(t.w), 1);
    out.insert(out.end(), t.data.begin(), t.data.end());
    return out;
}

SpikeTensor decode_spike_tensor(const std::vector<uint8_t> &bytes) {
    Header hd = parse_header(bytes);
    if (hd.rank != 4 || hd.kind != 0) throw DataError("SNNT: not a spike tensor");
    SpikeTensor t(static_cast<int>(hd.t), static_cast<int>(hd.c),
                  static_cast<int>(hd.h), static_cast<int>(hd.w));
    size_t row_bytes = (hd.w + 7) / 8;
    size_t need = hd.payload + static_cast<size_t>(hd.t) * hd.c * hd.h * row_bytes;
    if (bytes.size() != need) throw DataError("SNNT: payload size mismatch");
    size_t pos = hd.payload;
    for (int ti = 0; ti < t.t; ++ti)
        for (int ci = 0; ci < t.c; ++ci)
            for (int y = 0; y < t.h; ++y) {
                for (int x = 0; x < t.w; ++x)
                    t.set(ti, ci, y, x, (bytes[pos + x / 8] >> (x % 8)) & 1);
                pos += row_bytes;
            }
    return t;
}

MultibitTensor decode_multibit_tensor(const std::vector<uint8_t> &bytes) {
    Header hd = parse_header(bytes);
    if (hd.rank != 3 || hd.kind != 1) throw DataError("SNNT: not a u8 image");
    MultibitTensor t(static_cast<int>(hd.c), static_cast<int>(hd.h), static_cast<int>(hd.w));
    size_t need = hd.payload + t.data.size();
    if (bytes.size() != need) throw DataError("SNNT: payload size mismatch");
    std::memcpy(t.data.data(), bytes.data() + hd.payload, t.data.size());
    return t;
}

void write_file_atomic(const std::string &path, const std::vector<uint8_t> &bytes) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw DataError("cannot write " + tmp);
        f.write(reinterpret_cast<const char *>(bytes.data()),
                static_cast<std::streamsize>(bytes.size()));
        if (!f) throw DataError("short write to " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

void write_file_atomic(const std::string &path, const std::string &text) {
    write_file_atomic(path, std::vector<uint8_t>(text.begin(), text.end()));
}

void write_spike_tensor(const std::string &path, const SpikeTensor &t) {
    write_file_atomic(path, encode_spike_tensor(t));
}

void write_multibit_tensor(const std::string &path, const MultibitTensor &t) {
    write_file_atomic(path, encode_multibit_tensor(t));
}

SpikeTensor read_spike_tensor(const std::string &path) {
    return decode_spike_tensor(read_all(path));
}

MultibitTensor read_multibit_tensor(const std::string &path) {
    return decode_multibit_tensor(read_all(path));
}

} // namespace snn
