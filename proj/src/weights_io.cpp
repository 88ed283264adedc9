#include "snn/weights_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "snn/tensor_io.hpp"

namespace snn {

namespace {

constexpr char kMagic[4] = {'S', 'N', 'N', 'W'};
constexpr uint8_t kVersion = 1;

void put_u32(std::vector<uint8_t> &out, uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>((v >> (8 * i)) & 0xFF));
}

uint32_t get_u32(const std::vector<uint8_t> &in, size_t &pos) {
    if (pos + 4 > in.size()) throw DataError("SNNW: truncated file");
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(in[pos + i]) << (8 * i);
    pos += 4;
    return v;
}

uint8_t get_u8(const std::vector<uint8_t> &in, size_t &pos) {
    if (pos >= in.size()) throw DataError("SNNW: truncated file");
    return in[pos++];
}

} // namespace

std::vector<uint8_t> encode_weights(const std::vector<EncodedLayer> &layers, WeightFormat fmt) {
    if (fmt != WeightFormat::Dense && fmt != WeightFormat::Bitmask)
        throw ParamError("SNNW: only dense and bitmask formats are stored");
    std::vector<uint8_t> out;
    out.insert(out.end(), kMagic, kMagic + 4);
    out.push_back(kVersion);
    put_u32(out, static_cast<uint32_t>(layers.size()));
    for (size_t id = 0; id < layers.size(); ++id) {
        const EncodedLayer &l = layers[id];
        put_u32(out, static_cast<uint32_t>(id));
        put_u32(out, static_cast<uint32_t>(l.out_c));
        put_u32(out, static_cast<uint32_t>(l.in_c));
        out.push_back(static_cast<uint8_t>(l.k));
        out.push_back(static_cast<uint8_t>(fmt));
        uint32_t scale_bits = std::bit_cast<uint32_t>(l.scale);
        put_u32(out, scale_bits);
        int mask_bytes = (l.k * l.k + 7) / 8;
        for (const auto &kn : l.kernels) {
            if (fmt == WeightFormat::Bitmask) {
                for (int b = 0; b < mask_bytes; ++b)
                    out.push_back(static_cast<uint8_t>((kn.mask >> (8 * b)) & 0xFF));
                for (int8_t v : kn.values) out.push_back(static_cast<uint8_t>(v));
            } else {
                DenseKernel d = decode_bitmask(kn);
                for (int j = 0; j < l.k * l.k; ++j)
                    out.push_back(static_cast<uint8_t>(d.w[static_cast<size_t>(j)]));
            }
        }
    }
    return out;
}

std::vector<EncodedLayer> decode_weights(const std::vector<uint8_t> &bytes) {
    if (bytes.size() < 9 || std::memcmp(bytes.data(), kMagic, 4) != 0)
        throw DataError("SNNW: bad magic");
    size_t pos = 4;
    uint8_t version = get_u8(bytes, pos);
    if (version != kVersion) throw DataError("SNNW: unsupported version");
    uint32_t n_layers = get_u32(bytes, pos);
    std::vector<EncodedLayer> layers;
    layers.reserve(n_layers);
    for (uint32_t li = 0; li < n_layers; ++li) {
        uint32_t id = get_u32(bytes, pos);
        if (id != li) throw DataError("SNNW: layer ids out of order");
        EncodedLayer l;
        l.out_c = static_cast<int>(get_u32(bytes, pos));
        l.in_c = static_cast<int>(get_u32(bytes, pos));
        l.k = get_u8(bytes, pos);
        uint8_t fmt = get_u8(bytes, pos);
        l.scale = std::bit_cast<float>(get_u32(bytes, pos));
        if (l.out_c <= 0 || l.in_c <= 0) throw DataError("SNNW: bad channel counts");
        if (l.k != 1 && l.k != 3) throw DataError("SNNW: bad kernel size");
        if (!(l.scale > 0.0f) || !std::isfinite(l.scale))
            throw DataError("SNNW: bad scale");
        int mask_bytes = (l.k * l.k + 7) / 8;
        size_t n_kernels = static_cast<size_t>(l.out_c) * l.in_c;
        l.kernels.reserve(n_kernels);
        for (size_t ki = 0; ki < n_kernels; ++ki) {
            if (fmt == static_cast<uint8_t>(WeightFormat::Bitmask)) {
                BitmaskKernel kn;
                kn.k = l.k;
                for (int b = 0; b < mask_bytes; ++b)
                    kn.mask |= static_cast<uint16_t>(get_u8(bytes, pos)) << (8 * b);
                if (kn.mask >> (l.k * l.k)) throw DataError("SNNW: mask bits beyond kernel");
                int nnz = std::popcount(kn.mask);
                kn.values.reserve(static_cast<size_t>(nnz));
                for (int j = 0; j < nnz; ++j)
                    kn.values.push_back(static_cast<int8_t>(get_u8(bytes, pos)));
                decode_bitmask(kn); // validates zero values
                l.kernels.push_back(std::move(kn));
            } else if (fmt == static_cast<uint8_t>(WeightFormat::Dense)) {
                DenseKernel d;
                d.k = l.k;
                for (int j = 0; j < l.k * l.k; ++j)
                    d.w[static_cast<size_t>(j)] = static_cast<int8_t>(get_u8(bytes, pos));
                l.kernels.push_back(encode_bitmask(d));
            } else {
                throw DataError("SNNW: unknown kernel format");
            }
        }
        layers.push_back(std::move(l));
    }
    if (pos != bytes.size()) throw DataError("SNNW: trailing bytes");
    return layers;
}

void write_weights(const std::string &path, const std::vector<EncodedLayer> &layers,
                   WeightFormat fmt) {
    write_file_atomic(path, encode_weights(layers, fmt));
}

std::vector<EncodedLayer> read_weights(const std::string &path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot open " + path);
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                               std::istreambuf_iterator<char>());
    return decode_weights(bytes);
}

} // namespace snn
