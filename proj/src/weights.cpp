#include "snn/weights.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

namespace snn {

DenseKernel QuantLayer::kernel_at(int o, int i) const {
    DenseKernel d;
    d.k = k;
    size_t off = (static_cast<size_t>(o) * in_c + i) * k * k;
    for (int j = 0; j < k * k; ++j) d.w[static_cast<size_t>(j)] = values[off + j];
    return d;
}

uint64_t EncodedLayer::total_nnz() const {
    uint64_t n = 0;
    for (const auto &kn : kernels) n += static_cast<uint64_t>(kn.nnz());
    return n;
}

// floor(rate * n) with a few-ulp upward snap so products like 0.7 * 90,
// which land at 62.999...96 in binary, floor to the intended 63.
static size_t prune_count(double rate, size_t n) {
    double x = rate * static_cast<double>(n);
    return static_cast<size_t>(std::floor(x + 8.0 * std::numeric_limits<double>::epsilon() * x));
}

void prune_values(std::span<float> values, double rate) {
    if (rate < 0.0 || rate >= 1.0)
        throw ParamError("prune rate must be in [0, 1)");
    size_t n_zero = prune_count(rate, values.size());
    if (n_zero == 0) return;
    std::vector<size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return std::fabs(values[a]) < std::fabs(values[b]);
    });
    for (size_t i = 0; i < n_zero; ++i) values[order[i]] = 0.0f;
}

DensityReport prune_magnitude(LayerWeights &layer, double rate) {
    if (layer.k != 1 && layer.k != 3)
        throw ParamError("prune_magnitude: kernel size must be 1 or 3");
    DensityReport rep;
    rep.total = layer.values.size();
    if (layer.k == 3) // 1x1 kernels are kept intact
        prune_values(std::span<float>(layer.values), rate);
    else if (rate < 0.0 || rate >= 1.0)
        throw ParamError("prune rate must be in [0, 1)");
    rep.kept = static_cast<uint64_t>(
        std::count_if(layer.values.begin(), layer.values.end(),
                      [](float v) { return v != 0.0f; }));
    return rep;
}

std::vector<DensityReport> prune_network(std::vector<LayerWeights> &layers, double rate,
                                         PruneScope scope) {
    std::vector<DensityReport> reports;
    if (scope == PruneScope::PerLayer) {
        reports.reserve(layers.size());
        for (auto &l : layers) reports.push_back(prune_magnitude(l, rate));
        return reports;
    }
    // Global: rank all 3x3 weights of the network together.
    if (rate < 0.0 || rate >= 1.0)
        throw ParamError("prune rate must be in [0, 1)");
    std::vector<float *> slots;
    for (auto &l : layers)
        if (l.k == 3)
            for (auto &v : l.values) slots.push_back(&v);
    size_t n_zero = prune_count(rate, slots.size());
    std::vector<size_t> order(slots.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return std::fabs(*slots[a]) < std::fabs(*slots[b]);
    });
    for (size_t i = 0; i < n_zero; ++i) *slots[order[i]] = 0.0f;
    for (auto &l : layers) {
        DensityReport rep;
        rep.total = l.values.size();
        rep.kept = static_cast<uint64_t>(std::count_if(
            l.values.begin(), l.values.end(), [](float v) { return v != 0.0f; }));
        reports.push_back(rep);
    }
    return reports;
}

QuantLayer quantize8(const LayerWeights &layer) {
    QuantLayer q;
    q.out_c = layer.out_c;
    q.in_c = layer.in_c;
    q.k = layer.k;
    q.values.resize(layer.values.size());
    float maxabs = 0.0f;
    for (float v : layer.values) {
        if (!std::isfinite(v)) throw ParamError("quantize8: non-finite weight");
        maxabs = std::max(maxabs, std::fabs(v));
    }
    q.scale = maxabs > 0.0f ? maxabs / 127.0f : 1.0f;
    for (size_t i = 0; i < layer.values.size(); ++i) {
        // Round half away from zero, then clamp.
        long qi = std::lround(layer.values[i] / q.scale);
        qi = std::clamp(qi, -127l, 127l);
        q.values[i] = static_cast<int8_t>(qi);
    }
    return q;
}

BitmaskKernel encode_bitmask(const DenseKernel &k) {
    BitmaskKernel out;
    out.k = k.k;
    for (int i = 0; i < k.k * k.k; ++i) {
        int8_t v = k.w[static_cast<size_t>(i)];
        if (v != 0) {
            out.mask |= static_cast<uint16_t>(1u << i);
            out.values.push_back(v);
        }
    }
    return out;
}

DenseKernel decode_bitmask(const BitmaskKernel &k) {
    if (k.k != 1 && k.k != 3) throw DataError("bitmask: bad kernel size");
    if (k.mask >> (k.k * k.k)) throw DataError("bitmask: mask bits beyond kernel");
    if (std::popcount(k.mask) != static_cast<int>(k.values.size()))
        throw DataError("bitmask: popcount/value count mismatch");
    DenseKernel out;
    out.k = k.k;
    size_t vi = 0;
    for (int i = 0; i < k.k * k.k; ++i)
        if (k.mask & (1u << i)) {
            if (k.values[vi] == 0) throw DataError("bitmask: stored zero value");
            out.w[static_cast<size_t>(i)] = k.values[vi++];
        }
    return out;
}

CsrKernel encode_csr(const DenseKernel &k) {
    CsrKernel out;
    out.k = k.k;
    out.row_ptr.assign(static_cast<size_t>(k.k) + 1, 0);
    for (int r = 0; r < k.k; ++r) {
        for (int c = 0; c < k.k; ++c) {
            int8_t v = k.at(r, c);
            if (v != 0) {
                out.col_idx.push_back(static_cast<uint8_t>(c));
                out.values.push_back(v);
            }
        }
        out.row_ptr[static_cast<size_t>(r) + 1] = static_cast<uint8_t>(out.values.size());
    }
    return out;
}

DenseKernel decode_csr(const CsrKernel &k) {
    if (k.k != 1 && k.k != 3) throw DataError("csr: bad kernel size");
    if (k.row_ptr.size() != static_cast<size_t>(k.k) + 1 || k.row_ptr[0] != 0)
        throw DataError("csr: malformed row_ptr");
    for (size_t r = 1; r < k.row_ptr.size(); ++r)
        if (k.row_ptr[r] < k.row_ptr[r - 1]) throw DataError("csr: row_ptr not non-decreasing");
    if (k.row_ptr.back() != k.values.size() || k.col_idx.size() != k.values.size())
        throw DataError("csr: count mismatch");
    DenseKernel out;
    out.k = k.k;
    for (int r = 0; r < k.k; ++r) {
        int prev_col = -1;
        for (uint8_t j = k.row_ptr[static_cast<size_t>(r)]; j < k.row_ptr[static_cast<size_t>(r) + 1]; ++j) {
            int c = k.col_idx[j];
            if (c >= k.k || c <= prev_col) throw DataError("csr: bad column index");
            if (k.values[j] == 0) throw DataError("csr: stored zero value");
            out.w[static_cast<size_t>(r) * k.k + c] = k.values[j];
            prev_col = c;
        }
    }
    return out;
}

EncodedLayer encode_layer(const QuantLayer &layer) {
    EncodedLayer out;
    out.out_c = layer.out_c;
    out.in_c = layer.in_c;
    out.k = layer.k;
    out.scale = layer.scale;
    out.kernels.reserve(static_cast<size_t>(layer.out_c) * layer.in_c);
    for (int o = 0; o < layer.out_c; ++o)
        for (int i = 0; i < layer.in_c; ++i)
            out.kernels.push_back(encode_bitmask(layer.kernel_at(o, i)));
    return out;
}

QuantLayer decode_layer(const EncodedLayer &layer) {
    QuantLayer out;
    out.out_c = layer.out_c;
    out.in_c = layer.in_c;
    out.k = layer.k;
    out.scale = layer.scale;
    out.values.resize(static_cast<size_t>(layer.out_c) * layer.in_c * layer.k * layer.k);
    for (int o = 0; o < layer.out_c; ++o)
        for (int i = 0; i < layer.in_c; ++i) {
            DenseKernel d = decode_bitmask(layer.kernel_at(o, i));
            size_t off = (static_cast<size_t>(o) * layer.in_c + i) * layer.k * layer.k;
            for (int j = 0; j < layer.k * layer.k; ++j)
                out.values[off + j] = d.w[static_cast<size_t>(j)];
        }
    return out;
}

namespace {

int ceil_log2(int n) {
    int bits = 0;
    while ((1 << bits) < n) ++bits;
    return bits;
}

} // namespace

uint64_t storage_bits_kernel(int k, int nnz, WeightFormat fmt) {
    uint64_t kk = static_cast<uint64_t>(k) * k;
    switch (fmt) {
    case WeightFormat::Dense:
        return 8 * kk;
    case WeightFormat::Bitmask:
        return kk + 8 * static_cast<uint64_t>(nnz);
    case WeightFormat::Csr: {
        // Minimal fixed widths per kernel size: ptr 4 bits, idx 2 bits at k=3.
        uint64_t ptr_bits = static_cast<uint64_t>(ceil_log2(static_cast<int>(kk) + 1));
        uint64_t idx_bits = static_cast<uint64_t>(ceil_log2(k));
        return static_cast<uint64_t>(k + 1) * ptr_bits +
               static_cast<uint64_t>(nnz) * idx_bits + 8 * static_cast<uint64_t>(nnz);
    }
    }
    throw ParamError("storage_bits: unknown format");
}

uint64_t storage_bits(const EncodedLayer &layer, WeightFormat fmt) {
    uint64_t bits = 0;
    for (const auto &kn : layer.kernels) bits += storage_bits_kernel(layer.k, kn.nnz(), fmt);
    return bits;
}

} // namespace snn
