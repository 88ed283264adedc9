// weights.hpp — magnitude pruning, 8-bit quantization, and the lossless
// sparse-kernel codecs (bit-mask and CSR) with bit-exact storage accounting.
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "snn/errors.hpp"

namespace snn {

// Quantized k x k kernel, k in {1, 3}. Values row-major, slots beyond k*k
// unused.
struct DenseKernel {
    int k = 1;
    std::array<int8_t, 9> w{};

    int8_t at(int r, int c) const { return w[static_cast<size_t>(r) * k + c]; }
    int nnz() const {
        int n = 0;
        for (int i = 0; i < k * k; ++i) n += w[static_cast<size_t>(i)] != 0;
        return n;
    }
};

// Sparse kernel as occupancy bit-mask plus packed nonzero values.
// Mask bit i corresponds to row-major weight position i ((0,0) first);
// popcount(mask) always equals values.size() and no stored value is zero.
struct BitmaskKernel {
    int k = 1;
    uint16_t mask = 0;
    std::vector<int8_t> values; // row-major nonzero order

    int nnz() const { return static_cast<int>(values.size()); }
};

// Compressed sparse row kernel: k+1 row pointers, column index per nonzero.
struct CsrKernel {
    int k = 1;
    std::vector<uint8_t> row_ptr; // k+1 non-decreasing counts
    std::vector<uint8_t> col_idx;
    std::vector<int8_t> values;

    int nnz() const { return static_cast<int>(values.size()); }
};

// Real-valued weights of one layer, (out, in, r, c) row-major. This is the
// pre-quantization form pruning operates on.
struct LayerWeights {
    int out_c = 0, in_c = 0, k = 1;
    std::vector<float> values;

    LayerWeights() = default;
    LayerWeights(int out_c_, int in_c_, int k_)
        : out_c(out_c_), in_c(in_c_), k(k_),
          values(static_cast<size_t>(out_c_) * in_c_ * k_ * k_, 0.0f) {}

    size_t kernel_offset(int o, int i) const {
        return (static_cast<size_t>(o) * in_c + i) * k * k;
    }
};

// Quantized 8-bit weights of one layer plus the per-layer scale
// (real weight = scale * q).
struct QuantLayer {
    int out_c = 0, in_c = 0, k = 1;
    float scale = 1.0f;
    std::vector<int8_t> values; // (out, in, r, c) row-major

    DenseKernel kernel_at(int o, int i) const;
};

// Bit-mask encoded layer, the form the convolution engine consumes.
struct EncodedLayer {
    int out_c = 0, in_c = 0, k = 1;
    float scale = 1.0f;
    std::vector<BitmaskKernel> kernels; // (out, in) row-major

    const BitmaskKernel &kernel_at(int o, int i) const {
        return kernels[static_cast<size_t>(o) * in_c + i];
    }
    uint64_t total_nnz() const;
};

struct DensityReport {
    uint64_t kept = 0;
    uint64_t total = 0;
    double density() const { return total ? static_cast<double>(kept) / total : 0.0; }
};

enum class PruneScope : uint8_t { PerLayer, Global };

// Zeroes the floor(rate * N) smallest-magnitude entries of `values` in place,
// ties broken by stable index order. rate in [0, 1).
void prune_values(std::span<float> values, double rate);

// Magnitude pruning of 3x3 kernels at the given rate; 1x1 kernels pass
// through untouched. PerLayer ranks magnitudes within each layer, Global
// ranks all 3x3 weights of the network together.
DensityReport prune_magnitude(LayerWeights &layer, double rate);
std::vector<DensityReport> prune_network(std::vector<LayerWeights> &layers, double rate,
                                         PruneScope scope = PruneScope::PerLayer);

// Symmetric linear 8-bit quantization: scale = max|w| / 127,
// q = round(w / scale) clamped to [-127, 127], round half away from zero.
// An all-zero layer gets scale 1.
QuantLayer quantize8(const LayerWeights &layer);

// Lossless kernel codecs. Decoding validates structure and throws DataError
// on popcount/value-count mismatches or malformed row pointers.
BitmaskKernel encode_bitmask(const DenseKernel &k);
DenseKernel decode_bitmask(const BitmaskKernel &k);
CsrKernel encode_csr(const DenseKernel &k);
DenseKernel decode_csr(const CsrKernel &k);

EncodedLayer encode_layer(const QuantLayer &layer);
QuantLayer decode_layer(const EncodedLayer &layer);

enum class WeightFormat : uint8_t { Dense = 0, Bitmask = 1, Csr = 2 };

// Storage cost in bits of one kernel / one layer in the given format:
//   dense    8 * k^2
//   bitmask  k^2 + 8 * nnz
//   csr      (k+1) * ptr_bits + nnz * idx_bits + 8 * nnz
// with ptr_bits = ceil(log2(k^2 + 1)) and idx_bits = ceil(log2 k).
uint64_t storage_bits_kernel(int k, int nnz, WeightFormat fmt);
uint64_t storage_bits(const EncodedLayer &layer, WeightFormat fmt);

} // namespace snn
