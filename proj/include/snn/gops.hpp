// gops.hpp — gated one-to-all product convolution core.
//
// Each nonzero kernel weight is broadcast to every output position of a tile
// in one cycle; the input spike at the shifted position gates whether the
// weight is accumulated. Zero weights are skipped entirely and never consume
// cycles, so a tile pass over one kernel costs exactly nnz cycles.
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "snn/network.hpp"
#include "snn/report.hpp"
#include "snn/tensor.hpp"
#include "snn/weights.hpp"

namespace snn {

// 16-bit partial-sum accumulators for one tile; persists across input
// channels and nonzero weights until the LIF stage reads it out.
struct PartialSumTile {
    int h = 0, w = 0;
    std::vector<int16_t> acc;
    bool saturated = false;

    PartialSumTile() = default;
    PartialSumTile(int h_, int w_) : h(h_), w(w_), acc(static_cast<size_t>(h_) * w_, 0) {}

    int16_t at(int y, int x) const { return acc[static_cast<size_t>(y) * w + x]; }
};

// Enable map for a nonzero weight at kernel position (R, C):
// enable(y, x) = padded(y + R, x + C), dims equal the output tile dims.
Grid enable_map(int nz_row, int nz_col, const Grid &padded, int out_h, int out_w);

// Accumulates weight `w` into every enabled position; disabled positions are
// gated and keep their value. Charges one cycle and counts enabled/gated
// positions.
void gated_accumulate(PartialSumTile &psum, const Grid &enable, int8_t w, GateStats &stats);

// One input channel of one tile: iterates the kernel's nonzero weights in
// row-major (leftmost-first) order, shifting an enable map and accumulating
// per nonzero. Costs exactly nnz(kernel) cycles.
void sparse_conv_channel(PartialSumTile &psum, const Grid &padded_tile,
                         const BitmaskKernel &kernel, GateStats &stats);

// Integer maps used by the reference convolution and the assembled outputs.
struct IntMap {
    int c = 0, h = 0, w = 0;
    std::vector<int32_t> v;

    IntMap() = default;
    IntMap(int c_, int h_, int w_)
        : c(c_), h(h_), w(w_), v(static_cast<size_t>(c_) * h_ * w_, 0) {}

    size_t idx(int ci, int y, int x) const {
        return (static_cast<size_t>(ci) * h + y) * w + x;
    }
    int32_t at(int ci, int y, int x) const { return v[idx(ci, y, x)]; }
};

enum class PadMode : uint8_t { Zero, Replicate };

// Textbook stride-1 cross-correlation in exact integer arithmetic; the
// reference implementation the sparse engine is verified against.
// kernels holds out_c * in_c entries, (out, in) row-major.
IntMap dense_conv_oracle(const IntMap &input, const std::vector<DenseKernel> &kernels,
                         int out_c, PadMode pad);

// Per-time-step convolution outputs of one layer (values within int16 range;
// the encode layer's recombined multibit result uses the full int32 range).
struct ConvResult {
    int t = 0;
    std::vector<IntMap> maps; // one (out_c, h, w) map per time step
    bool saturated = false;
};

// Block convolution: partitions the input into non-overlapping tiles
// (32x18 by default), convolves each independently with per-tile replicate
// padding, and reassembles the outputs at the tile origins.
ConvResult block_conv(const SpikeTensor &input, const EncodedLayer &weights, GateStats &stats,
                      int tile_h = kTileH, int tile_w = kTileW);

// Bit-serial encoding-layer convolution: runs block_conv over all 8 bit
// planes and recombines with shift-and-add, equal to the integer convolution
// of the multibit image. Costs 8x the single-plane cycles.
ConvResult encode_layer_conv(const MultibitTensor &img, const EncodedLayer &weights,
                             GateStats &stats, int tile_h = kTileH, int tile_w = kTileW);

struct LayerIo {
    // Network input: exactly one of these is set (encode units read the
    // image, all others read spikes).
    const SpikeTensor *spikes = nullptr;
    const MultibitTensor *image = nullptr;
};

struct LayerOutput {
    SpikeTensor spikes;                         // LIF output (pooled if requested)
    std::vector<std::vector<int32_t>> currents; // per-step Q8.8 currents (output units)
    GateStats stats;
    bool psum_saturated = false;
    bool lif_saturated = false;
};

// Full forward pass of one conv unit: convolution per the unit's time-step
// configuration, LIF with persistent membrane, optional OR max pooling.
// When in_T == 1 and out_T > 1 the convolution runs once and the same
// current feeds the LIF at every output step. Output units skip the LIF and
// return raw per-step currents instead.
LayerOutput layer_forward(const LayerIo &input, const ConvUnit &unit,
                          const EncodedLayer &weights,
                          int tile_h = kTileH, int tile_w = kTileW);

} // namespace snn
