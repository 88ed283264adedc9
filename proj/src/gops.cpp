#include "snn/gops.hpp"

#include <algorithm>
#include <cmath>

#include "snn/fixed.hpp"
#include "snn/neuron.hpp"

namespace snn {

Grid enable_map(int nz_row, int nz_col, const Grid &padded, int out_h, int out_w) {
    if (nz_row < 0 || nz_col < 0 || nz_row + out_h > padded.h || nz_col + out_w > padded.w)
        throw ParamError("enable_map: shift outside the padded tile");
    Grid en(out_h, out_w);
    for (int y = 0; y < out_h; ++y)
        for (int x = 0; x < out_w; ++x)
            en.set(y, x, padded.at(y + nz_row, x + nz_col));
    return en;
}

void gated_accumulate(PartialSumTile &psum, const Grid &enable, int8_t w, GateStats &stats) {
    if (enable.h != psum.h || enable.w != psum.w)
        throw ParamError("gated_accumulate: enable/psum dims mismatch");
    uint64_t enabled = 0;
    for (size_t i = 0; i < psum.acc.size(); ++i) {
        if (enable.v[i]) {
            psum.acc[i] = static_cast<int16_t>(
                saturate16(static_cast<int64_t>(psum.acc[i]) + w, &psum.saturated));
            ++enabled;
        }
        // EN == 0 gates the clock: the partial sum is kept as is.
    }
    stats.enabled_accum += enabled;
    stats.gated_accum += psum.acc.size() - enabled;
    stats.cycles += 1;
}

void sparse_conv_channel(PartialSumTile &psum, const Grid &padded_tile,
                         const BitmaskKernel &kernel, GateStats &stats) {
    // Row-major nonzero order: the leftmost nonzero of the top row first,
    // mirroring the row/column encoders that clear each processed weight.
    size_t vi = 0;
    for (int i = 0; i < kernel.k * kernel.k; ++i) {
        if (!(kernel.mask & (1u << i))) continue;
        Grid en = enable_map(i / kernel.k, i % kernel.k, padded_tile, psum.h, psum.w);
        gated_accumulate(psum, en, kernel.values[vi++], stats);
    }
}

IntMap dense_conv_oracle(const IntMap &input, const std::vector<DenseKernel> &kernels,
                         int out_c, PadMode pad) {
    if (kernels.size() != static_cast<size_t>(out_c) * input.c)
        throw ParamError("dense_conv_oracle: kernel count mismatch");
    if (kernels.empty()) throw ParamError("dense_conv_oracle: empty kernel stack");
    int k = kernels[0].k;
    int half = k / 2;
    IntMap out(out_c, input.h, input.w);
    for (int o = 0; o < out_c; ++o)
        for (int c = 0; c < input.c; ++c) {
            const DenseKernel &kn = kernels[static_cast<size_t>(o) * input.c + c];
            if (kn.k != k) throw ParamError("dense_conv_oracle: inconsistent kernel size");
            for (int y = 0; y < input.h; ++y)
                for (int x = 0; x < input.w; ++x) {
                    int64_t sum = 0;
                    for (int r = 0; r < k; ++r)
                        for (int s = 0; s < k; ++s) {
                            int sy = y + r - half;
                            int sx = x + s - half;
                            int32_t iv;
                            if (sy < 0 || sy >= input.h || sx < 0 || sx >= input.w) {
                                if (pad == PadMode::Zero) continue;
                                sy = std::min(std::max(sy, 0), input.h - 1);
                                sx = std::min(std::max(sx, 0), input.w - 1);
                            }
                            iv = input.at(c, sy, sx);
                            sum += static_cast<int64_t>(iv) * kn.at(r, s);
                        }
                    out.v[out.idx(o, y, x)] += static_cast<int32_t>(sum);
                }
        }
    return out;
}

namespace {

// Convolves every tile of one time step / bit plane and accumulates the
// int16 tile psums into `dst` (shifted by `shift` for bit-serial planes).
void conv_plane(const SpikeTensor *spikes, const MultibitTensor *img, int t_index, int bit,
                const EncodedLayer &weights, const std::vector<TileRect> &tiles,
                IntMap &dst, GateStats &stats, bool &saturated) {
    int pad = weights.k / 2;
    for (const TileRect &tile : tiles) {
        for (int o = 0; o < weights.out_c; ++o) {
            PartialSumTile psum(tile.h, tile.w);
            for (int c = 0; c < weights.in_c; ++c) {
                Grid raw = spikes ? extract_tile(*spikes, t_index, c, tile)
                                  : extract_tile_plane(*img, c, bit, tile);
                Grid padded = replicate_pad(raw, pad);
                sparse_conv_channel(psum, padded, weights.kernel_at(o, c), stats);
            }
            saturated = saturated || psum.saturated;
            for (int y = 0; y < tile.h; ++y)
                for (int x = 0; x < tile.w; ++x)
                    dst.v[dst.idx(o, tile.row0 + y, tile.col0 + x)] +=
                        static_cast<int32_t>(psum.at(y, x)) << bit;
        }
    }
}

} // namespace

ConvResult block_conv(const SpikeTensor &input, const EncodedLayer &weights, GateStats &stats,
                      int tile_h, int tile_w) {
    if (input.c != weights.in_c) throw DataError("block_conv: channel mismatch");
    ConvResult res;
    res.t = input.t;
    auto tiles = tile_partition(input.h, input.w, tile_h, tile_w);
    for (int t = 0; t < input.t; ++t) {
        IntMap out(weights.out_c, input.h, input.w);
        conv_plane(&input, nullptr, t, 0, weights, tiles, out, stats, res.saturated);
        res.maps.push_back(std::move(out));
    }
    return res;
}

ConvResult encode_layer_conv(const MultibitTensor &img, const EncodedLayer &weights,
                             GateStats &stats, int tile_h, int tile_w) {
    if (img.c != weights.in_c) throw DataError("encode_layer_conv: channel mismatch");
    ConvResult res;
    res.t = 1;
    auto tiles = tile_partition(img.h, img.w, tile_h, tile_w);
    IntMap out(weights.out_c, img.h, img.w);
    for (int bit = 0; bit < 8; ++bit)
        conv_plane(nullptr, &img, 0, bit, weights, tiles, out, stats, res.saturated);
    res.maps.push_back(std::move(out));
    return res;
}

namespace {

// Converts an integer psum map to Q8.8 neuron currents through the layer's
// quantization scale (real current = scale * psum).
std::vector<int32_t> currents_from_psum(const IntMap &psum, float scale) {
    std::vector<int32_t> cur(psum.v.size());
    double s = static_cast<double>(scale) * FixedPoint::kOne;
    for (size_t i = 0; i < psum.v.size(); ++i)
        cur[i] = static_cast<int32_t>(std::llround(psum.v[i] * s));
    return cur;
}

SpikeTensor spikes_from_steps(const std::vector<std::vector<uint8_t>> &steps, int c, int h, int w) {
    SpikeTensor out(static_cast<int>(steps.size()), c, h, w);
    for (size_t t = 0; t < steps.size(); ++t)
        for (size_t i = 0; i < steps[t].size(); ++i)
            out.data[t * steps[t].size() + i] = steps[t][i];
    return out;
}

} // namespace

LayerOutput layer_forward(const LayerIo &input, const ConvUnit &unit,
                          const EncodedLayer &weights, int tile_h, int tile_w) {
    if (weights.in_c != unit.in_c || weights.out_c != unit.out_c || weights.k != unit.k)
        throw DataError("layer_forward: weights do not match the unit");

    LayerOutput out;
    ConvResult conv;
    if (unit.is_encode()) {
        if (!input.image) throw DataError("layer_forward: encode unit needs an image");
        if (input.image->c != unit.in_c || input.image->h != unit.in_h ||
            input.image->w != unit.in_w)
            throw DataError("layer_forward: image dims mismatch");
        conv = encode_layer_conv(*input.image, weights, out.stats, tile_h, tile_w);
    } else {
        if (!input.spikes) throw DataError("layer_forward: unit needs spike input");
        if (input.spikes->t != unit.in_t) throw DataError("layer_forward: time-step mismatch");
        if (input.spikes->c != unit.in_c || input.spikes->h != unit.in_h ||
            input.spikes->w != unit.in_w)
            throw DataError("layer_forward: spike dims mismatch");
        conv = block_conv(*input.spikes, weights, out.stats, tile_h, tile_w);
    }
    out.psum_saturated = conv.saturated;

    // Per-output-step currents. When in_T == 1 and out_T > 1 the single
    // convolution result is repeated for each output time step.
    std::vector<std::vector<int32_t>> currents;
    currents.reserve(static_cast<size_t>(unit.out_t));
    for (int t = 0; t < unit.out_t; ++t) {
        int src = unit.in_t == unit.out_t ? t : 0;
        currents.push_back(currents_from_psum(conv.maps[static_cast<size_t>(src)], weights.scale));
    }

    if (unit.role == ConvUnit::Role::Output) {
        out.currents = std::move(currents);
        // The output layer accumulates with no reset and averages; callers
        // use output_accumulate on these currents. Spikes stay empty.
        out.spikes = SpikeTensor(1, unit.out_c, unit.in_h, unit.in_w);
        return out;
    }

    LifParams params;
    LifState state(currents[0].size());
    std::vector<std::vector<uint8_t>> step_spikes(static_cast<size_t>(unit.out_t));
    for (int t = 0; t < unit.out_t; ++t)
        lif_step(currents[static_cast<size_t>(t)], state, params, step_spikes[static_cast<size_t>(t)]);
    out.lif_saturated = state.saturated;

    SpikeTensor spikes = spikes_from_steps(step_spikes, unit.out_c, unit.in_h, unit.in_w);
    out.spikes = unit.maxpool ? spike_maxpool(spikes) : std::move(spikes);
    return out;
}

} // namespace snn
