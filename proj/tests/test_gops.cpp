#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "snn/gops.hpp"
#include "snn/neuron.hpp"
#include "snn/rng.hpp"

using namespace snn;

TEST_SUITE_BEGIN("gops");

namespace {

// Independent reference: plain nested loops over output positions and kernel
// taps, kept separate from dense_conv_oracle on purpose.
int32_t brute_force_at(const IntMap &in, const DenseKernel &kn, int c, int y, int x,
                       PadMode pad) {
    int half = kn.k / 2;
    int32_t sum = 0;
    for (int r = 0; r < kn.k; ++r)
        for (int s = 0; s < kn.k; ++s) {
            int sy = y + r - half, sx = x + s - half;
            if (sy < 0 || sy >= in.h || sx < 0 || sx >= in.w) {
                if (pad == PadMode::Zero) continue;
                sy = std::clamp(sy, 0, in.h - 1);
                sx = std::clamp(sx, 0, in.w - 1);
            }
            sum += in.at(c, sy, sx) * kn.at(r, s);
        }
    return sum;
}

Grid random_tile(Rng &rng, int h, int w, double density) {
    Grid g(h, w);
    for (auto &v : g.v) v = rng.bernoulli(density);
    return g;
}

DenseKernel random_kernel(Rng &rng, int k, double density) {
    DenseKernel d;
    d.k = k;
    for (int i = 0; i < k * k; ++i)
        if (rng.bernoulli(density)) {
            int8_t v = 0;
            while (v == 0) v = static_cast<int8_t>(rng.uniform_int(-63, 63));
            d.w[static_cast<size_t>(i)] = v;
        }
    return d;
}


EncodedLayer single_kernel_layer(const DenseKernel &d, float scale = 1.0f) {
    EncodedLayer l;
    l.out_c = 1;
    l.in_c = 1;
    l.k = d.k;
    l.scale = scale;
    l.kernels.push_back(encode_bitmask(d));
    return l;
}

ConvUnit simple_unit(int in_c, int out_c, int k, int in_t, int out_t, int h, int w,
                     bool pool = false, ConvUnit::Role role = ConvUnit::Role::Conv) {
    ConvUnit u;
    u.role = role;
    u.in_c = in_c;
    u.out_c = out_c;
    u.k = k;
    u.in_t = in_t;
    u.out_t = out_t;
    u.maxpool = pool;
    u.in_h = h;
    u.in_w = w;
    u.out_h = pool ? (h + 1) / 2 : h;
    u.out_w = pool ? (w + 1) / 2 : w;
    return u;
}

} // namespace

TEST_CASE("enable map of the corner tap is the upper-left input block") {
    // 4x4 input, 3x3 kernel, one nonzero at (0,0), unpadded: the four
    // upper-left inputs drive the four valid outputs.
    Rng rng(1);
    Grid in = random_tile(rng, 4, 4, 0.5);
    Grid en = enable_map(0, 0, in, 2, 2);
    for (int y = 0; y < 2; ++y)
        for (int x = 0; x < 2; ++x) CHECK(en.at(y, x) == in.at(y, x));
}

TEST_CASE("enable map of the center tap is the tile itself") {
    Rng rng(2);
    Grid tile = random_tile(rng, 6, 9, 0.4);
    Grid padded = replicate_pad(tile, 1);
    Grid en = enable_map(1, 1, padded, 6, 9);
    CHECK(en.v == tile.v);
}

TEST_CASE("enable map of a 1x1 kernel is the input") {
    Rng rng(3);
    Grid tile = random_tile(rng, 5, 7, 0.6);
    Grid en = enable_map(0, 0, tile, 5, 7);
    CHECK(en.v == tile.v);
}

TEST_CASE("gated accumulate with an all-zero enable keeps the psum") {
    PartialSumTile psum(3, 4);
    psum.acc[5] = 11;
    GateStats st;
    gated_accumulate(psum, Grid(3, 4), 9, st);
    CHECK(psum.acc[5] == 11);
    CHECK(st.cycles == 1);
    CHECK(st.enabled_accum == 0);
    CHECK(st.gated_accum == 12);
}

TEST_CASE("gated accumulate with a full enable adds the weight everywhere") {
    PartialSumTile psum(2, 2);
    Grid en(2, 2);
    for (auto &v : en.v) v = 1;
    GateStats st;
    gated_accumulate(psum, en, 3, st);
    for (int16_t v : psum.acc) CHECK(v == 3);
    CHECK(st.enabled_accum == 4);
}

TEST_CASE("gated accumulate changes only enabled cells") {
    PartialSumTile psum(2, 2);
    Grid en(2, 2);
    en.set(0, 1, 1);
    en.set(1, 0, 1);
    GateStats st;
    gated_accumulate(psum, en, -2, st);
    CHECK(psum.at(0, 0) == 0);
    CHECK(psum.at(0, 1) == -2);
    CHECK(psum.at(1, 0) == -2);
    CHECK(psum.at(1, 1) == 0);
}

TEST_CASE("gated accumulate is linear over weights with a shared enable") {
    Rng rng(5);
    for (int iter = 0; iter < 100; ++iter) {
        Grid en = random_tile(rng, 4, 6, 0.5);
        int8_t w1 = static_cast<int8_t>(rng.uniform_int(-60, 60));
        int8_t w2 = static_cast<int8_t>(rng.uniform_int(-60, 60));
        PartialSumTile two(4, 6), one(4, 6);
        GateStats st;
        gated_accumulate(two, en, w1, st);
        gated_accumulate(two, en, w2, st);
        gated_accumulate(one, en, static_cast<int8_t>(w1 + w2), st);
        CHECK(two.acc == one.acc);
    }
}

TEST_CASE("an all-zero kernel consumes zero cycles") {
    PartialSumTile psum(3, 3);
    GateStats st;
    BitmaskKernel kn;
    kn.k = 3;
    sparse_conv_channel(psum, replicate_pad(Grid(3, 3), 1), kn, st);
    CHECK(st.cycles == 0);
    for (int16_t v : psum.acc) CHECK(v == 0);
}

TEST_CASE("a single-nonzero kernel is the weighted enable map in one cycle") {
    Rng rng(6);
    Grid tile = random_tile(rng, 4, 5, 0.5);
    Grid padded = replicate_pad(tile, 1);
    DenseKernel d;
    d.k = 3;
    d.w[2] = -7; // (0, 2)
    PartialSumTile psum(4, 5);
    GateStats st;
    sparse_conv_channel(psum, padded, encode_bitmask(d), st);
    CHECK(st.cycles == 1);
    Grid en = enable_map(0, 2, padded, 4, 5);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 5; ++x)
            CHECK(psum.at(y, x) == (en.at(y, x) ? -7 : 0));
}

TEST_CASE("enabled plus gated equals processed nonzeros times tile size") {
    Rng rng(16);
    for (int iter = 0; iter < 20; ++iter) {
        int h = 1 + static_cast<int>(rng.uniform(18));
        int w = 1 + static_cast<int>(rng.uniform(32));
        DenseKernel d = random_kernel(rng, 3, 0.6);
        Grid tile = random_tile(rng, h, w, 0.5);
        PartialSumTile psum(h, w);
        GateStats st;
        sparse_conv_channel(psum, replicate_pad(tile, 1), encode_bitmask(d), st);
        CHECK(st.enabled_accum + st.gated_accum ==
              static_cast<uint64_t>(d.nnz()) * h * w);
        CHECK(st.cycles == static_cast<uint64_t>(d.nnz()));
    }
}

TEST_CASE("dense oracle: identity kernel reproduces the input") {
    Rng rng(7);
    IntMap in(1, 5, 6);
    for (auto &v : in.v) v = static_cast<int32_t>(rng.uniform_int(0, 9));
    DenseKernel id;
    id.k = 3;
    id.w[4] = 1; // center tap
    IntMap out = dense_conv_oracle(in, {id}, 1, PadMode::Zero);
    CHECK(out.v == in.v);
}

TEST_CASE("dense oracle: all-ones kernel on all-ones input") {
    IntMap in(1, 3, 3);
    for (auto &v : in.v) v = 1;
    DenseKernel ones;
    ones.k = 3;
    for (int i = 0; i < 9; ++i) ones.w[static_cast<size_t>(i)] = 1;
    IntMap out = dense_conv_oracle(in, {ones}, 1, PadMode::Zero);
    CHECK(out.at(0, 1, 1) == 9);
    CHECK(out.at(0, 0, 0) == 4); // corner sees a 2x2 window under zero padding
}

TEST_CASE("dense oracle equals a brute-force evaluation") {
    Rng rng(8);
    for (int iter = 0; iter < 30; ++iter) {
        int c = 1 + static_cast<int>(rng.uniform(3));
        int k_out = 1 + static_cast<int>(rng.uniform(3));
        int h = 1 + static_cast<int>(rng.uniform(7));
        int w = 1 + static_cast<int>(rng.uniform(7));
        int k = rng.bernoulli(0.5) ? 1 : 3;
        PadMode pad = rng.bernoulli(0.5) ? PadMode::Zero : PadMode::Replicate;
        IntMap in(c, h, w);
        for (auto &v : in.v) v = static_cast<int32_t>(rng.uniform_int(-4, 4));
        std::vector<DenseKernel> kernels;
        for (int i = 0; i < k_out * c; ++i) kernels.push_back(random_kernel(rng, k, 0.6));
        IntMap out = dense_conv_oracle(in, kernels, k_out, pad);
        for (int o = 0; o < k_out; ++o)
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x) {
                    int32_t want = 0;
                    for (int ci = 0; ci < c; ++ci)
                        want += brute_force_at(in, kernels[static_cast<size_t>(o) * c + ci],
                                               ci, y, x, pad);
                    REQUIRE(out.at(o, y, x) == want);
                }
    }
}

TEST_CASE("sparse conv equals the dense oracle with exact cycle counts") {
    Rng rng(9);
    for (int iter = 0; iter < 200; ++iter) {
        int c = 1 + static_cast<int>(rng.uniform(8));
        int h = 1 + static_cast<int>(rng.uniform(18));
        int w = 1 + static_cast<int>(rng.uniform(32));
        int k = rng.bernoulli(0.3) ? 1 : 3;
        double density = rng.bernoulli(0.5) ? 0.3 : 1.0;
        SpikeTensor spikes(1, c, h, w);
        for (auto &v : spikes.data) v = rng.bernoulli(0.5);

        EncodedLayer layer;
        layer.out_c = 1;
        layer.in_c = c;
        layer.k = k;
        std::vector<DenseKernel> dense;
        for (int i = 0; i < c; ++i) {
            dense.push_back(random_kernel(rng, k, density));
            layer.kernels.push_back(encode_bitmask(dense.back()));
        }

        // Whole map as one tile so block and global convolution agree.
        GateStats st;
        ConvResult got = block_conv(spikes, layer, st, h, w);

        IntMap in(c, h, w);
        for (size_t i = 0; i < spikes.data.size(); ++i) in.v[i] = spikes.data[i];
        IntMap want = dense_conv_oracle(in, dense, 1, PadMode::Replicate);
        REQUIRE(got.maps[0].v == want.v);
        CHECK(st.cycles == layer.total_nnz());
    }
}

TEST_CASE("block conv on a single tile equals dense replicate conv") {
    Rng rng(10);
    SpikeTensor spikes(1, 2, 18, 32);
    for (auto &v : spikes.data) v = rng.bernoulli(0.4);
    EncodedLayer layer;
    layer.out_c = 2;
    layer.in_c = 2;
    layer.k = 3;
    std::vector<DenseKernel> dense;
    for (int i = 0; i < 4; ++i) {
        dense.push_back(random_kernel(rng, 3, 0.5));
        layer.kernels.push_back(encode_bitmask(dense.back()));
    }
    GateStats st;
    ConvResult got = block_conv(spikes, layer, st);
    IntMap in(2, 18, 32);
    for (size_t i = 0; i < spikes.data.size(); ++i) in.v[i] = spikes.data[i];
    IntMap want = dense_conv_oracle(in, dense, 2, PadMode::Replicate);
    CHECK(got.maps[0].v == want.v);
}

TEST_CASE("block conv matches global conv away from tile boundaries") {
    Rng rng(11);
    // 40x64 map: a 2x2 tile grid with interior boundaries at rows 18, cols 32.
    SpikeTensor spikes(1, 1, 36, 64);
    for (auto &v : spikes.data) v = rng.bernoulli(0.5);
    DenseKernel d = random_kernel(rng, 3, 1.0);
    EncodedLayer layer = single_kernel_layer(d);
    GateStats st;
    ConvResult got = block_conv(spikes, layer, st);
    IntMap in(1, 36, 64);
    for (size_t i = 0; i < spikes.data.size(); ++i) in.v[i] = spikes.data[i];
    IntMap want = dense_conv_oracle(in, {d}, 1, PadMode::Replicate);
    for (int y = 0; y < 36; ++y)
        for (int x = 0; x < 64; ++x) {
            bool near_seam = y == 17 || y == 18 || x == 31 || x == 32;
            if (!near_seam) REQUIRE(got.maps[0].at(0, y, x) == want.at(0, y, x));
        }
}

TEST_CASE("block conv of a constant map is constant") {
    SpikeTensor spikes(1, 1, 20, 40); // crosses a tile boundary
    for (auto &v : spikes.data) v = 1;
    DenseKernel d;
    d.k = 3;
    for (int i = 0; i < 9; ++i) d.w[static_cast<size_t>(i)] = 2;
    GateStats st;
    ConvResult got = block_conv(spikes, single_kernel_layer(d), st);
    for (int32_t v : got.maps[0].v) CHECK(v == 18);
}

TEST_CASE("encode conv of an all-zero image is zero") {
    Rng rng(12);
    MultibitTensor img(1, 6, 6);
    GateStats st;
    ConvResult got = encode_layer_conv(img, single_kernel_layer(random_kernel(rng, 3, 1.0)), st);
    for (int32_t v : got.maps[0].v) CHECK(v == 0);
}

TEST_CASE("encode conv of a value-1 image equals the single-plane conv") {
    Rng rng(13);
    MultibitTensor img(1, 5, 5);
    img.set(0, 2, 2, 1); // only bit plane 0 is populated
    DenseKernel d = random_kernel(rng, 3, 1.0);
    EncodedLayer layer = single_kernel_layer(d);
    GateStats st_enc, st_plane;
    ConvResult got = encode_layer_conv(img, layer, st_enc);
    SpikeTensor plane(1, 1, 5, 5);
    plane.set(0, 0, 2, 2, 1);
    ConvResult want = block_conv(plane, layer, st_plane);
    CHECK(got.maps[0].v == want.maps[0].v);
    CHECK(st_enc.cycles == 8 * st_plane.cycles);
}

TEST_CASE("bit-serial conv equals the integer convolution of the image") {
    Rng rng(14);
    for (int iter = 0; iter < 40; ++iter) {
        int c = 1 + static_cast<int>(rng.uniform(3));
        MultibitTensor img(c, 8, 8);
        for (auto &v : img.data) v = static_cast<uint8_t>(rng.uniform(256));
        EncodedLayer layer;
        layer.out_c = 2;
        layer.in_c = c;
        layer.k = 3;
        std::vector<DenseKernel> dense;
        for (int i = 0; i < 2 * c; ++i) {
            dense.push_back(random_kernel(rng, 3, 0.4));
            layer.kernels.push_back(encode_bitmask(dense.back()));
        }
        GateStats st;
        ConvResult got = encode_layer_conv(img, layer, st, 8, 8);
        IntMap in(c, 8, 8);
        for (size_t i = 0; i < img.data.size(); ++i) in.v[i] = img.data[i];
        IntMap want = dense_conv_oracle(in, dense, 2, PadMode::Replicate);
        REQUIRE(got.maps[0].v == want.v);
    }
}

TEST_CASE("gating statistics track the spike density") {
    // The 9 shifted enable maps of a kernel resample the same tile pixels
    // (replicate padding included), so the binomial sigma of the enabled
    // fraction uses the exact per-pixel multiplicities, not the raw sample
    // count.
    Rng rng(15);
    int h = 18, w = 32;
    DenseKernel d;
    d.k = 3;
    for (int i = 0; i < 9; ++i) d.w[static_cast<size_t>(i)] = 1;
    std::vector<uint32_t> mult(static_cast<size_t>(h) * w, 0);
    for (int r = 0; r < 3; ++r)
        for (int s = 0; s < 3; ++s)
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x) {
                    int sy = std::clamp(y + r - 1, 0, h - 1);
                    int sx = std::clamp(x + s - 1, 0, w - 1);
                    ++mult[static_cast<size_t>(sy) * w + sx];
                }
    double sum_sq = 0;
    for (uint32_t m : mult) sum_sq += static_cast<double>(m) * m;

    const int tiles = 50;
    for (double p : {0.1, 0.226, 0.5}) {
        GateStats st;
        for (int iter = 0; iter < tiles; ++iter) {
            Grid tile = random_tile(rng, h, w, p);
            PartialSumTile psum(h, w);
            sparse_conv_channel(psum, replicate_pad(tile, 1), encode_bitmask(d), st);
        }
        uint64_t n = st.enabled_accum + st.gated_accum;
        double frac = static_cast<double>(st.enabled_accum) / static_cast<double>(n);
        double var = p * (1 - p) * (tiles * sum_sq) / (static_cast<double>(n) * n);
        CHECK(std::fabs(frac - p) <= 3 * std::sqrt(var));
    }
}

TEST_CASE("one-to-three time step trace: current 0.4 fires only at step 3") {
    // 1x1 kernel with q = 102 and scale 1/256 makes every neuron's current
    // exactly 0.4 in Q8.8 when the input spikes.
    DenseKernel d;
    d.k = 1;
    d.w[0] = 102;
    EncodedLayer layer = single_kernel_layer(d, 1.0f / 256.0f);
    SpikeTensor in(1, 1, 2, 2);
    for (auto &v : in.data) v = 1;
    ConvUnit unit = simple_unit(1, 1, 1, 1, 3, 2, 2);
    LayerIo io;
    io.spikes = &in;
    LayerOutput out = layer_forward(io, unit, layer);
    REQUIRE(out.spikes.t == 3);
    for (int y = 0; y < 2; ++y)
        for (int x = 0; x < 2; ++x) {
            CHECK(out.spikes.at(0, 0, y, x) == 0);
            CHECK(out.spikes.at(1, 0, y, x) == 0);
            CHECK(out.spikes.at(2, 0, y, x) == 1);
        }
}

TEST_CASE("one-to-three time step trace: current 0.3 never fires") {
    DenseKernel d;
    d.k = 1;
    d.w[0] = 77; // 0.30078 in Q8.8
    EncodedLayer layer = single_kernel_layer(d, 1.0f / 256.0f);
    SpikeTensor in(1, 1, 1, 1);
    in.data[0] = 1;
    ConvUnit unit = simple_unit(1, 1, 1, 1, 3, 1, 1);
    LayerIo io;
    io.spikes = &in;
    LayerOutput out = layer_forward(io, unit, layer);
    for (uint8_t v : out.spikes.data) CHECK(v == 0);
}

TEST_CASE("sub-threshold currents everywhere give all-zero spikes") {
    DenseKernel d;
    d.k = 1;
    d.w[0] = 100; // current 0.39 < 0.5
    EncodedLayer layer = single_kernel_layer(d, 1.0f / 256.0f);
    SpikeTensor in(1, 1, 3, 3);
    for (auto &v : in.data) v = 1;
    ConvUnit unit = simple_unit(1, 1, 1, 1, 1, 3, 3);
    LayerIo io;
    io.spikes = &in;
    LayerOutput out = layer_forward(io, unit, layer);
    for (uint8_t v : out.spikes.data) CHECK(v == 0);
}

TEST_CASE("membrane carry-over distinguishes identical per-step inputs") {
    // Same input at both steps, current 0.45: step 1 stays silent, the
    // residual potential pushes step 2 over the threshold.
    DenseKernel d;
    d.k = 1;
    d.w[0] = 115;
    EncodedLayer layer = single_kernel_layer(d, 1.0f / 256.0f);
    SpikeTensor in(2, 1, 1, 1);
    in.data[0] = 1;
    in.data[1] = 1;
    ConvUnit unit = simple_unit(1, 1, 1, 2, 2, 1, 1);
    LayerIo io;
    io.spikes = &in;
    LayerOutput out = layer_forward(io, unit, layer);
    CHECK(out.spikes.at(0, 0, 0, 0) == 0);
    CHECK(out.spikes.at(1, 0, 0, 0) == 1);
}

TEST_CASE("layer_forward applies OR pooling after the LIF") {
    DenseKernel d;
    d.k = 1;
    d.w[0] = 127;
    EncodedLayer layer = single_kernel_layer(d, 1.0f / 64.0f); // strong drive
    SpikeTensor in(1, 1, 4, 4);
    in.set(0, 0, 0, 0, 1); // one spiking input -> one firing neuron
    ConvUnit unit = simple_unit(1, 1, 1, 1, 1, 4, 4, /*pool=*/true);
    LayerIo io;
    io.spikes = &in;
    LayerOutput out = layer_forward(io, unit, layer);
    REQUIRE(out.spikes.h == 2);
    REQUIRE(out.spikes.w == 2);
    CHECK(out.spikes.at(0, 0, 0, 0) == 1);
    CHECK(out.spikes.at(0, 0, 1, 1) == 0);
}

TEST_CASE("time-step mismatch is rejected") {
    DenseKernel d;
    d.k = 1;
    d.w[0] = 1;
    EncodedLayer layer = single_kernel_layer(d);
    SpikeTensor in(2, 1, 1, 1);
    ConvUnit unit = simple_unit(1, 1, 1, 3, 3, 1, 1);
    LayerIo io;
    io.spikes = &in;
    CHECK_THROWS_AS(layer_forward(io, unit, layer), DataError);
}

TEST_SUITE_END();
