#include "doctest.h"

#include <bit>
#include <cmath>

#include "snn/rng.hpp"
#include "snn/weights.hpp"
#include "snn/weights_io.hpp"

using namespace snn;

TEST_SUITE_BEGIN("weights");

namespace {

DenseKernel random_kernel(Rng &rng, int k, double density) {
    DenseKernel d;
    d.k = k;
    for (int i = 0; i < k * k; ++i)
        if (rng.bernoulli(density)) {
            int8_t v = 0;
            while (v == 0) v = static_cast<int8_t>(rng.uniform_int(-127, 127));
            d.w[static_cast<size_t>(i)] = v;
        }
    return d;
}

} // namespace

TEST_CASE("prune rate 0 is the identity") {
    LayerWeights l(2, 2, 3);
    Rng rng(3);
    for (auto &v : l.values) v = static_cast<float>(rng.uniform_int(-64, 64));
    auto before = l.values;
    prune_magnitude(l, 0.0);
    CHECK(l.values == before);
}

TEST_CASE("rate 0.8 over magnitudes 1..10 keeps the two largest") {
    std::vector<float> vals = {3, -1, 7, 2, -9, 5, -4, 10, 6, -8};
    prune_values(vals, 0.8);
    int kept = 0;
    for (float v : vals) {
        if (v != 0.0f) {
            ++kept;
            CHECK(std::fabs(v) >= 9.0f);
        }
    }
    CHECK(kept == 2);
}

TEST_CASE("1x1 layers pass through pruning untouched") {
    LayerWeights l(4, 4, 1);
    Rng rng(4);
    for (auto &v : l.values) v = static_cast<float>(rng.uniform_int(-64, 64));
    auto before = l.values;
    auto rep = prune_magnitude(l, 0.8);
    CHECK(l.values == before);
    CHECK(rep.total == before.size());
}

TEST_CASE("prune rate 1.0 is rejected") {
    LayerWeights l(1, 1, 3);
    CHECK_THROWS_AS(prune_magnitude(l, 1.0), ParamError);
    CHECK_THROWS_AS(prune_magnitude(l, -0.1), ParamError);
}

TEST_CASE("pruning zeroes exactly floor(rate * N) entries and shrinks no magnitude") {
    Rng rng(17);
    for (int iter = 0; iter < 30; ++iter) {
        size_t n = 9 * (1 + rng.uniform(40));
        std::vector<float> vals(n);
        for (auto &v : vals) v = static_cast<float>(rng.uniform_int(-64, 64));
        auto before = vals;
        double rate = rng.uniform01() * 0.99;
        prune_values(vals, rate);
        size_t zeroed = 0;
        for (size_t i = 0; i < n; ++i) {
            CHECK(std::fabs(vals[i]) <= std::fabs(before[i]));
            if (vals[i] == 0.0f && before[i] != 0.0f) ++zeroed;
        }
        size_t expect = static_cast<size_t>(rate * static_cast<double>(n));
        size_t already_zero = 0;
        for (size_t i = 0; i < n; ++i)
            if (before[i] == 0.0f) ++already_zero;
        // Up to `already_zero` of the zeroed slots were zero to begin with.
        CHECK(zeroed + already_zero >= expect);
        CHECK(zeroed <= expect);
    }
}

TEST_CASE("global pruning ranks across layers") {
    std::vector<LayerWeights> net;
    LayerWeights small(1, 1, 3), big(1, 1, 3);
    for (int i = 0; i < 9; ++i) small.values[static_cast<size_t>(i)] = 1.0f;
    for (int i = 0; i < 9; ++i) big.values[static_cast<size_t>(i)] = 100.0f;
    net.push_back(small);
    net.push_back(big);
    auto reps = prune_network(net, 0.5, PruneScope::Global);
    CHECK(reps[0].kept == 0); // all small weights are in the bottom half
    CHECK(reps[1].kept == 9);
}

TEST_CASE("quantization round trip is exact for representable weights") {
    // Weights that are exact multiples of max|w| / 127 survive the round
    // trip; the 127 entry pins the derived scale to the intended one.
    LayerWeights l(1, 1, 3);
    float scale = 0.013f;
    const int q_in[9] = {127, -127, 64, -50, 33, -12, 5, -1, 0};
    for (int i = 0; i < 9; ++i)
        l.values[static_cast<size_t>(i)] = scale * static_cast<float>(q_in[i]);
    QuantLayer q = quantize8(l);
    for (size_t i = 0; i < l.values.size(); ++i) {
        CHECK(q.values[i] == q_in[i]);
        CHECK(q.scale * static_cast<float>(q.values[i]) ==
              doctest::Approx(l.values[i]).epsilon(1e-6));
    }
}

TEST_CASE("quantization scale and rounding follow the fixed scheme") {
    LayerWeights l(1, 1, 3);
    l.values[0] = 1.27f;
    l.values[1] = 0.635f;
    QuantLayer q = quantize8(l);
    CHECK(q.scale == doctest::Approx(0.01).epsilon(1e-6));
    CHECK(q.values[0] == 127);
    CHECK(q.values[1] == 64); // 63.5 rounds half away from zero
    CHECK(q.values[2] == 0);  // zero stays zero
}

TEST_CASE("an all-zero layer quantizes with scale 1") {
    LayerWeights l(2, 2, 1);
    QuantLayer q = quantize8(l);
    CHECK(q.scale == 1.0f);
    for (int8_t v : q.values) CHECK(v == 0);
}

TEST_CASE("bitmask encoding of a single corner nonzero") {
    DenseKernel d;
    d.k = 3;
    d.w[0] = 42; // (row, col) = (0, 0)
    BitmaskKernel b = encode_bitmask(d);
    CHECK(b.mask == 0b000000001); // bit i = row-major position i
    REQUIRE(b.values.size() == 1);
    CHECK(b.values[0] == 42);
}

TEST_CASE("bitmask of all-zero and dense kernels") {
    DenseKernel zero;
    zero.k = 3;
    BitmaskKernel bz = encode_bitmask(zero);
    CHECK(bz.mask == 0);
    CHECK(bz.values.empty());

    DenseKernel dense;
    dense.k = 3;
    for (int i = 0; i < 9; ++i) dense.w[static_cast<size_t>(i)] = static_cast<int8_t>(i + 1);
    BitmaskKernel bd = encode_bitmask(dense);
    CHECK(bd.mask == 0x1FF);
    CHECK(bd.values.size() == 9);
}

TEST_CASE("csr encoding matches the textbook layout") {
    DenseKernel d;
    d.k = 3;
    d.w[0] = 5; // single nonzero at (0, 0)
    CsrKernel c = encode_csr(d);
    CHECK(c.row_ptr == std::vector<uint8_t>{0, 1, 1, 1});
    CHECK(c.col_idx == std::vector<uint8_t>{0});

    DenseKernel zero;
    zero.k = 3;
    CHECK(encode_csr(zero).row_ptr == std::vector<uint8_t>{0, 0, 0, 0});

    DenseKernel dense;
    dense.k = 3;
    for (int i = 0; i < 9; ++i) dense.w[static_cast<size_t>(i)] = 1;
    CHECK(encode_csr(dense).row_ptr == std::vector<uint8_t>{0, 3, 6, 9});
}

TEST_CASE("both codecs round-trip random kernels exactly") {
    Rng rng(31);
    for (int iter = 0; iter < 500; ++iter) {
        int k = rng.bernoulli(0.5) ? 1 : 3;
        DenseKernel d = random_kernel(rng, k, rng.uniform01());
        BitmaskKernel b = encode_bitmask(d);
        CHECK(std::popcount(b.mask) == static_cast<int>(b.values.size()));
        DenseKernel db = decode_bitmask(b);
        CHECK(db.w == d.w);
        DenseKernel dc = decode_csr(encode_csr(d));
        CHECK(dc.w == d.w);
    }
}

TEST_CASE("decoders reject corrupt data") {
    BitmaskKernel b;
    b.k = 3;
    b.mask = 0b11; // two nonzeros claimed
    b.values = {7}; // only one stored
    CHECK_THROWS_AS(decode_bitmask(b), DataError);

    CsrKernel c;
    c.k = 3;
    c.row_ptr = {0, 2, 1, 3}; // not non-decreasing
    c.col_idx = {0, 1, 2};
    c.values = {1, 2, 3};
    CHECK_THROWS_AS(decode_csr(c), DataError);
}

TEST_CASE("storage bits follow the closed forms") {
    CHECK(storage_bits_kernel(3, 2, WeightFormat::Bitmask) == 25); // 9 + 16
    CHECK(storage_bits_kernel(3, 0, WeightFormat::Bitmask) == 9);
    CHECK(storage_bits_kernel(3, 5, WeightFormat::Dense) == 72);
    CHECK(storage_bits_kernel(3, 0, WeightFormat::Dense) == 72);
    // CSR, k = 3: 4 row-pointer entries x 4 bits, 2 bits per index.
    CHECK(storage_bits_kernel(3, 1, WeightFormat::Csr) == 16 + 2 + 8);
    // k = 1: 2 pointer entries x 1 bit, no index bits.
    CHECK(storage_bits_kernel(1, 1, WeightFormat::Csr) == 2 + 0 + 8);
}

TEST_CASE("fully dense layers pay exactly the mask overhead under bitmask") {
    EncodedLayer layer;
    layer.out_c = 3;
    layer.in_c = 2;
    layer.k = 3;
    for (int i = 0; i < 6; ++i) {
        DenseKernel d;
        d.k = 3;
        for (int j = 0; j < 9; ++j) d.w[static_cast<size_t>(j)] = static_cast<int8_t>(j + 1);
        layer.kernels.push_back(encode_bitmask(d));
    }
    CHECK(storage_bits(layer, WeightFormat::Bitmask) ==
          storage_bits(layer, WeightFormat::Dense) + 9 * layer.kernels.size());
}

TEST_CASE("bitmask beats dense up to 85% density and CSR at 30%") {
    Rng rng(41);
    for (double density : {0.1, 0.3, 0.5, 0.7, 0.85}) {
        EncodedLayer layer;
        layer.out_c = 8;
        layer.in_c = 8;
        layer.k = 3;
        // Exact density: zero all but round(density * 9 * 64) weights.
        int total = 9 * 64;
        int keep = static_cast<int>(density * total + 0.5);
        std::vector<int8_t> flat(static_cast<size_t>(total), 0);
        for (int i = 0; i < keep; ++i) flat[static_cast<size_t>(i)] = 1;
        for (int i = total - 1; i > 0; --i)
            std::swap(flat[static_cast<size_t>(i)], flat[rng.uniform(static_cast<uint64_t>(i) + 1)]);
        for (int kk = 0; kk < 64; ++kk) {
            DenseKernel d;
            d.k = 3;
            for (int j = 0; j < 9; ++j) d.w[static_cast<size_t>(j)] = flat[static_cast<size_t>(kk * 9 + j)];
            layer.kernels.push_back(encode_bitmask(d));
        }
        uint64_t bm = storage_bits(layer, WeightFormat::Bitmask);
        uint64_t de = storage_bits(layer, WeightFormat::Dense);
        uint64_t cs = storage_bits(layer, WeightFormat::Csr);
        CHECK(bm < de);
        if (density <= 0.3) CHECK(bm < cs);
    }
}

TEST_CASE("SNNW files round-trip layers in both formats") {
    Rng rng(53);
    std::vector<EncodedLayer> layers;
    for (int li = 0; li < 3; ++li) {
        EncodedLayer l;
        l.out_c = 2 + li;
        l.in_c = 3;
        l.k = li == 1 ? 1 : 3;
        l.scale = 0.5f / static_cast<float>(li + 1);
        for (int i = 0; i < l.out_c * l.in_c; ++i)
            l.kernels.push_back(encode_bitmask(random_kernel(rng, l.k, 0.4)));
        layers.push_back(std::move(l));
    }
    for (WeightFormat fmt : {WeightFormat::Bitmask, WeightFormat::Dense}) {
        auto bytes = encode_weights(layers, fmt);
        auto back = decode_weights(bytes);
        REQUIRE(back.size() == layers.size());
        for (size_t i = 0; i < layers.size(); ++i) {
            CHECK(back[i].scale == layers[i].scale);
            REQUIRE(back[i].kernels.size() == layers[i].kernels.size());
            for (size_t j = 0; j < layers[i].kernels.size(); ++j) {
                CHECK(back[i].kernels[j].mask == layers[i].kernels[j].mask);
                CHECK(back[i].kernels[j].values == layers[i].kernels[j].values);
            }
        }
    }
}

TEST_CASE("SNNW decoder rejects corruption") {
    std::vector<EncodedLayer> layers(1);
    layers[0].out_c = 1;
    layers[0].in_c = 1;
    layers[0].k = 3;
    DenseKernel d;
    d.k = 3;
    d.w[4] = -3;
    layers[0].kernels.push_back(encode_bitmask(d));
    auto bytes = encode_weights(layers, WeightFormat::Bitmask);
    auto bad = bytes;
    bad[0] = 'Z';
    CHECK_THROWS_AS(decode_weights(bad), DataError);
    auto truncated = bytes;
    truncated.pop_back();
    CHECK_THROWS_AS(decode_weights(truncated), DataError);
    auto trailing = bytes;
    trailing.push_back(0);
    CHECK_THROWS_AS(decode_weights(trailing), DataError);
}

TEST_SUITE_END();
