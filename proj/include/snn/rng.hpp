// rng.hpp — deterministic 64-bit random generator (splitmix64 core).
//
// The standard <random> distributions are implementation defined, which would
// make synthesized weights differ across standard libraries. Everything
// random in this project (synthetic inputs, weights, test vectors) goes
// through this generator so a single seed reproduces byte-identical runs.
#pragma once

#include <cstdint>

namespace snn {

class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next() {
        // splitmix64 (Steele, Lea, Flood 2014); public domain reference constants.
        uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, n), n > 0. Rejection-free modulo is fine here: n is tiny
    // compared to 2^64, so the bias is far below anything the tests resolve.
    uint64_t uniform(uint64_t n) { return next() % n; }

    // Uniform integer in [lo, hi], inclusive.
    int64_t uniform_int(int64_t lo, int64_t hi) {
        return lo + static_cast<int64_t>(uniform(static_cast<uint64_t>(hi - lo + 1)));
    }

    // Uniform double in [0, 1).
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform01() < p; }

    // Independent sub-stream for component `tag` of a master seed.
    static uint64_t substream(uint64_t seed, uint64_t tag) {
        Rng r(seed ^ (0xA24BAED4963EE407ull * (tag + 1)));
        return r.next();
    }

private:
    uint64_t state_;
};

} // namespace snn
