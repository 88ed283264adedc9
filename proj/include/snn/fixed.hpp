// fixed.hpp — Q8.8 fixed-point potentials with 16-bit accumulator semantics.
#pragma once

#include <cmath>
#include <cstdint>

namespace snn {

// Signed fixed point with 8 fractional bits. Membrane potentials and neuron
// currents live in this format; the hardware accumulates them in 16-bit
// registers, so arithmetic saturates at the int16 range and flags it.
struct FixedPoint {
    static constexpr int kFracBits = 8;
    static constexpr int32_t kOne = 1 << kFracBits; // 256
    static constexpr int32_t kMax = INT16_MAX;
    static constexpr int32_t kMin = INT16_MIN;

    int32_t raw = 0;

    static constexpr FixedPoint from_raw(int32_t r) { return FixedPoint{r}; }

    // Round to nearest, half away from zero.
    static FixedPoint from_real(double v) {
        return FixedPoint{static_cast<int32_t>(std::llround(v * kOne))};
    }

    double to_real() const { return static_cast<double>(raw) / kOne; }

    friend bool operator==(FixedPoint a, FixedPoint b) { return a.raw == b.raw; }
};

// Saturate to the 16-bit accumulator range; sets *flag when clipping occurs.
inline int32_t saturate16(int64_t v, bool *flag) {
    if (v > FixedPoint::kMax) {
        if (flag) *flag = true;
        return FixedPoint::kMax;
    }
    if (v < FixedPoint::kMin) {
        if (flag) *flag = true;
        return FixedPoint::kMin;
    }
    return static_cast<int32_t>(v);
}

// Integer division rounding half to even (banker's rounding). den > 0.
inline int64_t div_round_half_even(int64_t num, int64_t den) {
    int64_t q = num / den;
    int64_t r = num % den;
    if (r < 0) { // make remainder non-negative (floor division)
        q -= 1;
        r += den;
    }
    int64_t twice = 2 * r;
    if (twice > den) return q + 1;
    if (twice < den) return q;
    return (q % 2 == 0) ? q : q + 1; // exactly half: round to even
}

} // namespace snn
