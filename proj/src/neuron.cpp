#include "snn/neuron.hpp"

#include <algorithm>

#include "snn/errors.hpp"

namespace snn {

LifStepResult lif_step_one(int32_t current_raw, int32_t membrane_raw,
                           const LifParams &params) {
    // Leak before current injection; >> on a signed value is an arithmetic
    // shift, exact for leak = 2^-shift.
    bool sat = false;
    int64_t v = static_cast<int64_t>(membrane_raw >> params.leak_shift) + current_raw;
    int32_t v16 = saturate16(v, &sat);
    LifStepResult r;
    r.spike = v16 > params.threshold_raw ? 1 : 0;
    if (r.spike)
        r.membrane_raw = params.reset == ResetMode::HardZero
                             ? 0
                             : saturate16(static_cast<int64_t>(v16) - params.threshold_raw, &sat);
    else
        r.membrane_raw = v16;
    // Saturation is reported through lif_step's state; single-step callers
    // can detect it from the clamped membrane value.
    (void)sat;
    return r;
}

void lif_step(const std::vector<int32_t> &current_raw, LifState &state,
              const LifParams &params, std::vector<uint8_t> &spikes) {
    if (current_raw.size() != state.membrane.size())
        throw ParamError("lif_step: current/state size mismatch");
    spikes.resize(current_raw.size());
    for (size_t i = 0; i < current_raw.size(); ++i) {
        int64_t v = static_cast<int64_t>(state.membrane[i] >> params.leak_shift) + current_raw[i];
        int32_t v16 = saturate16(v, &state.saturated);
        uint8_t s = v16 > params.threshold_raw ? 1 : 0;
        spikes[i] = s;
        if (s)
            state.membrane[i] = params.reset == ResetMode::HardZero
                                    ? 0
                                    : saturate16(static_cast<int64_t>(v16) - params.threshold_raw,
                                                 &state.saturated);
        else
            state.membrane[i] = v16;
    }
}

std::vector<int32_t> output_accumulate(const std::vector<std::vector<int32_t>> &currents_raw) {
    if (currents_raw.empty()) throw ParamError("output_accumulate: T must be >= 1");
    size_t n = currents_raw[0].size();
    for (const auto &step : currents_raw)
        if (step.size() != n) throw ParamError("output_accumulate: ragged input");
    int64_t steps = static_cast<int64_t>(currents_raw.size());
    std::vector<int32_t> out(n);
    for (size_t i = 0; i < n; ++i) {
        int64_t sum = 0;
        for (const auto &step : currents_raw) sum += step[i];
        out[i] = static_cast<int32_t>(div_round_half_even(sum, steps));
    }
    return out;
}

SpikeTensor spike_maxpool(const SpikeTensor &map) {
    int oh = (map.h + 1) / 2;
    int ow = (map.w + 1) / 2;
    SpikeTensor out(map.t, map.c, oh, ow);
    for (int t = 0; t < map.t; ++t)
        for (int c = 0; c < map.c; ++c)
            for (int y = 0; y < oh; ++y)
                for (int x = 0; x < ow; ++x) {
                    // Replicate the last row/col when the input dim is odd.
                    int y0 = 2 * y, y1 = std::min(2 * y + 1, map.h - 1);
                    int x0 = 2 * x, x1 = std::min(2 * x + 1, map.w - 1);
                    uint8_t b = map.at(t, c, y0, x0) | map.at(t, c, y0, x1) |
                                map.at(t, c, y1, x0) | map.at(t, c, y1, x1);
                    out.set(t, c, y, x, b);
                }
    return out;
}

} // namespace snn
