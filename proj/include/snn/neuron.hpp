// neuron.hpp — discrete-time LIF dynamics, the no-reset averaging output
// layer, and OR-gate max pooling.
#pragma once

#include <cstdint>
#include <vector>

#include "snn/fixed.hpp"
#include "snn/tensor.hpp"

namespace snn {

enum class ResetMode : uint8_t {
    HardZero,          // membrane := 0 after a spike
    SubtractThreshold, // membrane := V' - threshold after a spike
};

struct LifParams {
    // Threshold 0.5 and leak 0.25, both exact in Q8.8.
    int32_t threshold_raw = FixedPoint::kOne / 2;
    int leak_shift = 2; // leak multiplier 2^-leak_shift; 2 -> x0.25
    ResetMode reset = ResetMode::HardZero;
};

// Per-neuron membrane potentials, persistent across the time steps of one
// layer and reset between inputs. 16-bit accumulator semantics: updates
// saturate and set `saturated`.
struct LifState {
    std::vector<int32_t> membrane;
    bool saturated = false;

    explicit LifState(size_t n = 0) : membrane(n, 0) {}
    void reset() { std::fill(membrane.begin(), membrane.end(), 0); }
};

// One LIF step over a batch of neurons: V' = leak*V + I, spike iff
// V' > threshold (strict), membrane hard-resets to 0 on a spike. The leak is
// an arithmetic right shift, exact for the 0.25 leak term.
// Writes 0/1 spikes to `spikes` (resized to match).
void lif_step(const std::vector<int32_t> &current_raw, LifState &state,
              const LifParams &params, std::vector<uint8_t> &spikes);

// Single-neuron convenience used by tests and worked traces.
struct LifStepResult {
    uint8_t spike = 0;
    int32_t membrane_raw = 0;
};
LifStepResult lif_step_one(int32_t current_raw, int32_t membrane_raw,
                           const LifParams &params);

// Output layer: accumulates currents over T steps with no reset, no leak and
// no threshold, then averages. The fixed-point quotient rounds half to even.
// currents_raw[t][i] is neuron i's current at step t; all steps same size.
std::vector<int32_t> output_accumulate(const std::vector<std::vector<int32_t>> &currents_raw);

// 2x2 stride-2 max pooling as an OR over each window, per (t, c). Odd input
// dims are replicate-padded by one row/column first.
SpikeTensor spike_maxpool(const SpikeTensor &map);

} // namespace snn
