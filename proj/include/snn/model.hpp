// model.hpp — whole-network inference, the mIoUT metric, operation counting,
// mixed-time-step planning, and seeded synthetic inputs/weights.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "snn/gops.hpp"
#include "snn/network.hpp"
#include "snn/report.hpp"
#include "snn/tensor.hpp"
#include "snn/weights.hpp"

namespace snn {

struct ForwardResult {
    std::vector<SpikeTensor> unit_spikes;    // per conv unit (empty map for output units)
    std::vector<int32_t> output_potentials;  // averaged Q8.8 raw values, (c, h, w) row-major
    int out_c = 0, out_h = 0, out_w = 0;     // dims of output_potentials
    SimReport report;                        // cycles and gating counters only
    uint64_t saturation_events = 0;

    bool has_output_layer() const { return !output_potentials.empty(); }
};

// Runs the network on a multibit image (first layer must be an encode
// layer). The encode layer fires once from the current input; subsequent
// layers follow layer_forward; an output layer accumulates with no reset and
// averages over its input time steps.
ForwardResult network_forward(const MultibitTensor &input, const NetworkSpec &net,
                              const std::vector<EncodedLayer> &weights);

// Spike-input variant for networks that start with a plain conv layer.
ForwardResult network_forward(const SpikeTensor &input, const NetworkSpec &net,
                              const std::vector<EncodedLayer> &weights);

// Reassembles the input tensor of unit `i` from the stored unit outputs
// (concatenating along channels for aggregate units).
SpikeTensor assemble_unit_input(const std::vector<ConvUnit> &units, size_t i,
                                const std::vector<SpikeTensor> &unit_spikes);

// mean Intersection over Union across Time-steps. Per neuron firing count s
// over T steps; per channel, I = #{s == T}, P = #{0 < s < T},
// IoU = I / (I + P) (0 when the denominator is 0); mIoUT is the mean over
// channels. Requires T >= 2.
struct MioutResult {
    std::vector<double> per_channel;
    double mean = 0.0;
};
MioutResult miout(const SpikeTensor &spikes);

enum class OpCountMode : uint8_t { Dense, Sparse };

// Operation count (MAC = 2 ops): per unit
//   2 * k^2 * in_C * out_C * H * W * T * B
// with T the computed time steps (in_T; one-to-many layers run the
// convolution once) and B = 8 for the encode layer. Sparse mode replaces
// k^2 * in_C * out_C with the layer's total nonzero count.
uint64_t op_count(const NetworkSpec &net, const std::vector<EncodedLayer> &weights,
                  OpCountMode mode);

// Mixed-time-step plan. The cut point names how many leading layers run
// entirely at one time step: "C<k>" puts layers 1..k at in_T = out_T = 1 and
// makes layer k+1 the transition (in_T = 1, out_T = 3); "C<k>B<j>" makes the
// j-th basic block the transition with the k conv layers and j-1 blocks
// before it at one step. Everything later runs at three steps. An empty cut
// returns the network unchanged.
NetworkSpec mixed_timestep_plan(const NetworkSpec &net, const std::string &cut);

// Seeded synthetic weights: uniform integer weights in [-64, 64], magnitude
// pruning of the 3x3 kernels, symmetric 8-bit quantization, bit-mask
// encoding. The per-layer scale is then calibrated so LIF currents land near
// the firing threshold (synthetic weights are test vectors, not a trained
// model).
std::vector<LayerWeights> synth_float_weights(const NetworkSpec &net, uint64_t seed);
std::vector<EncodedLayer> synth_weights(const NetworkSpec &net, uint64_t seed,
                                        double prune_rate,
                                        PruneScope scope = PruneScope::PerLayer);

// Seeded uniform random input image matching the network's input dims.
MultibitTensor synth_input(const NetworkSpec &net, uint64_t seed);

} // namespace snn
