// dataflow.hpp — analytical cost model of the accelerator.
//
// Covers SRAM sizing, DRAM traffic and energy, the KTBC loop-nest cycle
// count (output channel K -> time step T -> bit plane B -> input channel C),
// the temporal-channel reorder addressing, and the parallelism-scheme
// latency study.
#pragma once

#include <cstdint>
#include <vector>

#include "snn/network.hpp"
#include "snn/report.hpp"
#include "snn/weights.hpp"

namespace snn {

struct MemoryConfig {
    // Defaults follow the modeled design: input SRAM sized for a 32x18 tile
    // with 512 channels at one time step (36 KB), weight SRAMs sized for the
    // largest layer of a full-scale detection model.
    uint64_t input_sram_bits = 294912;
    uint64_t weight_map_sram_bits = 663552;   // 81 KB
    uint64_t nz_weight_sram_bits = 1769472;   // 216 KB
    double clock_hz = 500e6;
};

// PE allocation across (input channel, height, width); the product must be
// 576. ic_par == 1 is the spatial-parallel configuration.
struct PeOrg {
    int ic_par = 1;
    int h_par = 18;
    int w_par = 32;
    int fifo_depth = 1;
    int drain_rate = 1; // merger entries retired per cycle

    void validate() const;
};

// Input SRAM demand of a 32x18 tile with C channels and T time steps,
// one bit per spike.
uint64_t input_sram_bits(int channels, int time_steps, int tile_h = 18, int tile_w = 32);

// DRAM energy at 70 pJ/bit (DDR3).
double dram_energy(uint64_t bits);

// Slot index of output channel k at time step t, bit plane b, when the
// producer reorders writes so the consumer's channel-innermost read is
// sequential: slot = (t*B + b)*C + k. B is 1 for non-encoding layers.
uint64_t reorder_address(int k, int t, int b, int channels, int bit_planes);

struct LayerTraffic {
    int unit = 0;
    uint64_t input_bits = 0;
    uint64_t output_bits = 0;
    uint64_t weight_bits = 0;
    int refetch_factor = 1;
};

struct TrafficReport {
    std::vector<LayerTraffic> layers;
    uint64_t input_bits = 0;
    uint64_t output_bits = 0;
    uint64_t weight_bits = 0;
    bool weights_fit_on_chip = true;

    uint64_t total_bits() const { return input_bits + output_bits + weight_bits; }
};

// Per-frame DRAM traffic model. Weights are fetched once per frame. A
// layer's input is fetched once when a tile's working set (32x18 x in_C x
// in_T bits, x8 for the multibit encode input) fits the input SRAM;
// otherwise it is re-fetched once per output-channel pass, with
// `pass_channels` output channels per pass. Outputs are written once.
TrafficReport dram_traffic(const NetworkSpec &net, const std::vector<EncodedLayer> &weights,
                           const MemoryConfig &mem, int pass_channels = 1);

struct KtbcSchedule {
    uint64_t cycles = 0;
    std::vector<uint64_t> unit_cycles;
};

// Cycle count of the KTBC loop nest for one unit: nonzero weights only, one
// cycle each, per input channel, per bit plane, per computed time step, per
// tile. Layers with in_T != out_T compute the convolution once (in_T times)
// and reuse it across output steps.
uint64_t ktbc_unit_cycles(const ConvUnit &unit, const EncodedLayer &weights,
                          int tile_h = 18, int tile_w = 32);
KtbcSchedule ktbc_schedule(const NetworkSpec &net, const std::vector<EncodedLayer> &weights,
                           int tile_h = 18, int tile_w = 32);

// --- Parallelism study ------------------------------------------------------
//
// Spatial parallelism processes one nonzero per cycle over the whole tile:
// latency is the plain nnz sum, free of workload imbalance. Input-channel
// parallelism splits the 576 PEs into ic_par lanes covering 576/ic_par
// positions each, so the tile takes ic_par region passes; in each pass the
// channels are round-robined over the lanes and every finished channel
// pushes a partial result into a depth-limited FIFO drained by one merger.
// A full FIFO stalls its lane.

uint64_t spatial_latency(const std::vector<uint32_t> &per_channel_nnz);

uint64_t input_parallel_latency(const std::vector<uint32_t> &per_channel_nnz, const PeOrg &org);

// Output-channel parallelism shares the input across out_par co-scheduled
// output channels and must wait for the slowest one before advancing:
// latency = sum over input channels and groups of max nnz in the group.
// nnz_matrix is indexed [out_channel][in_channel].
uint64_t output_parallel_latency(const std::vector<std::vector<uint32_t>> &nnz_matrix,
                                 int out_par);

// Dispatches on the organization: spatial when ic_par == 1.
uint64_t parallelism_latency(const std::vector<uint32_t> &per_channel_nnz, const PeOrg &org);

// Per-layer nnz workload helpers.
std::vector<std::vector<uint32_t>> layer_nnz_matrix(const EncodedLayer &layer);

} // namespace snn
