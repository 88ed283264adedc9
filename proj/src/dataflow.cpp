#include "snn/dataflow.hpp"

#include <algorithm>
#include <deque>

namespace snn {

void PeOrg::validate() const {
    if (ic_par <= 0 || h_par <= 0 || w_par <= 0)
        throw ParamError("PeOrg: dimensions must be positive");
    if (ic_par * h_par * w_par != 576)
        throw ParamError("PeOrg: ic_par * h_par * w_par must equal 576");
    if (fifo_depth < 1) throw ParamError("PeOrg: fifo_depth must be >= 1");
    if (drain_rate < 1) throw ParamError("PeOrg: drain_rate must be >= 1");
}

uint64_t input_sram_bits(int channels, int time_steps, int tile_h, int tile_w) {
    if (channels <= 0 || time_steps <= 0 || tile_h <= 0 || tile_w <= 0)
        throw ParamError("input_sram_bits: arguments must be positive");
    return static_cast<uint64_t>(tile_h) * tile_w * channels * time_steps;
}

double dram_energy(uint64_t bits) {
    return static_cast<double>(bits) * kDramEnergyPerBit;
}

uint64_t reorder_address(int k, int t, int b, int channels, int bit_planes) {
    if (k < 0 || k >= channels || b < 0 || b >= bit_planes || t < 0)
        throw ParamError("reorder_address: index out of range");
    return (static_cast<uint64_t>(t) * bit_planes + b) * channels + k;
}

namespace {

uint64_t tile_count(int h, int w, int tile_h, int tile_w) {
    uint64_t rows = (static_cast<uint64_t>(h) + tile_h - 1) / tile_h;
    uint64_t cols = (static_cast<uint64_t>(w) + tile_w - 1) / tile_w;
    return rows * cols;
}

void check_weights(const std::vector<ConvUnit> &units, const std::vector<EncodedLayer> &weights) {
    if (units.size() != weights.size())
        throw DataError("weights do not match the network (unit count)");
    for (size_t i = 0; i < units.size(); ++i)
        if (weights[i].out_c != units[i].out_c || weights[i].in_c != units[i].in_c ||
            weights[i].k != units[i].k)
            throw DataError("weights do not match the network (unit " + std::to_string(i) + ")");
}

} // namespace

TrafficReport dram_traffic(const NetworkSpec &net, const std::vector<EncodedLayer> &weights,
                           const MemoryConfig &mem, int pass_channels) {
    if (pass_channels < 1) throw ParamError("dram_traffic: pass_channels must be >= 1");
    auto units = expand_units(net);
    check_weights(units, weights);

    TrafficReport rep;
    uint64_t largest_layer_bits = 0;
    for (size_t i = 0; i < units.size(); ++i) {
        const ConvUnit &u = units[i];
        const EncodedLayer &lw = weights[i];
        LayerTraffic lt;
        lt.unit = static_cast<int>(i);

        // Input: the whole map once; re-fetched per output-channel pass when
        // a tile's working set exceeds the input SRAM.
        int in_depth = u.is_encode() ? 8 : 1; // bit planes stored for multibit input
        uint64_t footprint_tile = input_sram_bits(u.in_c, u.in_t) * in_depth;
        uint64_t in_once = static_cast<uint64_t>(u.in_h) * u.in_w * u.in_c * u.in_t * in_depth;
        if (footprint_tile > mem.input_sram_bits)
            lt.refetch_factor = (u.out_c + pass_channels - 1) / pass_channels;
        lt.input_bits = in_once * static_cast<uint64_t>(lt.refetch_factor);

        // Output: written once. Spike maps are one bit per element; the
        // output layer emits 16-bit averaged potentials.
        int out_bits_per_elem = u.role == ConvUnit::Role::Output ? 16 : 1;
        int out_steps = u.role == ConvUnit::Role::Output ? 1 : u.out_t;
        lt.output_bits = static_cast<uint64_t>(u.out_h) * u.out_w * u.out_c * out_steps *
                         out_bits_per_elem;

        lt.weight_bits = storage_bits(lw, WeightFormat::Bitmask);
        uint64_t mask_bits = storage_bits(lw, WeightFormat::Bitmask) - 8 * lw.total_nnz();
        largest_layer_bits = std::max(largest_layer_bits, lt.weight_bits);
        // Weight SRAMs must hold the largest layer (map bits and value bits
        // live in separate banks).
        if (mask_bits > mem.weight_map_sram_bits ||
            8 * lw.total_nnz() > mem.nz_weight_sram_bits)
            rep.weights_fit_on_chip = false;

        rep.input_bits += lt.input_bits;
        rep.output_bits += lt.output_bits;
        rep.weight_bits += lt.weight_bits;
        rep.layers.push_back(lt);
    }
    return rep;
}

uint64_t ktbc_unit_cycles(const ConvUnit &unit, const EncodedLayer &weights,
                          int tile_h, int tile_w) {
    // in_T computed steps: layers changing the time step (in_T == 1,
    // out_T > 1) run the convolution once and repeat the result.
    uint64_t tiles = tile_count(unit.in_h, unit.in_w, tile_h, tile_w);
    return tiles * static_cast<uint64_t>(unit.in_t) * unit.bit_planes() * weights.total_nnz();
}

KtbcSchedule ktbc_schedule(const NetworkSpec &net, const std::vector<EncodedLayer> &weights,
                           int tile_h, int tile_w) {
    auto units = expand_units(net);
    check_weights(units, weights);
    KtbcSchedule sched;
    for (size_t i = 0; i < units.size(); ++i) {
        uint64_t c = ktbc_unit_cycles(units[i], weights[i], tile_h, tile_w);
        sched.unit_cycles.push_back(c);
        sched.cycles += c;
    }
    return sched;
}

uint64_t spatial_latency(const std::vector<uint32_t> &per_channel_nnz) {
    uint64_t sum = 0;
    for (uint32_t n : per_channel_nnz) sum += n;
    return sum;
}

uint64_t input_parallel_latency(const std::vector<uint32_t> &per_channel_nnz, const PeOrg &org) {
    org.validate();
    if (org.ic_par == 1) return spatial_latency(per_channel_nnz);

    // The 576 PEs split into ic_par lanes of h_par x w_par positions, so one
    // tile takes `passes = 576 / (h_par * w_par)` region passes. Per pass,
    // channels are round-robined over the lanes; a lane spends nnz(c) cycles
    // on a channel, then pushes one partial-result entry into its FIFO. One
    // merger retires drain_rate entries per cycle; a full FIFO stalls the
    // lane before it can start its next channel.
    int lanes = org.ic_par;
    int passes = 576 / (org.h_par * org.w_par);

    // Job list per lane: nnz of each channel it processes, repeated per pass
    // (zero-weight channels are skipped entirely).
    std::vector<std::deque<uint32_t>> jobs(static_cast<size_t>(lanes));
    uint64_t total_entries = 0;
    for (int pass = 0; pass < passes; ++pass)
        for (size_t c = 0; c < per_channel_nnz.size(); ++c)
            if (per_channel_nnz[c] > 0) {
                jobs[c % static_cast<size_t>(lanes)].push_back(per_channel_nnz[c]);
                ++total_entries;
            }
    if (total_entries == 0) return 0;

    std::vector<uint64_t> remaining(static_cast<size_t>(lanes), 0); // cycles left on current job
    std::vector<bool> pending(static_cast<size_t>(lanes), false);   // finished, waiting on FIFO
    std::vector<int> fifo(static_cast<size_t>(lanes), 0);
    for (int l = 0; l < lanes; ++l)
        if (!jobs[static_cast<size_t>(l)].empty()) {
            remaining[static_cast<size_t>(l)] = jobs[static_cast<size_t>(l)].front();
            jobs[static_cast<size_t>(l)].pop_front();
        }

    uint64_t merged = 0;
    uint64_t cycle = 0;
    int rr = 0; // merger round-robin pointer
    while (merged < total_entries) {
        ++cycle;
        // Merger drains first: entries pushed this cycle are visible next cycle.
        for (int d = 0; d < org.drain_rate; ++d) {
            for (int probe = 0; probe < lanes; ++probe) {
                int l = (rr + probe) % lanes;
                if (fifo[static_cast<size_t>(l)] > 0) {
                    --fifo[static_cast<size_t>(l)];
                    ++merged;
                    rr = (l + 1) % lanes;
                    break;
                }
            }
        }
        // Lanes advance one cycle.
        for (int l = 0; l < lanes; ++l) {
            size_t li = static_cast<size_t>(l);
            if (pending[li]) {
                if (fifo[li] < org.fifo_depth) {
                    ++fifo[li];
                    pending[li] = false;
                    if (!jobs[li].empty()) {
                        remaining[li] = jobs[li].front();
                        jobs[li].pop_front();
                    }
                }
                continue; // stalled or handing off; no compute this cycle
            }
            if (remaining[li] == 0) continue;
            if (--remaining[li] == 0) {
                // Channel finished at the end of this cycle; push next cycle.
                if (fifo[li] < org.fifo_depth) {
                    ++fifo[li];
                    if (!jobs[li].empty()) {
                        remaining[li] = jobs[li].front();
                        jobs[li].pop_front();
                    }
                } else {
                    pending[li] = true;
                }
            }
        }
    }
    return cycle;
}

uint64_t output_parallel_latency(const std::vector<std::vector<uint32_t>> &nnz_matrix,
                                 int out_par) {
    if (out_par < 1) throw ParamError("output_parallel_latency: out_par must be >= 1");
    if (nnz_matrix.empty()) return 0;
    size_t out_c = nnz_matrix.size();
    size_t in_c = nnz_matrix[0].size();
    uint64_t latency = 0;
    for (size_t g = 0; g < out_c; g += static_cast<size_t>(out_par)) {
        size_t g_end = std::min(g + static_cast<size_t>(out_par), out_c);
        for (size_t c = 0; c < in_c; ++c) {
            uint32_t worst = 0;
            for (size_t o = g; o < g_end; ++o) {
                if (nnz_matrix[o].size() != in_c)
                    throw ParamError("output_parallel_latency: ragged nnz matrix");
                worst = std::max(worst, nnz_matrix[o][c]);
            }
            latency += worst; // all co-scheduled channels wait for the slowest
        }
    }
    return latency;
}

uint64_t parallelism_latency(const std::vector<uint32_t> &per_channel_nnz, const PeOrg &org) {
    org.validate();
    return org.ic_par == 1 ? spatial_latency(per_channel_nnz)
                           : input_parallel_latency(per_channel_nnz, org);
}

std::vector<std::vector<uint32_t>> layer_nnz_matrix(const EncodedLayer &layer) {
    std::vector<std::vector<uint32_t>> m(static_cast<size_t>(layer.out_c),
                                         std::vector<uint32_t>(static_cast<size_t>(layer.in_c)));
    for (int o = 0; o < layer.out_c; ++o)
        for (int c = 0; c < layer.in_c; ++c)
            m[static_cast<size_t>(o)][static_cast<size_t>(c)] =
                static_cast<uint32_t>(layer.kernel_at(o, c).nnz());
    return m;
}

} // namespace snn
