// report.hpp — gating counters and the simulation report.
#pragma once

#include <cstdint>
#include <string>

namespace snn {

// Counters kept by the gated one-to-all product. One cycle is charged per
// nonzero weight per input channel per tile pass; enabled + gated always
// equals processed nonzeros x tile positions.
struct GateStats {
    uint64_t enabled_accum = 0;
    uint64_t gated_accum = 0;
    uint64_t cycles = 0;

    GateStats &operator+=(const GateStats &o) {
        enabled_accum += o.enabled_accum;
        gated_accum += o.gated_accum;
        cycles += o.cycles;
        return *this;
    }
};

inline constexpr double kDramEnergyPerBit = 70e-12; // joule/bit, DDR3

struct SimReport {
    uint64_t cycles = 0;
    uint64_t enabled_accum = 0;
    uint64_t gated_accum = 0;
    uint64_t dram_bits_in = 0;
    uint64_t dram_bits_out = 0;
    uint64_t dram_bits_w = 0;
    double energy_dram_j = 0.0;
    double fps = 0.0;

    uint64_t dram_bits_total() const { return dram_bits_in + dram_bits_out + dram_bits_w; }

    void add_gate(const GateStats &g) {
        cycles += g.cycles;
        enabled_accum += g.enabled_accum;
        gated_accum += g.gated_accum;
    }

    // Recomputes the derived fields from the counters.
    void finalize(double clock_hz);
};

// Shared numeric formatting so the text and CSV forms carry identical numbers.
std::string format_double(double v);

// key: value lines, one per field, in the canonical field order.
std::string report_text(const SimReport &r);
// Header row plus one data row, same field names and numbers as the text form.
std::string report_csv(const SimReport &r);

} // namespace snn
