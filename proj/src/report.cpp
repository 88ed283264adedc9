#include "snn/report.hpp"

#include <cstdio>

#include "snn/dataflow.hpp"

namespace snn {

void SimReport::finalize(double clock_hz) {
    energy_dram_j = dram_energy(dram_bits_total());
    fps = cycles > 0 ? clock_hz / static_cast<double>(cycles) : 0.0;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

std::string report_text(const SimReport &r) {
    std::string out;
    out += "cycles: " + std::to_string(r.cycles) + "\n";
    out += "enabled_accum: " + std::to_string(r.enabled_accum) + "\n";
    out += "gated_accum: " + std::to_string(r.gated_accum) + "\n";
    out += "dram_bits_in: " + std::to_string(r.dram_bits_in) + "\n";
    out += "dram_bits_out: " + std::to_string(r.dram_bits_out) + "\n";
    out += "dram_bits_w: " + std::to_string(r.dram_bits_w) + "\n";
    out += "energy_dram_j: " + format_double(r.energy_dram_j) + "\n";
    out += "fps: " + format_double(r.fps) + "\n";
    return out;
}

std::string report_csv(const SimReport &r) {
    std::string out =
        "cycles,enabled_accum,gated_accum,dram_bits_in,dram_bits_out,dram_bits_w,"
        "energy_dram_j,fps\n";
    out += std::to_string(r.cycles) + "," + std::to_string(r.enabled_accum) + "," +
           std::to_string(r.gated_accum) + "," + std::to_string(r.dram_bits_in) + "," +
           std::to_string(r.dram_bits_out) + "," + std::to_string(r.dram_bits_w) + "," +
           format_double(r.energy_dram_j) + "," + format_double(r.fps) + "\n";
    return out;
}

} // namespace snn
