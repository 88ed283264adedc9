// commands.hpp — the operations behind the snnsim subcommands.
//
// Kept as library functions so tests can drive the exact surface the CLI
// exposes. All commands are pure functions of (files, flags, seed); output
// files are written atomically.
#pragma once

#include <cstdint>
#include <ostream>
#include <string>

#include "snn/dataflow.hpp"

namespace snn::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitInternal = 4;

enum class ReportFormat : uint8_t { Text, Csv };

struct RunConfig {
    std::string net_path;
    std::string weights_path; // empty: synthesize from the seed
    std::string input_path;   // empty: synthesize from the seed
    std::string out_dir;
    double rate = 0.8;
    uint64_t seed = 1;
    MemoryConfig mem;
    int pass_channels = 1;
    ReportFormat format = ReportFormat::Text;
    std::string analyze_mode; // miout | parallelism | traffic
};

// prune: load (or synthesize) weights, magnitude-prune the 3x3 kernels at
// --rate, quantize, bit-mask encode, and write <out>/weights.snnw. Prints a
// per-layer density table.
int cmd_prune(const RunConfig &cfg, std::ostream &out);

// infer: run the network, write per-layer spike tensors (SNNT),
// output-layer potentials (CSV) and the simulation report. Verifies the
// executed cycle count against the KTBC schedule.
int cmd_infer(const RunConfig &cfg, std::ostream &out);

// compress-report: dense / bit-mask / CSR storage bits per layer with
// reduction percentages.
int cmd_compress_report(const RunConfig &cfg, std::ostream &out);

// analyze: miout | parallelism | traffic.
int cmd_analyze(const RunConfig &cfg, std::ostream &out);

// Maps library errors to the documented exit codes (2 usage, 3 data,
// 4 internal), printing the diagnostic to `err`.
int run_command(int (*cmd)(const RunConfig &, std::ostream &), const RunConfig &cfg,
                std::ostream &out, std::ostream &err);

} // namespace snn::cli
