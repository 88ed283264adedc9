// snnsim — command-line front end for the sparse SNN accelerator model.
//
//   snnsim prune            --net N [--weights W] --out DIR --rate F [--seed S]
//   snnsim infer            --net N [--weights W] [--input I] --out DIR [--seed S]
//   snnsim compress-report  [--net N | --weights W]
//   snnsim analyze MODE     --net N [--weights W] [--input I]   (MODE: miout |
//                           parallelism | traffic)
//
// Missing --weights/--input are synthesized deterministically from --seed.
// Exit codes: 0 ok, 2 usage error, 3 data/format error, 4 internal error.
#include <iostream>

#include "CLI11.hpp"
#include "snn/commands.hpp"

int main(int argc, char **argv) {
    CLI::App app{"sparse compressed spiking-neural-network accelerator model"};
    app.require_subcommand(1);

    snn::cli::RunConfig cfg;
    std::string format = "text";
    double clock_hz = cfg.mem.clock_hz;
    uint64_t input_sram_bits = cfg.mem.input_sram_bits;

    auto add_common = [&](CLI::App *sub) {
        sub->add_option("--net", cfg.net_path, "network spec file");
        sub->add_option("--weights", cfg.weights_path, "SNNW weight file");
        sub->add_option("--input", cfg.input_path, "SNNT input tensor");
        sub->add_option("--out", cfg.out_dir, "output directory");
        sub->add_option("--rate", cfg.rate, "pruning rate in [0,1)");
        sub->add_option("--seed", cfg.seed, "seed for synthesized inputs/weights");
        sub->add_option("--clock", clock_hz, "core clock in Hz");
        sub->add_option("--input-sram-bits", input_sram_bits, "input SRAM capacity in bits");
        sub->add_option("--pass-channels", cfg.pass_channels,
                        "output channels per input re-fetch pass");
        sub->add_option("--format", format, "report format: text or csv")
            ->check(CLI::IsMember({"text", "csv"}));
    };

    CLI::App *prune = app.add_subcommand("prune", "prune, quantize and encode weights");
    CLI::App *infer = app.add_subcommand("infer", "run inference and the cost model");
    CLI::App *compress = app.add_subcommand("compress-report",
                                            "compare dense/bitmask/CSR weight storage");
    CLI::App *analyze = app.add_subcommand("analyze", "miout, parallelism or traffic study");
    analyze->add_option("mode", cfg.analyze_mode, "miout | parallelism | traffic")
        ->required();
    for (CLI::App *sub : {prune, infer, compress, analyze}) add_common(sub);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : snn::cli::kExitUsage;
    }

    cfg.mem.clock_hz = clock_hz;
    cfg.mem.input_sram_bits = input_sram_bits;
    cfg.format = format == "csv" ? snn::cli::ReportFormat::Csv : snn::cli::ReportFormat::Text;

    int (*cmd)(const snn::cli::RunConfig &, std::ostream &) = nullptr;
    if (prune->parsed()) cmd = snn::cli::cmd_prune;
    else if (infer->parsed()) cmd = snn::cli::cmd_infer;
    else if (compress->parsed()) cmd = snn::cli::cmd_compress_report;
    else cmd = snn::cli::cmd_analyze;

    return snn::cli::run_command(cmd, cfg, std::cout, std::cerr);
}
