#include "snn/commands.hpp"

#include <cstdio>
#include <filesystem>
#include <vector>

#include "snn/fixed.hpp"
#include "snn/model.hpp"
#include "snn/tensor_io.hpp"
#include "snn/weights_io.hpp"

namespace snn::cli {

namespace {

namespace fs = std::filesystem;

NetworkSpec load_net(const RunConfig &cfg) {
    if (cfg.net_path.empty()) throw ParamError("--net is required");
    return read_network(cfg.net_path);
}

std::vector<EncodedLayer> load_or_synth_weights(const RunConfig &cfg, const NetworkSpec &net) {
    if (!cfg.weights_path.empty()) {
        auto layers = read_weights(cfg.weights_path);
        // Shape check against the network happens in the consumers.
        return layers;
    }
    return synth_weights(net, cfg.seed, cfg.rate);
}

MultibitTensor load_or_synth_input(const RunConfig &cfg, const NetworkSpec &net) {
    if (!cfg.input_path.empty()) {
        MultibitTensor img = read_multibit_tensor(cfg.input_path);
        if (img.c != net.in_c || img.h != net.in_h || img.w != net.in_w)
            throw DataError("input tensor dims do not match the network");
        return img;
    }
    return synth_input(net, cfg.seed);
}

void require_out_dir(const RunConfig &cfg) {
    if (cfg.out_dir.empty()) throw ParamError("--out is required");
    fs::create_directories(cfg.out_dir);
}

std::string pct(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", 100.0 * x);
    return buf;
}

std::string unit_label(const std::vector<ConvUnit> &units, size_t i, const NetworkSpec &net) {
    const ConvUnit &u = units[i];
    std::string kind;
    switch (u.role) {
    case ConvUnit::Role::Encode: kind = "encode"; break;
    case ConvUnit::Role::Conv: kind = "conv"; break;
    case ConvUnit::Role::Shortcut: kind = "shortcut"; break;
    case ConvUnit::Role::Aggregate: kind = "aggregate"; break;
    case ConvUnit::Role::Output: kind = "output"; break;
    }
    if (net.layers[static_cast<size_t>(u.layer)].kind == LayerKind::CspBlock)
        kind = "csp." + kind;
    return std::to_string(i) + ":" + kind;
}

} // namespace

int cmd_prune(const RunConfig &cfg, std::ostream &out) {
    NetworkSpec net = load_net(cfg);
    auto units = expand_units(net);
    require_out_dir(cfg);
    if (cfg.rate < 0.0 || cfg.rate >= 1.0)
        throw ParamError("prune rate must be in [0, 1)");

    std::vector<EncodedLayer> encoded;
    if (!cfg.weights_path.empty()) {
        // Re-prune stored 8-bit weights by magnitude (scale is per layer, so
        // ranking |q| equals ranking |scale * q|).
        auto layers = read_weights(cfg.weights_path);
        if (layers.size() != units.size())
            throw DataError("weights do not match the network");
        for (auto &l : layers) {
            QuantLayer q = decode_layer(l);
            LayerWeights lw(q.out_c, q.in_c, q.k);
            for (size_t i = 0; i < q.values.size(); ++i)
                lw.values[i] = static_cast<float>(q.values[i]);
            prune_magnitude(lw, cfg.rate);
            QuantLayer pruned = q;
            for (size_t i = 0; i < q.values.size(); ++i)
                pruned.values[i] = static_cast<int8_t>(lw.values[i]);
            EncodedLayer e = encode_layer(pruned);
            e.scale = l.scale;
            l = std::move(e);
        }
        encoded = std::move(layers);
    } else {
        encoded = synth_weights(net, cfg.seed, cfg.rate);
    }

    out << "layer            out_c in_c k  nnz     total   density%\n";
    for (size_t i = 0; i < encoded.size(); ++i) {
        const EncodedLayer &l = encoded[i];
        uint64_t total = static_cast<uint64_t>(l.out_c) * l.in_c * l.k * l.k;
        char buf[128];
        std::snprintf(buf, sizeof(buf), "%-16s %5d %4d %d  %-7llu %-7llu %s\n",
                      unit_label(units, i, net).c_str(), l.out_c, l.in_c, l.k,
                      static_cast<unsigned long long>(l.total_nnz()),
                      static_cast<unsigned long long>(total),
                      pct(static_cast<double>(l.total_nnz()) / static_cast<double>(total)).c_str());
        out << buf;
    }

    std::string path = (fs::path(cfg.out_dir) / "weights.snnw").string();
    write_weights(path, encoded, WeightFormat::Bitmask);
    out << "wrote " << path << "\n";
    return kExitOk;
}

int cmd_infer(const RunConfig &cfg, std::ostream &out) {
    NetworkSpec net = load_net(cfg);
    require_out_dir(cfg);
    auto units = expand_units(net);
    auto weights = load_or_synth_weights(cfg, net);
    MultibitTensor img = load_or_synth_input(cfg, net);

    ForwardResult fw = network_forward(img, net, weights);

    // Model/execution agreement: the executed cycle count must match the
    // KTBC loop-nest prediction exactly.
    KtbcSchedule sched = ktbc_schedule(net, weights);
    if (sched.cycles != fw.report.cycles)
        throw InternalError("executed cycles disagree with the KTBC schedule: " +
                            std::to_string(fw.report.cycles) + " vs " +
                            std::to_string(sched.cycles));

    TrafficReport traffic = dram_traffic(net, weights, cfg.mem, cfg.pass_channels);
    fw.report.dram_bits_in = traffic.input_bits;
    fw.report.dram_bits_out = traffic.output_bits;
    fw.report.dram_bits_w = traffic.weight_bits;
    fw.report.finalize(cfg.mem.clock_hz);

    for (size_t i = 0; i < fw.unit_spikes.size(); ++i) {
        if (units[i].role == ConvUnit::Role::Output) continue;
        char name[64];
        std::snprintf(name, sizeof(name), "layer%02zu.snnt", i);
        write_spike_tensor((fs::path(cfg.out_dir) / name).string(), fw.unit_spikes[i]);
    }
    if (fw.has_output_layer()) {
        std::string csv = "channel,row,col,potential_raw,potential\n";
        size_t idx = 0;
        for (int c = 0; c < fw.out_c; ++c)
            for (int y = 0; y < fw.out_h; ++y)
                for (int x = 0; x < fw.out_w; ++x, ++idx) {
                    int32_t raw = fw.output_potentials[idx];
                    csv += std::to_string(c) + "," + std::to_string(y) + "," +
                           std::to_string(x) + "," + std::to_string(raw) + "," +
                           format_double(static_cast<double>(raw) / FixedPoint::kOne) + "\n";
                }
        write_file_atomic((fs::path(cfg.out_dir) / "output_potentials.csv").string(), csv);
    }

    std::string report = cfg.format == ReportFormat::Csv ? report_csv(fw.report)
                                                         : report_text(fw.report);
    std::string report_name = cfg.format == ReportFormat::Csv ? "report.csv" : "report.txt";
    write_file_atomic((fs::path(cfg.out_dir) / report_name).string(), report);
    out << report;
    if (fw.saturation_events > 0)
        out << "note: " << fw.saturation_events << " unit(s) saturated a 16-bit accumulator\n";
    return kExitOk;
}

int cmd_compress_report(const RunConfig &cfg, std::ostream &out) {
    std::vector<EncodedLayer> layers;
    if (!cfg.weights_path.empty()) {
        layers = read_weights(cfg.weights_path);
    } else {
        NetworkSpec net = load_net(cfg);
        layers = synth_weights(net, cfg.seed, cfg.rate);
    }

    uint64_t dense_total = 0, bitmask_total = 0, csr_total = 0;
    std::string sep = cfg.format == ReportFormat::Csv ? "," : "  ";
    if (cfg.format == ReportFormat::Csv)
        out << "layer,dense_bits,bitmask_bits,csr_bits\n";
    else
        out << "layer  dense_bits  bitmask_bits  csr_bits\n";
    for (size_t i = 0; i < layers.size(); ++i) {
        uint64_t d = storage_bits(layers[i], WeightFormat::Dense);
        uint64_t b = storage_bits(layers[i], WeightFormat::Bitmask);
        uint64_t c = storage_bits(layers[i], WeightFormat::Csr);
        dense_total += d;
        bitmask_total += b;
        csr_total += c;
        out << i << sep << d << sep << b << sep << c << "\n";
    }
    if (!layers.empty()) {
        out << "total" << sep << dense_total << sep << bitmask_total << sep << csr_total << "\n";
        double vs_dense = 1.0 - static_cast<double>(bitmask_total) / static_cast<double>(dense_total);
        double vs_csr = 1.0 - static_cast<double>(bitmask_total) / static_cast<double>(csr_total);
        out << "bitmask saves " << pct(vs_dense) << "% vs dense, " << pct(vs_csr)
            << "% vs csr\n";
    }
    return kExitOk;
}

namespace {

int analyze_miout(const RunConfig &cfg, std::ostream &out) {
    NetworkSpec net = load_net(cfg);
    auto units = expand_units(net);
    auto weights = load_or_synth_weights(cfg, net);
    MultibitTensor img = load_or_synth_input(cfg, net);
    ForwardResult fw = network_forward(img, net, weights);

    out << "unit             in_T  miout\n";
    for (size_t i = 0; i < units.size(); ++i) {
        const ConvUnit &u = units[i];
        char buf[96];
        if (u.input_a < 0 || u.in_t < 2) {
            std::snprintf(buf, sizeof(buf), "%-16s %4d  n/a\n",
                          unit_label(units, i, net).c_str(), u.in_t);
        } else {
            SpikeTensor in = assemble_unit_input(units, i, fw.unit_spikes);
            MioutResult m = miout(in);
            std::snprintf(buf, sizeof(buf), "%-16s %4d  %.4f\n",
                          unit_label(units, i, net).c_str(), u.in_t, m.mean);
        }
        out << buf;
    }
    return kExitOk;
}

int analyze_parallelism(const RunConfig &cfg, std::ostream &out) {
    NetworkSpec net = load_net(cfg);
    auto weights = load_or_synth_weights(cfg, net);
    auto units = expand_units(net);
    if (units.size() != weights.size()) throw DataError("weights do not match the network");

    // Network latency under one organization: every output channel of every
    // unit runs its input channels through the lanes.
    auto net_latency = [&](const PeOrg &org) {
        uint64_t total = 0;
        for (const auto &lw : weights)
            for (const auto &row : layer_nnz_matrix(lw))
                total += parallelism_latency(row, org);
        return total;
    };

    PeOrg spatial; // (1, 18, 32)
    out << "org(ic,h,w)  fifo  latency_cycles\n";
    char buf[96];
    std::snprintf(buf, sizeof(buf), "(1,18,32)    %4s  %llu\n", "-",
                  static_cast<unsigned long long>(net_latency(spatial)));
    out << buf;
    const PeOrg orgs[] = {{2, 18, 16}, {4, 9, 16}, {8, 9, 8}, {16, 6, 6}};
    const int depths[] = {1, 2, 4, 8, 16, 32};
    for (PeOrg org : orgs)
        for (int d : depths) {
            org.fifo_depth = d;
            std::snprintf(buf, sizeof(buf), "(%d,%d,%d)%*s %4d  %llu\n", org.ic_par, org.h_par,
                          org.w_par, org.ic_par >= 10 ? 3 : 4, "", d,
                          static_cast<unsigned long long>(net_latency(org)));
            out << buf;
        }

    out << "out_par  latency_cycles\n";
    for (int op : {2, 4, 8}) {
        uint64_t total = 0;
        for (const auto &lw : weights) total += output_parallel_latency(layer_nnz_matrix(lw), op);
        std::snprintf(buf, sizeof(buf), "%7d  %llu\n", op, static_cast<unsigned long long>(total));
        out << buf;
    }
    return kExitOk;
}

int analyze_traffic(const RunConfig &cfg, std::ostream &out) {
    NetworkSpec net = load_net(cfg);
    auto units = expand_units(net);
    auto weights = load_or_synth_weights(cfg, net);
    TrafficReport rep = dram_traffic(net, weights, cfg.mem, cfg.pass_channels);

    out << "unit             input_bits  output_bits  weight_bits  refetch\n";
    for (const auto &lt : rep.layers) {
        char buf[128];
        std::snprintf(buf, sizeof(buf), "%-16s %10llu  %11llu  %11llu  %7d\n",
                      unit_label(units, static_cast<size_t>(lt.unit), net).c_str(),
                      static_cast<unsigned long long>(lt.input_bits),
                      static_cast<unsigned long long>(lt.output_bits),
                      static_cast<unsigned long long>(lt.weight_bits), lt.refetch_factor);
        out << buf;
    }
    out << "total_bits: " << rep.total_bits() << "\n";
    out << "energy_dram_j: " << format_double(dram_energy(rep.total_bits())) << "\n";
    out << "weights_fit_on_chip: " << (rep.weights_fit_on_chip ? "yes" : "no") << "\n";
    return kExitOk;
}

} // namespace

int cmd_analyze(const RunConfig &cfg, std::ostream &out) {
    if (cfg.analyze_mode == "miout") return analyze_miout(cfg, out);
    if (cfg.analyze_mode == "parallelism") return analyze_parallelism(cfg, out);
    if (cfg.analyze_mode == "traffic") return analyze_traffic(cfg, out);
    throw ParamError("unknown analyze mode '" + cfg.analyze_mode +
                     "' (expected miout, parallelism or traffic)");
}

int run_command(int (*cmd)(const RunConfig &, std::ostream &), const RunConfig &cfg,
                std::ostream &out, std::ostream &err) {
    try {
        return cmd(cfg, out);
    } catch (const ParamError &e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DataError &e) {
        err << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const InternalError &e) {
        err << "internal error: " << e.what() << "\n";
        return kExitInternal;
    } catch (const std::exception &e) {
        err << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}

} // namespace snn::cli
