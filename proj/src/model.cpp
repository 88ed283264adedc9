#include "snn/model.hpp"

#include <algorithm>
#include <cctype>

#include "snn/neuron.hpp"
#include "snn/rng.hpp"

namespace snn {

SpikeTensor assemble_unit_input(const std::vector<ConvUnit> &units, size_t i,
                                const std::vector<SpikeTensor> &unit_spikes) {
    const ConvUnit &u = units[i];
    if (u.input_a < 0) throw ParamError("assemble_unit_input: unit reads the network input");
    const SpikeTensor &a = unit_spikes[static_cast<size_t>(u.input_a)];
    if (u.input_b < 0) return a;
    const SpikeTensor &b = unit_spikes[static_cast<size_t>(u.input_b)];
    if (a.t != b.t || a.h != b.h || a.w != b.w)
        throw InternalError("concat inputs disagree on dims");
    SpikeTensor out(a.t, a.c + b.c, a.h, a.w);
    for (int t = 0; t < out.t; ++t) {
        for (int c = 0; c < a.c; ++c)
            for (int y = 0; y < a.h; ++y)
                for (int x = 0; x < a.w; ++x) out.set(t, c, y, x, a.at(t, c, y, x));
        for (int c = 0; c < b.c; ++c)
            for (int y = 0; y < a.h; ++y)
                for (int x = 0; x < a.w; ++x) out.set(t, a.c + c, y, x, b.at(t, c, y, x));
    }
    return out;
}

namespace {

ForwardResult forward_units(const MultibitTensor *image, const SpikeTensor *spikes,
                            const NetworkSpec &net, const std::vector<EncodedLayer> &weights) {
    auto units = expand_units(net);
    if (units.size() != weights.size())
        throw DataError("network_forward: weights do not match the network");

    ForwardResult res;
    res.unit_spikes.reserve(units.size());
    for (size_t i = 0; i < units.size(); ++i) {
        const ConvUnit &u = units[i];
        LayerIo io;
        SpikeTensor staged;
        if (u.input_a < 0) {
            if (u.is_encode()) {
                if (!image) throw DataError("network_forward: network expects an image input");
                io.image = image;
            } else {
                if (!spikes) throw DataError("network_forward: network expects spike input");
                io.spikes = spikes;
            }
        } else {
            staged = assemble_unit_input(units, i, res.unit_spikes);
            io.spikes = &staged;
        }
        LayerOutput lo = layer_forward(io, u, weights[i]);
        res.report.add_gate(lo.stats);
        res.saturation_events += (lo.psum_saturated ? 1 : 0) + (lo.lif_saturated ? 1 : 0);
        if (u.role == ConvUnit::Role::Output) {
            res.output_potentials = output_accumulate(lo.currents);
            res.out_c = u.out_c;
            res.out_h = u.out_h;
            res.out_w = u.out_w;
        }
        res.unit_spikes.push_back(std::move(lo.spikes));
    }
    return res;
}

} // namespace

ForwardResult network_forward(const MultibitTensor &input, const NetworkSpec &net,
                              const std::vector<EncodedLayer> &weights) {
    if (input.c != net.in_c || input.h != net.in_h || input.w != net.in_w)
        throw DataError("network_forward: input dims do not match the network");
    return forward_units(&input, nullptr, net, weights);
}

ForwardResult network_forward(const SpikeTensor &input, const NetworkSpec &net,
                              const std::vector<EncodedLayer> &weights) {
    if (input.c != net.in_c || input.h != net.in_h || input.w != net.in_w)
        throw DataError("network_forward: input dims do not match the network");
    if (!net.layers.empty() && net.layers[0].kind == LayerKind::Encode)
        throw DataError("network_forward: encode networks take an image input");
    if (!net.layers.empty() && input.t != net.layers[0].in_t)
        throw DataError("network_forward: input time steps do not match the first layer");
    return forward_units(nullptr, &input, net, weights);
}

MioutResult miout(const SpikeTensor &spikes) {
    if (spikes.t < 2) throw ParamError("miout: undefined for fewer than 2 time steps");
    MioutResult res;
    res.per_channel.reserve(static_cast<size_t>(spikes.c));
    for (int c = 0; c < spikes.c; ++c) {
        uint64_t intersection = 0, partial = 0;
        for (int y = 0; y < spikes.h; ++y)
            for (int x = 0; x < spikes.w; ++x) {
                int s = 0;
                for (int t = 0; t < spikes.t; ++t) s += spikes.at(t, c, y, x);
                if (s == spikes.t) ++intersection;
                else if (s > 0) ++partial;
            }
        uint64_t denom = intersection + partial;
        res.per_channel.push_back(denom ? static_cast<double>(intersection) / denom : 0.0);
    }
    double sum = 0.0;
    for (double v : res.per_channel) sum += v;
    res.mean = res.per_channel.empty() ? 0.0 : sum / static_cast<double>(res.per_channel.size());
    return res;
}

uint64_t op_count(const NetworkSpec &net, const std::vector<EncodedLayer> &weights,
                  OpCountMode mode) {
    auto units = expand_units(net);
    if (units.size() != weights.size())
        throw DataError("op_count: weights do not match the network");
    uint64_t total = 0;
    for (size_t i = 0; i < units.size(); ++i) {
        const ConvUnit &u = units[i];
        uint64_t muls = mode == OpCountMode::Dense
                            ? static_cast<uint64_t>(u.k) * u.k * u.in_c * u.out_c
                            : weights[i].total_nnz();
        total += 2 * muls * static_cast<uint64_t>(u.in_h) * u.in_w * u.in_t * u.bit_planes();
    }
    return total;
}

NetworkSpec mixed_timestep_plan(const NetworkSpec &net, const std::string &cut) {
    NetworkSpec out = net;
    if (cut.empty() || cut == "none") return out;

    // Parse "C<k>" optionally followed by "B<j>".
    size_t pos = 0;
    auto read_int = [&](char prefix) -> int {
        if (pos >= cut.size() || cut[pos] != prefix)
            throw ParamError("invalid cut point '" + cut + "'");
        ++pos;
        size_t start = pos;
        while (pos < cut.size() && std::isdigit(static_cast<unsigned char>(cut[pos]))) ++pos;
        if (start == pos) throw ParamError("invalid cut point '" + cut + "'");
        return std::stoi(cut.substr(start, pos - start));
    };
    int convs = read_int('C');
    int blocks = pos < cut.size() ? read_int('B') : 0;
    if (pos != cut.size() || convs < 0 || blocks < 0)
        throw ParamError("invalid cut point '" + cut + "'");

    // Locate the transition layer: with a block count, the j-th basic block;
    // otherwise the layer after the first k.
    size_t transition;
    if (blocks > 0) {
        int seen = 0;
        size_t idx = out.layers.size();
        for (size_t i = 0; i < out.layers.size(); ++i)
            if (out.layers[i].kind == LayerKind::CspBlock && ++seen == blocks) {
                idx = i;
                break;
            }
        if (idx == out.layers.size())
            throw ParamError("cut point '" + cut + "': network has no such basic block");
        // The label must describe this network: k conv layers and j-1 blocks
        // ahead of the transition block.
        int convs_before = 0, blocks_before = 0;
        for (size_t i = 0; i < idx; ++i) {
            if (out.layers[i].kind == LayerKind::CspBlock) ++blocks_before;
            else ++convs_before;
        }
        if (convs_before != convs || blocks_before != blocks - 1)
            throw ParamError("cut point '" + cut + "' does not match the network");
        transition = idx;
    } else {
        if (convs < 1 || static_cast<size_t>(convs) >= out.layers.size())
            throw ParamError("cut point '" + cut + "' out of range");
        transition = static_cast<size_t>(convs);
    }
    if (out.layers[transition].kind == LayerKind::Output ||
        transition + 1 >= out.layers.size())
        throw ParamError("cut point '" + cut + "': transition needs a following layer");

    for (size_t i = 0; i < out.layers.size(); ++i) {
        if (i < transition) {
            out.layers[i].in_t = 1;
            out.layers[i].out_t = 1;
        } else if (i == transition) {
            out.layers[i].in_t = 1;
            out.layers[i].out_t = 3;
        } else {
            out.layers[i].in_t = 3;
            out.layers[i].out_t = 3;
        }
    }
    out.validate();
    return out;
}

std::vector<LayerWeights> synth_float_weights(const NetworkSpec &net, uint64_t seed) {
    auto units = expand_units(net);
    std::vector<LayerWeights> layers;
    layers.reserve(units.size());
    for (size_t i = 0; i < units.size(); ++i) {
        const ConvUnit &u = units[i];
        Rng rng(Rng::substream(seed, 0x57 + i));
        LayerWeights lw(u.out_c, u.in_c, u.k);
        for (auto &v : lw.values)
            v = static_cast<float>(rng.uniform_int(-64, 64));
        layers.push_back(std::move(lw));
    }
    return layers;
}

std::vector<EncodedLayer> synth_weights(const NetworkSpec &net, uint64_t seed,
                                        double prune_rate, PruneScope scope) {
    auto units = expand_units(net);
    auto floats = synth_float_weights(net, seed);
    prune_network(floats, prune_rate, scope);
    std::vector<EncodedLayer> encoded;
    encoded.reserve(floats.size());
    for (size_t i = 0; i < floats.size(); ++i) {
        QuantLayer q = quantize8(floats[i]);
        EncodedLayer e = encode_layer(q);
        // Calibrate the scale so typical currents straddle the 0.5 firing
        // threshold instead of saturating the 16-bit membrane.
        const ConvUnit &u = units[i];
        double input_mag = u.is_encode() ? 255.0 : 1.0;
        e.scale = static_cast<float>(0.5 / (static_cast<double>(u.k) * u.k * u.in_c * input_mag));
        encoded.push_back(std::move(e));
    }
    return encoded;
}

MultibitTensor synth_input(const NetworkSpec &net, uint64_t seed) {
    Rng rng(Rng::substream(seed, 0x1A));
    MultibitTensor img(net.in_c, net.in_h, net.in_w);
    for (auto &v : img.data) v = static_cast<uint8_t>(rng.uniform(256));
    return img;
}

} // namespace snn
