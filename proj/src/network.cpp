#include "snn/network.hpp"

#include <fstream>
#include <sstream>

namespace snn {

const char *layer_kind_name(LayerKind k) {
    switch (k) {
    case LayerKind::Encode: return "encode";
    case LayerKind::Conv: return "conv";
    case LayerKind::CspBlock: return "csp_block";
    case LayerKind::Output: return "output";
    }
    return "?";
}

void NetworkSpec::validate() const {
    if (in_c <= 0 || in_h <= 0 || in_w <= 0)
        throw DataError("network: input dims must be positive");
    if (in_w > 1024 || in_h > 576)
        throw DataError("network: input size exceeds the 1024x576 limit");
    if (layers.empty()) throw DataError("network: no layers");
    int c = in_c;
    for (size_t i = 0; i < layers.size(); ++i) {
        const LayerSpec &l = layers[i];
        if (l.out_c <= 0 || l.out_c > 512 || c > 512)
            throw DataError("network: channel count outside [1, 512]");
        if (l.k != 1 && l.k != 3) throw DataError("network: kernel size must be 1 or 3");
        if (l.in_t < 1 || l.out_t < 1 || l.out_t > 4 || l.in_t > 4)
            throw DataError("network: time steps outside [1, 4]");
        if (l.in_t > l.out_t) throw DataError("network: in_T must be <= out_T");
        if (l.in_t != l.out_t && l.in_t != 1)
            throw DataError("network: time-step change requires in_T == 1");
        if (l.kind == LayerKind::Encode && i != 0)
            throw DataError("network: encode layer must come first");
        if (l.kind == LayerKind::Encode && l.in_t != 1)
            throw DataError("network: encode layer fires once (in_T must be 1)");
        if (l.kind == LayerKind::CspBlock && l.out_c % 2 != 0)
            throw DataError("network: csp_block width must be even");
        if (l.kind == LayerKind::Output && i + 1 != layers.size())
            throw DataError("network: output layer must come last");
        if (i > 0 && l.in_t != layers[i - 1].out_t)
            throw DataError("network: time steps do not chain");
        c = l.out_c;
    }
}

std::vector<ConvUnit> expand_units(const NetworkSpec &net) {
    net.validate();
    std::vector<ConvUnit> units;
    int c = net.in_c, h = net.in_h, w = net.in_w;
    int prev = -1; // unit feeding the next layer

    auto push = [&](ConvUnit u) {
        u.out_h = u.maxpool ? (u.in_h + 1) / 2 : u.in_h;
        u.out_w = u.maxpool ? (u.in_w + 1) / 2 : u.in_w;
        units.push_back(u);
        return static_cast<int>(units.size()) - 1;
    };

    for (size_t li = 0; li < net.layers.size(); ++li) {
        const LayerSpec &l = net.layers[li];
        switch (l.kind) {
        case LayerKind::Encode:
        case LayerKind::Conv:
        case LayerKind::Output: {
            ConvUnit u;
            u.role = l.kind == LayerKind::Encode ? ConvUnit::Role::Encode
                     : l.kind == LayerKind::Output ? ConvUnit::Role::Output
                                                   : ConvUnit::Role::Conv;
            u.layer = static_cast<int>(li);
            u.in_c = c;
            u.out_c = l.out_c;
            u.k = l.k;
            u.in_t = l.in_t;
            u.out_t = l.out_t;
            u.maxpool = l.maxpool;
            u.in_h = h;
            u.in_w = w;
            u.input_a = prev;
            prev = push(u);
            break;
        }
        case LayerKind::CspBlock: {
            // Internal units run at the block's in_t; when the block is the
            // one-to-three transition, only the aggregate 1x1 repeats the
            // convolution result across output time steps.
            int width = l.out_c;
            int half = width / 2;
            int block_in = prev;

            ConvUnit s1;
            s1.role = ConvUnit::Role::Conv;
            s1.layer = static_cast<int>(li);
            s1.in_c = c;
            s1.out_c = width;
            s1.k = 3;
            s1.in_t = l.in_t;
            s1.out_t = l.in_t;
            s1.in_h = h;
            s1.in_w = w;
            s1.input_a = block_in;
            int i1 = push(s1);

            ConvUnit s2 = s1;
            s2.in_c = width;
            s2.input_a = i1;
            int i2 = push(s2);

            ConvUnit sc;
            sc.role = ConvUnit::Role::Shortcut;
            sc.layer = static_cast<int>(li);
            sc.in_c = c;
            sc.out_c = half;
            sc.k = 1;
            sc.in_t = l.in_t;
            sc.out_t = l.in_t;
            sc.in_h = h;
            sc.in_w = w;
            sc.input_a = block_in;
            int i3 = push(sc);

            ConvUnit ag;
            ag.role = ConvUnit::Role::Aggregate;
            ag.layer = static_cast<int>(li);
            ag.in_c = width + half; // concat of stacked and shortcut paths
            ag.out_c = width;
            ag.k = 1;
            ag.in_t = l.in_t;
            ag.out_t = l.out_t;
            ag.maxpool = l.maxpool;
            ag.in_h = h;
            ag.in_w = w;
            ag.input_a = i2;
            ag.input_b = i3;
            prev = push(ag);
            break;
        }
        }
        c = l.out_c;
        h = units.back().out_h;
        w = units.back().out_w;
    }
    return units;
}

NetworkSpec parse_network(const std::string &text) {
    NetworkSpec net;
    std::istringstream in(text);
    std::string line;
    bool saw_version = false, saw_input = false;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) continue; // blank line
        auto fail = [&](const std::string &msg) {
            throw DataError("network spec line " + std::to_string(lineno) + ": " + msg);
        };
        if (!saw_version) {
            int version = 0;
            if (tok != "snnnet" || !(ls >> version) || version != 1)
                fail("expected header 'snnnet 1'");
            saw_version = true;
            continue;
        }
        if (!saw_input) {
            if (tok != "input" || !(ls >> net.in_c >> net.in_h >> net.in_w))
                fail("expected 'input C H W'");
            saw_input = true;
            continue;
        }
        LayerSpec l;
        if (tok == "encode") l.kind = LayerKind::Encode;
        else if (tok == "conv") l.kind = LayerKind::Conv;
        else if (tok == "csp_block") l.kind = LayerKind::CspBlock;
        else if (tok == "output") l.kind = LayerKind::Output;
        else fail("unknown layer kind '" + tok + "'");
        int pool = 0;
        if (!(ls >> l.out_c >> l.k >> l.in_t >> l.out_t >> pool))
            fail("expected '<kind> out_C k in_T out_T pool_flag'");
        if (pool != 0 && pool != 1) fail("pool_flag must be 0 or 1");
        l.maxpool = pool == 1;
        std::string extra;
        if (ls >> extra) fail("trailing tokens");
        net.layers.push_back(l);
    }
    if (!saw_version || !saw_input) throw DataError("network spec: missing header");
    // Fill chained input channels, then validate.
    int c = net.in_c;
    for (auto &l : net.layers) {
        l.in_c = c;
        c = l.out_c;
    }
    net.validate();
    return net;
}

NetworkSpec read_network(const std::string &path) {
    std::ifstream f(path);
    if (!f) throw DataError("cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_network(ss.str());
}

std::string network_to_text(const NetworkSpec &net) {
    std::string out = "snnnet 1\n";
    out += "input " + std::to_string(net.in_c) + " " + std::to_string(net.in_h) + " " +
           std::to_string(net.in_w) + "\n";
    for (const auto &l : net.layers) {
        out += std::string(layer_kind_name(l.kind)) + " " + std::to_string(l.out_c) + " " +
               std::to_string(l.k) + " " + std::to_string(l.in_t) + " " +
               std::to_string(l.out_t) + " " + (l.maxpool ? "1" : "0") + "\n";
    }
    return out;
}

} // namespace snn
