// network.hpp — layer descriptions and the network spec file.
//
// A NetworkSpec lists top-level layers (encode / conv / csp_block / output).
// CSP basic blocks expand into four conv units wired as:
//
//     input ──> stacked 3x3 ──> stacked 3x3 ──┐
//        └────> shortcut 1x1 (half width) ────┴─ concat ──> aggregate 1x1
//
// so the whole network flattens into a list of ConvUnits the engine and the
// cost model both iterate — one source of truth for the loop nest.
#pragma once

#include <string>
#include <vector>

#include "snn/errors.hpp"

namespace snn {

enum class LayerKind : uint8_t { Encode, Conv, CspBlock, Output };

// One top-level layer. For csp_block, out_c is the stacked-path width; the
// shortcut path gets half of it.
struct LayerSpec {
    LayerKind kind = LayerKind::Conv;
    int in_c = 0; // derived by chaining
    int out_c = 0;
    int k = 3;
    int in_t = 1;
    int out_t = 1;
    bool maxpool = false;
};

struct NetworkSpec {
    int in_c = 0, in_h = 0, in_w = 0; // input image dims (channels, rows, cols)
    std::vector<LayerSpec> layers;

    // Chains channels, checks time steps and the configuration limits
    // (channels <= 512, k in {1,3}, time steps <= 4, input <= 1024x576).
    void validate() const;
};

// One convolution unit of the flattened network.
struct ConvUnit {
    enum class Role : uint8_t { Encode, Conv, Shortcut, Aggregate, Output };

    Role role = Role::Conv;
    int layer = 0; // index of the source LayerSpec
    int in_c = 0, out_c = 0, k = 3;
    int in_t = 1, out_t = 1;
    bool maxpool = false;
    int in_h = 0, in_w = 0;   // input map dims of this unit
    int out_h = 0, out_w = 0; // output map dims (post pooling)
    // Data routing: indices into the unit list, -1 = network input.
    int input_a = -1;
    int input_b = -1; // second concat input (aggregate units), -1 if none

    bool is_encode() const { return role == Role::Encode; }
    int bit_planes() const { return is_encode() ? 8 : 1; }
};

// Flattens a validated network into conv units with resolved dims and wiring.
std::vector<ConvUnit> expand_units(const NetworkSpec &net);

// Structured text format:
//   snnnet 1
//   input <C> <H> <W>
//   <kind> <out_C> <k> <in_T> <out_T> <pool_flag>     (one per layer)
// '#' starts a comment; kind is encode|conv|csp_block|output.
NetworkSpec parse_network(const std::string &text);
NetworkSpec read_network(const std::string &path);
std::string network_to_text(const NetworkSpec &net);

const char *layer_kind_name(LayerKind k);

} // namespace snn
