// weights_io.hpp — SNNW weight files.
//
// Layout (little endian):
//   magic   "SNNW"           4 bytes
//   version u8 (currently 1)
//   layers  u32
//   per layer:
//     id (u32), out_C (u32), in_C (u32), k (u8), format (u8), scale (f32 bits)
//     kernels in (out, in) row-major order:
//       format 0 (dense):   k^2 signed bytes
//       format 1 (bitmask): ceil(k^2 / 8) mask bytes (bit i = row-major
//                           weight position i, LSB first), then nnz values
#pragma once

#include <string>
#include <vector>

#include "snn/weights.hpp"

namespace snn {

void write_weights(const std::string &path, const std::vector<EncodedLayer> &layers,
                   WeightFormat fmt = WeightFormat::Bitmask);
std::vector<EncodedLayer> read_weights(const std::string &path);

std::vector<uint8_t> encode_weights(const std::vector<EncodedLayer> &layers, WeightFormat fmt);
std::vector<EncodedLayer> decode_weights(const std::vector<uint8_t> &bytes);

} // namespace snn
