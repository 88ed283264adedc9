// tensor_io.hpp — SNNT binary tensor files.
//
// Layout (little endian):
//   magic   "SNNT"                      4 bytes
//   rank    3 = (C,H,W) image, 4 = (T,C,H,W) spikes   1 byte
//   dims    4 x u32, order (T, C, H, W); rank-3 files carry T = 1
//   kind    0 = bit-packed spikes, 1 = u8 pixels      1 byte
//   payload spikes: bit-packed row-major, LSB-first within a byte,
//           each row padded to a whole byte; u8: raw bytes row-major.
#pragma once

#include <string>

#include "snn/tensor.hpp"

namespace snn {

void write_spike_tensor(const std::string &path, const SpikeTensor &t);
void write_multibit_tensor(const std::string &path, const MultibitTensor &t);

SpikeTensor read_spike_tensor(const std::string &path);
MultibitTensor read_multibit_tensor(const std::string &path);

// Serialized bytes (used by the file writers and by round-trip tests).
std::vector<uint8_t> encode_spike_tensor(const SpikeTensor &t);
std::vector<uint8_t> encode_multibit_tensor(const MultibitTensor &t);
SpikeTensor decode_spike_tensor(const std::vector<uint8_t> &bytes);
MultibitTensor decode_multibit_tensor(const std::vector<uint8_t> &bytes);

// Writes `bytes` to `path` atomically (temp file + rename).
void write_file_atomic(const std::string &path, const std::vector<uint8_t> &bytes);
void write_file_atomic(const std::string &path, const std::string &text);

} // namespace snn
