#pragma once

#include <string>

#include "orient8/network.hpp"

namespace orient8::nn {

// Checkpoint file layout (all integers little-endian):
//   magic "OR8W", format version u32,
//   config block: input_size, in_channels, conv1, conv2, conv3, kernel,
//                 hidden_units, classes, seed (9 x u32),
//   one record per tensor: name length u16, UTF-8 name, rank u8,
//                          dims u32 each, raw float32 data.
// Round trips are bit-exact. A malformed or truncated file throws
// FormatError and never yields a partial network.
void save_checkpoint(const Network& net, const std::string& path);
Network load_checkpoint(const std::string& path);

}  // namespace orient8::nn
