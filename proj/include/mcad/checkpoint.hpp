#pragma once

#include <string>

#include "mcad/network.hpp"

namespace mcad::net {

/// Binary model container. Layout (little-endian throughout):
///   8-byte magic "MCADCKPT", 1 version byte (1),
///   u32 input_h, u32 input_w, u32 layer count,
///   per layer: u8 kind, 4 x i32 kind-specific dims,
///   u64 seed,
///   parameter tensors in layer order as raw f64 (conv kernel+bias per
///   convolution layer, then fc weights+bias).
/// save followed by load is bit-exact.
void save_model(const Model& m, const std::string& path);
Model load_model(const std::string& path);

}  // namespace mcad::net
