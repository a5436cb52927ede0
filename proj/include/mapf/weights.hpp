#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mapf/rng.hpp"

namespace mapf {

struct Tensor {
  std::vector<std::uint32_t> shape;
  std::vector<float> data;

  std::size_t numel() const;
};

/// Architecture metadata stored in the weights header.
struct ModelShape {
  static constexpr int kRounds = 3;
  static constexpr int kKernel = 3;

  std::uint32_t radius = 4;
  std::uint32_t conv_channels = 32;
  std::uint32_t embed_dim = 128;

  int fov_size() const { return 2 * static_cast<int>(radius) + 1; }
  int conv_size() const { return fov_size() - kKernel + 1; }
  // Flattened conv output plus the 5-entry greedy vector.
  int feature_dim() const;

  friend bool operator==(const ModelShape&, const ModelShape&) = default;
};

/// Named float32 tensors for the FoV-CNN + message-passing policy.
///
/// Linear layers store weight [out, in] and compute W x + b. Required names:
///   conv.weight [C,3,3,3]  conv.bias [C]
///   node.weight [E,F]      node.bias [E]
///   message.weight [E,F]   message.bias [E]
///   sage.{k}.self.weight [E,E]  sage.{k}.self.bias [E]  sage.{k}.neigh.weight [E,E]
///   norm.{k}.weight [E]    norm.{k}.bias [E]            for k = 0, 1, 2
///   head.0.weight [E,E]    head.0.bias [E]
///   head.1.weight [5,E]    head.1.bias [5]
/// where C = conv_channels, E = embed_dim, F = C * (D-2)^2 + 5.
struct Weights {
  ModelShape shape;
  std::map<std::string, Tensor> tensors;

  const Tensor& at(const std::string& name) const;
};

std::vector<std::pair<std::string, std::vector<std::uint32_t>>> required_tensors(const ModelShape& shape);

// Throws WeightsError for missing tensors or shape mismatches.
void check_weights(const Weights& w);

// Little-endian `MAPFWT1\0` format.
Weights parse_weights(const std::string& bytes);
std::string encode_weights(const Weights& w);
Weights load_weights(const std::filesystem::path& path);
void save_weights(const std::filesystem::path& path, const Weights& w);

Weights zero_weights(const ModelShape& shape);
// Uniform in [-scale/sqrt(fan_in), scale/sqrt(fan_in)]; layer-norm gains start at 1.
Weights random_weights(const ModelShape& shape, Rng& rng, float scale = 1.0f);

}  // namespace mapf
