#pragma once

#include <array>
#include <span>
#include <vector>

#include "mapf/heuristics.hpp"
#include "mapf/pibt.hpp"

namespace mapf {

inline constexpr int kFovChannels = 3;

/// Local observation of one agent: three D x D images (D = 2R + 1) centered on
/// the agent, stored channel-major then row-major, plus the greedy-action vector.
///
///   channel 0  obstacles; 1 for blocked and out-of-map cells
///   channel 1  (h(cell) - h(center)) / 2R clamped to [-1, 1]; +1 off-map or unreachable
///   channel 2  1 where any agent stands
struct FovTensor {
  int radius = 0;
  std::vector<float> channels;
  std::array<float, kNumActions> greedy{};

  int size() const { return 2 * radius + 1; }
  // (dr, dc) offsets are in [-R, R].
  float at(int channel, int dr, int dc) const {
    const int d = size();
    return channels[(channel * d + dr + radius) * d + dc + radius];
  }

  friend bool operator==(const FovTensor&, const FovTensor&) = default;
};

FovTensor extract_fov(const GridMap& map, std::span<const Cell> positions, int agent,
                      const HeuristicTable& table, int radius);
FovTensor extract_fov(const SimState& state, int agent, const HeuristicTable& table, int radius);

// All agents at once, sharing one occupancy lookup.
std::vector<FovTensor> extract_all(const GridMap& map, std::span<const Cell> positions,
                                   const TableSet& tables, int radius);

using NeighborLists = std::vector<std::vector<int>>;

// Per agent: up to `max_neighbors` other agents within Chebyshev distance `radius`,
// nearest first by Euclidean distance, ties by agent index.
NeighborLists build_graph(const GridMap& map, std::span<const Cell> positions, int radius,
                          int max_neighbors);
NeighborLists build_graph(const SimState& state, int radius, int max_neighbors);

}  // namespace mapf
