#include "mapf/features.hpp"

#include <algorithm>
#include <cstdint>

namespace mapf {

namespace {

// Agent index per cell, -1 when empty.
std::vector<int> occupancy_index(const GridMap& map, std::span<const Cell> positions) {
  std::vector<int> occ(map.size(), -1);
  for (std::size_t i = 0; i < positions.size(); ++i) occ[map.index(positions[i])] = static_cast<int>(i);
  return occ;
}

FovTensor fov_from_occupancy(const GridMap& map, const std::vector<int>& occ, Cell center,
                             const HeuristicTable& table, int radius) {
  const int d = 2 * radius + 1;
  FovTensor fov;
  fov.radius = radius;
  fov.channels.assign(static_cast<std::size_t>(kFovChannels) * d * d, 0.0f);
  float* obstacle = fov.channels.data();
  float* heuristic = obstacle + d * d;
  float* occupancy = heuristic + d * d;
  const int h_center = table.at(center);
  const float scale = 2.0f * static_cast<float>(radius);

  for (int dr = -radius; dr <= radius; ++dr) {
    for (int dc = -radius; dc <= radius; ++dc) {
      const int k = (dr + radius) * d + dc + radius;
      const Cell c{center.row + dr, center.col + dc};
      if (!map.in_bounds(c)) {
        obstacle[k] = 1.0f;
        heuristic[k] = 1.0f;
        continue;
      }
      obstacle[k] = map.is_blocked(c) ? 1.0f : 0.0f;
      const int h = table.at(c);
      if (h == kUnreachable) {
        heuristic[k] = 1.0f;
      } else {
        const float v = static_cast<float>(h - h_center) / scale;
        heuristic[k] = std::clamp(v, -1.0f, 1.0f);
      }
      occupancy[k] = occ[map.index(c)] >= 0 ? 1.0f : 0.0f;
    }
  }
  const GreedyVector g = greedy_action_vector(table, center, map);
  for (int a = 0; a < kNumActions; ++a) fov.greedy[a] = static_cast<float>(g[a]);
  return fov;
}

}  // namespace

FovTensor extract_fov(const GridMap& map, std::span<const Cell> positions, int agent,
                      const HeuristicTable& table, int radius) {
  return fov_from_occupancy(map, occupancy_index(map, positions), positions[agent], table, radius);
}

FovTensor extract_fov(const SimState& state, int agent, const HeuristicTable& table, int radius) {
  return extract_fov(state.map(), state.positions, agent, table, radius);
}

std::vector<FovTensor> extract_all(const GridMap& map, std::span<const Cell> positions,
                                   const TableSet& tables, int radius) {
  const auto occ = occupancy_index(map, positions);
  std::vector<FovTensor> out;
  out.reserve(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i) {
    out.push_back(fov_from_occupancy(map, occ, positions[i], *tables[i], radius));
  }
  return out;
}

NeighborLists build_graph(const GridMap& map, std::span<const Cell> positions, int radius,
                          int max_neighbors) {
  const auto occ = occupancy_index(map, positions);
  NeighborLists lists(positions.size());
  std::vector<std::pair<int, int>> found;  // (squared distance, agent)
  for (std::size_t i = 0; i < positions.size(); ++i) {
    found.clear();
    const Cell p = positions[i];
    for (int r = std::max(0, p.row - radius); r <= std::min(map.height() - 1, p.row + radius); ++r) {
      for (int c = std::max(0, p.col - radius); c <= std::min(map.width() - 1, p.col + radius); ++c) {
        const int j = occ[map.index({r, c})];
        if (j < 0 || j == static_cast<int>(i)) continue;
        const int dr = r - p.row;
        const int dc = c - p.col;
        found.emplace_back(dr * dr + dc * dc, j);
      }
    }
    const auto keep = std::min<std::size_t>(found.size(), static_cast<std::size_t>(max_neighbors));
    std::partial_sort(found.begin(), found.begin() + keep, found.end());
    lists[i].reserve(keep);
    for (std::size_t k = 0; k < keep; ++k) lists[i].push_back(found[k].second);
  }
  return lists;
}

NeighborLists build_graph(const SimState& state, int radius, int max_neighbors) {
  return build_graph(state.map(), state.positions, radius, max_neighbors);
}

}  // namespace mapf
