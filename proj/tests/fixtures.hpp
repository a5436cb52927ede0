#pragma once

#include <algorithm>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "mapf/generate.hpp"
#include "mapf/grid.hpp"
#include "mapf/heuristics.hpp"
#include "mapf/pibt.hpp"
#include "mapf/rng.hpp"
#include "mapf/scenario.hpp"
#include "mapf/solution.hpp"

namespace fixtures {

using namespace mapf;

inline std::shared_ptr<const GridMap> grid(const std::vector<std::string>& rows,
                                           std::string name = "fixture") {
  const int h = static_cast<int>(rows.size());
  const int w = static_cast<int>(rows.front().size());
  std::vector<std::uint8_t> blocked;
  for (const auto& r : rows) {
    for (char ch : r) blocked.push_back(ch == '@' ? 1 : 0);
  }
  return std::make_shared<const GridMap>(std::move(name), w, h, std::move(blocked));
}

inline std::shared_ptr<const GridMap> empty_grid(int h, int w) {
  return grid(std::vector<std::string>(h, std::string(w, '.')));
}

inline Scenario scenario(std::shared_ptr<const GridMap> map, std::vector<AgentTask> tasks,
                         std::uint64_t seed = 1) {
  Scenario s;
  s.map = std::move(map);
  s.agents = std::move(tasks);
  s.seed = seed;
  return s;
}

// Distances by repeated relaxation until nothing changes; shares no code with BFS.
inline std::vector<int> relaxation_distances(const GridMap& map, Cell goal) {
  const int big = 1 << 29;
  std::vector<int> d(map.size(), big);
  d[map.index(goal)] = 0;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int v = 0; v < map.size(); ++v) {
      const Cell c = map.cell(v);
      if (!map.is_free(c)) continue;
      const Cell nb[4] = {{c.row - 1, c.col}, {c.row + 1, c.col}, {c.row, c.col - 1}, {c.row, c.col + 1}};
      for (Cell u : nb) {
        if (!map.is_free(u)) continue;
        const int cand = d[map.index(u)] + 1;
        if (cand < d[v]) {
          d[v] = cand;
          changed = true;
        }
      }
    }
  }
  for (auto& x : d) {
    if (x == big) x = kUnreachable;
  }
  return d;
}

// Random map with a random agent set drawn from its largest component.
inline Scenario random_instance(Rng& rng, int max_side, int min_agents, int max_agents) {
  for (;;) {
    const int h = 2 + static_cast<int>(uniform_below(rng, max_side - 1));
    const int w = 2 + static_cast<int>(uniform_below(rng, max_side - 1));
    const double density = 0.3 * uniform01(rng);
    auto map = std::make_shared<const GridMap>(random_map("fuzz", h, w, density, rng()));
    const auto labels = component_labels(*map);
    std::vector<int> sizes(map->size() + 1, 0);
    for (int l : labels) {
      if (l >= 0) ++sizes[l];
    }
    const int largest = *std::max_element(sizes.begin(), sizes.end());
    if (largest < min_agents) continue;
    const int hi = std::min(max_agents, largest);
    const int n = min_agents + static_cast<int>(uniform_below(rng, hi - min_agents + 1));
    return scenario(map, random_tasks(*map, n, rng()), rng());
  }
}

// Independent joint-step check: legal moves, no shared cell, no swap.
inline bool step_is_safe(const std::vector<Cell>& from, const std::vector<Action>& actions,
                         const GridMap& map) {
  const std::size_t n = from.size();
  std::map<Cell, std::size_t> before;
  std::map<Cell, std::size_t> after;
  for (std::size_t i = 0; i < n; ++i) before[from[i]] = i;
  for (std::size_t i = 0; i < n; ++i) {
    const Cell to = apply(from[i], actions[i]);
    if (!map.is_free(to)) return false;
    if (!after.emplace(to, i).second) return false;
    const auto other = before.find(to);
    if (other != before.end() && other->second != i && apply(to, actions[other->second]) == from[i]) {
      return false;
    }
  }
  return true;
}

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    path = std::filesystem::temp_directory_path() /
           ("mapf-test-" + tag + "-" + std::to_string(hash_text(tag + std::to_string(reinterpret_cast<std::uintptr_t>(this)))));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::filesystem::path operator/(const std::string& name) const { return path / name; }
};

}  // namespace fixtures
