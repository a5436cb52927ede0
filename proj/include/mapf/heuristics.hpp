#pragma once

#include <array>
#include <cstdint>
#include <future>
#include <memory>
#include <mutex>
#include <unordered_map>
#include <vector>

#include "mapf/grid.hpp"

namespace mapf {

struct Scenario;

// Sentinel for blocked or disconnected cells.
inline constexpr int kUnreachable = -1;

/// Exact cost-to-goal distances over free 4-connected cells.
class HeuristicTable {
 public:
  HeuristicTable(Cell goal, int width, std::vector<int> dist)
      : goal_(goal), width_(width), dist_(std::move(dist)) {}

  Cell goal() const { return goal_; }
  // kUnreachable for blocked/disconnected cells. `c` must be in bounds.
  int at(Cell c) const { return dist_[c.row * width_ + c.col]; }
  int at_index(int idx) const { return dist_[idx]; }
  bool reachable(Cell c) const { return at(c) != kUnreachable; }
  const std::vector<int>& distances() const { return dist_; }

 private:
  Cell goal_;
  int width_;
  std::vector<int> dist_;
};

// Breadth-first search from `goal`. Throws std::invalid_argument for a blocked goal.
HeuristicTable backward_dijkstra(const GridMap& map, Cell goal);

using GreedyVector = std::array<std::uint8_t, 5>;

// 1 for each legal action (wait included) whose target minimizes the table distance.
// Throws std::invalid_argument when `pos` is unreachable.
GreedyVector greedy_action_vector(const HeuristicTable& table, Cell pos, const GridMap& map);

/// Per-map cache of tables keyed by goal cell. Concurrent lookups are safe; a table
/// is built once and other requesters for the same goal wait for it.
class HeuristicCache {
 public:
  explicit HeuristicCache(std::shared_ptr<const GridMap> map) : map_(std::move(map)) {}

  std::shared_ptr<const HeuristicTable> get(Cell goal);
  const GridMap& map() const { return *map_; }
  std::size_t size() const;

 private:
  std::shared_ptr<const GridMap> map_;
  mutable std::mutex mu_;
  std::unordered_map<int, std::shared_future<std::shared_ptr<const HeuristicTable>>> tables_;
};

using TableSet = std::vector<std::shared_ptr<const HeuristicTable>>;

// One table per agent goal, in agent order.
TableSet tables_for(const Scenario& scen, HeuristicCache& cache);
TableSet tables_for(const Scenario& scen);

}  // namespace mapf
