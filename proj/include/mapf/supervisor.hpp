#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <unordered_set>
#include <vector>

#include "mapf/heuristics.hpp"
#include "mapf/scenario.hpp"
#include "mapf/solution.hpp"

namespace mapf {

/// Space-time reservations of already-planned agents. An agent that reaches
/// its goal parks there and blocks the cell from its arrival time onward.
class ReservationTable {
 public:
  static constexpr int kNever = std::numeric_limits<int>::max();

  explicit ReservationTable(const GridMap& map);

  // `path` is a full plan ending (and staying) at the agent's goal.
  void reserve_path(const std::vector<Cell>& path);
  void reserve_vertex(Cell c, int t);
  void reserve_edge(Cell from, Cell to, int t);
  void park(Cell c, int from_t);

  // Occupied at time t, either by a reservation or a parked agent.
  bool vertex_blocked(Cell c, int t) const;
  // Entering `to` from `from` during [t, t+1) would swap with a reserved move.
  bool edge_blocked(Cell from, Cell to, int t) const;
  int parked_since(Cell c) const { return parked_[map_->index(c)]; }
  // First time after which the cell is never vertex-reserved (ignores parking).
  int free_after(Cell c) const { return last_reserved_[map_->index(c)] + 1; }

 private:
  std::uint64_t vertex_key(int cell, int t) const;
  std::uint64_t edge_key(int from, int to, int t) const;

  const GridMap* map_;
  std::unordered_set<std::uint64_t> vertices_;
  std::unordered_set<std::uint64_t> edges_;
  std::vector<int> parked_;
  std::vector<int> last_reserved_;
};

// Earliest-arrival path over (cell, t) avoiding all reservations, after which the
// agent can stay at `goal` forever. nullopt if none exists within `horizon` steps.
std::optional<std::vector<Cell>> space_time_astar(const GridMap& map, Cell start, Cell goal,
                                                  const ReservationTable& table, int horizon,
                                                  const HeuristicTable& heuristic);

struct PlanOptions {
  int restarts = 10;           // random orders tried after the first
  double timeout_s = 120.0;
  int horizon = 0;             // 0: max(4 * max_i h_i(start_i), 128)
};

struct PlanResult {
  std::optional<Solution> solution;
  int attempts = 0;
  double wall_ms = 0.0;
};

int default_horizon(const Scenario& scen, const TableSet& tables);

// Plans agents one at a time in `order`; nullopt if any agent fails.
std::optional<Solution> plan_in_order(const Scenario& scen, const std::vector<int>& order,
                                      int horizon, const TableSet& tables);

// First order: descending distance-to-goal (ties by index). Further attempts shuffle
// the order with an rng seeded from `seed`.
PlanResult prioritized_plan(const Scenario& scen, const PlanOptions& options, std::uint64_t seed,
                            const TableSet& tables);
PlanResult prioritized_plan(const Scenario& scen, const PlanOptions& options = {},
                            std::uint64_t seed = 0);

}  // namespace mapf
