#pragma once

#include <array>
#include <span>
#include <vector>

#include "mapf/heuristics.hpp"
#include "mapf/scenario.hpp"
#include "mapf/solution.hpp"

namespace mapf {

// Most-preferred action first; always a permutation of the five actions.
using ActionOrdering = std::array<Action, kNumActions>;

/// Positions and PIBT priorities of a running episode.
///
/// priority = timesteps since the agent last rested at its goal + a fixed
/// tie-breaking fraction in [0, 1) drawn from the scenario seed.
struct SimState {
  const Scenario* scenario = nullptr;
  std::vector<Cell> positions;
  std::vector<double> priorities;
  std::vector<double> tie_breakers;
  int timestep = 0;

  const GridMap& map() const { return *scenario->map; }
  int num_agents() const { return static_cast<int>(positions.size()); }
};

// `scen` must outlive the state.
SimState initial_state(const Scenario& scen);

// Applies a joint action and updates priorities.
void advance_state(SimState& state, std::span<const Action> actions);

bool all_at_goals(const SimState& state);

// Actions sorted by the distance of their target cell (ascending); illegal moves last;
// ties by action index.
ActionOrdering greedy_ordering(const HeuristicTable& table, Cell pos, const GridMap& map);

/// Reusable PIBT planner for one map. Holds per-cell scratch buffers so a step
/// costs O(agents) rather than O(cells). Not thread-safe; use one per thread.
class Pibt {
 public:
  explicit Pibt(const GridMap& map);

  // Joint action free of vertex and edge collisions. Agents are processed in
  // descending priority (ties by lower index).
  std::vector<Action> step(std::span<const Cell> positions, std::span<const double> priorities,
                           std::span<const ActionOrdering> orderings);

 private:
  bool plan(int agent, int parent);

  const GridMap& map_;
  std::vector<int> occupied_now_;
  std::vector<int> occupied_next_;
  std::vector<int> current_;
  std::vector<int> next_;
  std::span<const ActionOrdering> orderings_;
};

std::vector<Action> pibt_step(const SimState& state, std::span<const ActionOrdering> orderings);

struct RunLimits {
  // Step limit = max(step_multiplier * max_i h_i(start_i), min_steps) unless max_steps > 0.
  int step_multiplier = 3;
  int min_steps = 64;
  int max_steps = 0;
  double time_limit_s = 120.0;
};

int step_limit(const RunLimits& limits, const Scenario& scen, const TableSet& tables);

struct RunResult {
  Solution solution;
  bool success = false;
  int steps = 0;
  double wall_ms = 0.0;
};

// Greedy PIBT until every agent rests at its goal or a limit is hit.
RunResult run_pibt(const Scenario& scen, const RunLimits& limits, const TableSet& tables);
RunResult run_pibt(const Scenario& scen, const RunLimits& limits = {});

}  // namespace mapf
