#pragma once

#include "mapf/pibt.hpp"
#include "mapf/policy.hpp"
#include "mapf/shields.hpp"

namespace mapf {

struct EpisodeResult {
  bool success = false;
  Solution solution;  // executed prefix, also on failure
  long sum_of_costs = 0;
  double per_agent_cost = 0.0;
  int steps = 0;
  double wall_ms = 0.0;
  double ms_per_step = 0.0;
};

// Closed loop: policy -> shield -> advance, until all agents rest at their goals or
// a limit is hit. The naive shield receives each agent's argmax action.
EpisodeResult run_episode(const Scenario& scen, Policy& policy, ShieldKind shield,
                          const RunLimits& limits, Rng& rng, const TableSet& tables);
EpisodeResult run_episode(const Scenario& scen, Policy& policy, ShieldKind shield,
                          const RunLimits& limits, Rng& rng);

}  // namespace mapf
