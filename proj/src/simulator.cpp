#include "mapf/simulator.hpp"

#include <chrono>
#include <optional>

namespace mapf {

EpisodeResult run_episode(const Scenario& scen, Policy& policy, ShieldKind shield,
                          const RunLimits& limits, Rng& rng, const TableSet& tables) {
  using Clock = std::chrono::steady_clock;
  const auto began = Clock::now();
  const int max_steps = step_limit(limits, scen, tables);
  const int n = scen.num_agents();

  SimState state = initial_state(scen);
  EpisodeResult result;
  result.solution.paths.resize(n);
  for (int i = 0; i < n; ++i) result.solution.paths[i].push_back(state.positions[i]);

  std::optional<CsPibt> pibt_shield;
  if (shield != ShieldKind::Naive) {
    pibt_shield.emplace(*scen.map, shield == ShieldKind::PibtSort ? OrderingMode::Sort
                                                                   : OrderingMode::Sample);
  }
  std::vector<Action> proposals(n);
  while (true) {
    if (all_at_goals(state)) {
      result.success = true;
      break;
    }
    if (state.timestep >= max_steps) break;
    if (std::chrono::duration<double>(Clock::now() - began).count() > limits.time_limit_s) break;

    const auto dists = policy.act(state, tables, rng);
    std::vector<Action> actions;
    if (pibt_shield) {
      actions = (*pibt_shield)(dists, state, rng);
    } else {
      for (int i = 0; i < n; ++i) proposals[i] = argmax_action(dists[i]);
      actions = cs_naive(proposals, state);
    }
    advance_state(state, actions);
    for (int i = 0; i < n; ++i) result.solution.paths[i].push_back(state.positions[i]);
  }

  result.steps = state.timestep;
  result.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - began).count();
  result.ms_per_step = result.steps > 0 ? result.wall_ms / result.steps : 0.0;
  result.sum_of_costs = sum_of_costs(result.solution, scen);
  result.per_agent_cost = n > 0 ? static_cast<double>(result.sum_of_costs) / n : 0.0;
  return result;
}

EpisodeResult run_episode(const Scenario& scen, Policy& policy, ShieldKind shield,
                          const RunLimits& limits, Rng& rng) {
  return run_episode(scen, policy, shield, limits, rng, tables_for(scen));
}

}  // namespace mapf
