#include "mapf/pibt.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <limits>
#include <numeric>

#include "mapf/rng.hpp"

namespace mapf {

SimState initial_state(const Scenario& scen) {
  SimState state;
  state.scenario = &scen;
  state.positions = scen.starts();
  Rng rng(scen.seed);
  state.tie_breakers.reserve(scen.agents.size());
  for (std::size_t i = 0; i < scen.agents.size(); ++i) state.tie_breakers.push_back(uniform01(rng));
  state.priorities = state.tie_breakers;
  return state;
}

void advance_state(SimState& state, std::span<const Action> actions) {
  const auto& agents = state.scenario->agents;
  for (std::size_t i = 0; i < state.positions.size(); ++i) {
    state.positions[i] = apply(state.positions[i], actions[i]);
    if (state.positions[i] == agents[i].goal) {
      state.priorities[i] = state.tie_breakers[i];
    } else {
      state.priorities[i] += 1.0;
    }
  }
  ++state.timestep;
}

bool all_at_goals(const SimState& state) {
  const auto& agents = state.scenario->agents;
  for (std::size_t i = 0; i < state.positions.size(); ++i) {
    if (state.positions[i] != agents[i].goal) return false;
  }
  return true;
}

ActionOrdering greedy_ordering(const HeuristicTable& table, Cell pos, const GridMap& map) {
  std::array<int, kNumActions> key{};
  for (Action a : kAllActions) {
    const Cell next = apply(pos, a);
    key[index_of(a)] = map.is_free(next) && table.reachable(next) ? table.at(next)
                                                                  : std::numeric_limits<int>::max();
  }
  ActionOrdering order = kAllActions;
  std::stable_sort(order.begin(), order.end(),
                   [&](Action a, Action b) { return key[index_of(a)] < key[index_of(b)]; });
  return order;
}

Pibt::Pibt(const GridMap& map)
    : map_(map), occupied_now_(map.size(), -1), occupied_next_(map.size(), -1) {}

std::vector<Action> Pibt::step(std::span<const Cell> positions, std::span<const double> priorities,
                               std::span<const ActionOrdering> orderings) {
  const int n = static_cast<int>(positions.size());
  orderings_ = orderings;
  current_.resize(n);
  next_.assign(n, -1);
  for (int i = 0; i < n; ++i) {
    current_[i] = map_.index(positions[i]);
    assert(occupied_now_[current_[i]] == -1 && "positions must be pairwise distinct");
    occupied_now_[current_[i]] = i;
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return priorities[a] > priorities[b]; });
  for (int i : order) {
    if (next_[i] != -1) continue;
    [[maybe_unused]] const bool ok = plan(i, -1);
    // Only inherited requests can take an agent's own cell, so the root can always wait.
    assert(ok || next_[i] == current_[i]);
  }

  std::vector<Action> actions(n);
  for (int i = 0; i < n; ++i) {
    actions[i] = *action_between(map_.cell(current_[i]), map_.cell(next_[i]));
    occupied_now_[current_[i]] = -1;
    occupied_next_[next_[i]] = -1;
  }
  return actions;
}

bool Pibt::plan(int agent, int parent) {
  const Cell here = map_.cell(current_[agent]);
  for (Action a : orderings_[agent]) {
    const Cell target = apply(here, a);
    if (!map_.is_free(target)) continue;
    const int v = map_.index(target);
    if (occupied_next_[v] != -1) continue;
    // Moving into the parent's cell would swap with it.
    if (parent != -1 && v == current_[parent]) continue;

    occupied_next_[v] = agent;
    next_[agent] = v;
    const int occupant = occupied_now_[v];
    if (occupant != -1 && occupant != agent && next_[occupant] == -1 && !plan(occupant, agent)) {
      continue;
    }
    return true;
  }
  next_[agent] = current_[agent];
  occupied_next_[current_[agent]] = agent;
  return false;
}

std::vector<Action> pibt_step(const SimState& state, std::span<const ActionOrdering> orderings) {
  Pibt pibt(state.map());
  return pibt.step(state.positions, state.priorities, orderings);
}

int step_limit(const RunLimits& limits, const Scenario& scen, const TableSet& tables) {
  if (limits.max_steps > 0) return limits.max_steps;
  int longest = 0;
  for (std::size_t i = 0; i < scen.agents.size(); ++i) {
    longest = std::max(longest, tables[i]->at(scen.agents[i].start));
  }
  return std::max(limits.step_multiplier * longest, limits.min_steps);
}

RunResult run_pibt(const Scenario& scen, const RunLimits& limits, const TableSet& tables) {
  using Clock = std::chrono::steady_clock;
  const auto began = Clock::now();
  const int max_steps = step_limit(limits, scen, tables);
  const GridMap& map = *scen.map;

  SimState state = initial_state(scen);
  RunResult result;
  result.solution.paths.resize(scen.agents.size());
  for (std::size_t i = 0; i < scen.agents.size(); ++i) result.solution.paths[i].push_back(state.positions[i]);

  Pibt pibt(map);
  std::vector<ActionOrdering> orderings(scen.agents.size());
  while (true) {
    if (all_at_goals(state)) {
      result.success = true;
      break;
    }
    if (state.timestep >= max_steps) break;
    if (std::chrono::duration<double>(Clock::now() - began).count() > limits.time_limit_s) break;

    for (std::size_t i = 0; i < orderings.size(); ++i) {
      orderings[i] = greedy_ordering(*tables[i], state.positions[i], map);
    }
    const auto actions = pibt.step(state.positions, state.priorities, orderings);
    advance_state(state, actions);
    for (std::size_t i = 0; i < scen.agents.size(); ++i) result.solution.paths[i].push_back(state.positions[i]);
  }
  result.steps = state.timestep;
  result.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - began).count();
  return result;
}

RunResult run_pibt(const Scenario& scen, const RunLimits& limits) {
  return run_pibt(scen, limits, tables_for(scen));
}

}  // namespace mapf
