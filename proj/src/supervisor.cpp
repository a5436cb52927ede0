#include "mapf/supervisor.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <queue>
#include <unordered_map>

#include "mapf/rng.hpp"

namespace mapf {

ReservationTable::ReservationTable(const GridMap& map)
    : map_(&map), parked_(map.size(), kNever), last_reserved_(map.size(), -1) {}

std::uint64_t ReservationTable::vertex_key(int cell, int t) const {
  return static_cast<std::uint64_t>(t) * static_cast<std::uint64_t>(map_->size()) +
         static_cast<std::uint64_t>(cell);
}

std::uint64_t ReservationTable::edge_key(int from, int to, int t) const {
  const auto cells = static_cast<std::uint64_t>(map_->size());
  return (static_cast<std::uint64_t>(t) * cells + static_cast<std::uint64_t>(from)) * cells +
         static_cast<std::uint64_t>(to);
}

void ReservationTable::reserve_vertex(Cell c, int t) {
  const int idx = map_->index(c);
  vertices_.insert(vertex_key(idx, t));
  last_reserved_[idx] = std::max(last_reserved_[idx], t);
}

void ReservationTable::reserve_edge(Cell from, Cell to, int t) {
  edges_.insert(edge_key(map_->index(from), map_->index(to), t));
}

void ReservationTable::park(Cell c, int from_t) {
  int& p = parked_[map_->index(c)];
  p = std::min(p, from_t);
}

void ReservationTable::reserve_path(const std::vector<Cell>& path) {
  const Cell goal = path.back();
  const int arrival = static_cast<int>(agent_cost(path, goal));
  for (int t = 0; t < arrival; ++t) {
    reserve_vertex(path[t], t);
    if (path[t] != path[t + 1]) reserve_edge(path[t], path[t + 1], t);
  }
  park(goal, arrival);
}

bool ReservationTable::vertex_blocked(Cell c, int t) const {
  const int idx = map_->index(c);
  return t >= parked_[idx] || vertices_.count(vertex_key(idx, t)) > 0;
}

bool ReservationTable::edge_blocked(Cell from, Cell to, int t) const {
  return edges_.count(edge_key(map_->index(to), map_->index(from), t)) > 0;
}

std::optional<std::vector<Cell>> space_time_astar(const GridMap& map, Cell start, Cell goal,
                                                  const ReservationTable& table, int horizon,
                                                  const HeuristicTable& heuristic) {
  if (table.parked_since(goal) != ReservationTable::kNever) return std::nullopt;
  if (!heuristic.reachable(start) || table.vertex_blocked(start, 0)) return std::nullopt;
  const int settle = table.free_after(goal);

  struct Node {
    int f;
    int t;
    int cell;
  };
  // Lower f first; among equal f prefer later t (deeper), then lower cell index.
  auto worse = [](const Node& a, const Node& b) {
    if (a.f != b.f) return a.f > b.f;
    if (a.t != b.t) return a.t < b.t;
    return a.cell > b.cell;
  };
  std::priority_queue<Node, std::vector<Node>, decltype(worse)> open(worse);
  const auto cells = static_cast<std::uint64_t>(map.size());
  auto key = [&](int cell, int t) { return static_cast<std::uint64_t>(t) * cells + cell; };
  std::unordered_map<std::uint64_t, std::uint64_t> parent;

  const int s = map.index(start);
  parent.emplace(key(s, 0), key(s, 0));
  open.push({heuristic.at(start), 0, s});
  while (!open.empty()) {
    const Node node = open.top();
    open.pop();
    const Cell here = map.cell(node.cell);
    if (here == goal && node.t >= settle) {
      std::vector<Cell> path(node.t + 1);
      std::uint64_t k = key(node.cell, node.t);
      for (int t = node.t; t >= 0; --t) {
        path[t] = map.cell(static_cast<int>(k % cells));
        k = parent.at(k);
      }
      return path;
    }
    if (node.t >= horizon) continue;
    const int nt = node.t + 1;
    for (Action a : kAllActions) {
      const Cell next = apply(here, a);
      if (!map.is_free(next)) continue;
      if (table.vertex_blocked(next, nt) || table.edge_blocked(here, next, node.t)) continue;
      const int h = heuristic.at(next);
      if (h == kUnreachable || nt + h > horizon) continue;
      const auto nk = key(map.index(next), nt);
      if (!parent.emplace(nk, key(node.cell, node.t)).second) continue;
      open.push({nt + h, nt, map.index(next)});
    }
  }
  return std::nullopt;
}

int default_horizon(const Scenario& scen, const TableSet& tables) {
  int longest = 0;
  for (std::size_t i = 0; i < scen.agents.size(); ++i) {
    longest = std::max(longest, tables[i]->at(scen.agents[i].start));
  }
  return std::max(4 * longest, 128);
}

std::optional<Solution> plan_in_order(const Scenario& scen, const std::vector<int>& order,
                                      int horizon, const TableSet& tables) {
  const GridMap& map = *scen.map;
  ReservationTable table(map);
  Solution sol;
  sol.paths.resize(scen.agents.size());
  for (int i : order) {
    auto path = space_time_astar(map, scen.agents[i].start, scen.agents[i].goal, table, horizon,
                                 *tables[i]);
    if (!path) return std::nullopt;
    table.reserve_path(*path);
    sol.paths[i] = std::move(*path);
  }
  pad_paths(sol);
  return sol;
}

PlanResult prioritized_plan(const Scenario& scen, const PlanOptions& options, std::uint64_t seed,
                            const TableSet& tables) {
  using Clock = std::chrono::steady_clock;
  const auto began = Clock::now();
  const int horizon = options.horizon > 0 ? options.horizon : default_horizon(scen, tables);
  const int n = scen.num_agents();

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return tables[a]->at(scen.agents[a].start) > tables[b]->at(scen.agents[b].start);
  });

  Rng rng(seed);
  PlanResult result;
  for (int attempt = 0; attempt <= options.restarts; ++attempt) {
    if (attempt > 0) {
      if (std::chrono::duration<double>(Clock::now() - began).count() > options.timeout_s) break;
      shuffle(order.begin(), order.end(), rng);
    }
    ++result.attempts;
    result.solution = plan_in_order(scen, order, horizon, tables);
    if (result.solution) break;
  }
  result.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - began).count();
  return result;
}

PlanResult prioritized_plan(const Scenario& scen, const PlanOptions& options, std::uint64_t seed) {
  return prioritized_plan(scen, options, seed, tables_for(scen));
}

}  // namespace mapf
