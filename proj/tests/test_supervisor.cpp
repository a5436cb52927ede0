#include <doctest.h>

#include <algorithm>
#include <map>
#include <queue>
#include <set>

#include "fixtures.hpp"
#include "mapf/supervisor.hpp"

using namespace mapf;
using fixtures::grid;
using fixtures::scenario;

namespace {

// Breadth-first search over (cell, t) layers; the earliest t at the goal after which
// the goal is never reserved again.
std::optional<int> earliest_arrival(const GridMap& map, Cell start, Cell goal,
                                    const ReservationTable& table, int horizon) {
  std::set<std::pair<int, int>> layer{{map.index(start), 0}};
  if (table.vertex_blocked(start, 0)) return std::nullopt;
  for (int t = 0; t <= horizon; ++t) {
    std::set<std::pair<int, int>> next;
    for (const auto& [v, tt] : layer) {
      const Cell c = map.cell(v);
      if (c == goal && t >= table.free_after(goal) && table.parked_since(goal) == ReservationTable::kNever) {
        return t;
      }
      for (Action a : kAllActions) {
        const Cell n = apply(c, a);
        if (!map.is_free(n) || table.vertex_blocked(n, t + 1) || table.edge_blocked(c, n, t)) continue;
        next.insert({map.index(n), t + 1});
      }
    }
    layer = std::move(next);
  }
  return std::nullopt;
}

void check_path(const std::vector<Cell>& path, const GridMap& map, Cell start, Cell goal,
                const ReservationTable& table) {
  REQUIRE(!path.empty());
  CHECK(path.front() == start);
  CHECK(path.back() == goal);
  for (std::size_t t = 0; t < path.size(); ++t) {
    CHECK_FALSE(table.vertex_blocked(path[t], static_cast<int>(t)));
    if (t + 1 < path.size()) {
      CHECK(action_between(path[t], path[t + 1]).has_value());
      CHECK(map.is_free(path[t + 1]));
      CHECK_FALSE(table.edge_blocked(path[t], path[t + 1], static_cast<int>(t)));
    }
  }
}

}  // namespace

TEST_CASE("space_time_astar") {
  SUBCASE("unconstrained shortest path") {
    const auto m = fixtures::empty_grid(3, 3);
    ReservationTable table(*m);
    const auto h = backward_dijkstra(*m, {0, 0});
    const auto p = space_time_astar(*m, {2, 2}, {0, 0}, table, 50, h);
    REQUIRE(p);
    CHECK(p->size() == 5);
  }
  SUBCASE("corridor with a vertex reservation waits once") {
    const auto m = fixtures::empty_grid(1, 3);
    ReservationTable table(*m);
    table.reserve_vertex({0, 1}, 1);
    const auto p = space_time_astar(*m, {0, 0}, {0, 2}, table, 20, backward_dijkstra(*m, {0, 2}));
    REQUIRE(p);
    CHECK(static_cast<int>(p->size()) - 1 == 3);
    CHECK(earliest_arrival(*m, {0, 0}, {0, 2}, table, 20) == 3);
    CHECK(*p == std::vector<Cell>{{0, 0}, {0, 0}, {0, 1}, {0, 2}});
  }
  SUBCASE("parked goal is unreachable") {
    const auto m = fixtures::empty_grid(3, 3);
    ReservationTable table(*m);
    table.park({0, 0}, 2);
    CHECK_FALSE(space_time_astar(*m, {2, 2}, {0, 0}, table, 50, backward_dijkstra(*m, {0, 0})));
  }
  SUBCASE("goal reserved later forces a late arrival") {
    const auto m = fixtures::empty_grid(1, 3);
    ReservationTable table(*m);
    table.reserve_vertex({0, 2}, 6);
    const auto p = space_time_astar(*m, {0, 0}, {0, 2}, table, 20, backward_dijkstra(*m, {0, 2}));
    REQUIRE(p);
    CHECK(p->size() == 8);
    CHECK(p->at(6) != Cell{0, 2});
  }
  SUBCASE("edge reservation blocks the swap") {
    const auto m = fixtures::empty_grid(1, 2);
    ReservationTable table(*m);
    table.reserve_edge({0, 1}, {0, 0}, 0);
    CHECK(table.edge_blocked({0, 0}, {0, 1}, 0));
    CHECK_FALSE(table.edge_blocked({0, 0}, {0, 1}, 1));
  }
}

TEST_CASE("space_time_astar arrives as early as the layered search") {
  Rng rng(31);
  for (int k = 0; k < 150; ++k) {
    const auto m = random_map("r", 2 + static_cast<int>(uniform_below(rng, 6)), 2 + static_cast<int>(uniform_below(rng, 6)), 0.2, rng());
    const auto tasks = random_tasks(m, 1, rng());
    ReservationTable table(m);
    const int reservations = static_cast<int>(uniform_below(rng, 12));
    for (int r = 0; r < reservations; ++r) {
      const Cell c = m.cell(static_cast<int>(uniform_below(rng, m.size())));
      if (!m.is_free(c) || c == tasks[0].start) continue;
      table.reserve_vertex(c, 1 + static_cast<int>(uniform_below(rng, 8)));
    }
    const auto h = backward_dijkstra(m, tasks[0].goal);
    const auto p = space_time_astar(m, tasks[0].start, tasks[0].goal, table, 40, h);
    const auto oracle = earliest_arrival(m, tasks[0].start, tasks[0].goal, table, 40);
    REQUIRE(p.has_value() == oracle.has_value());
    if (p) {
      CHECK(static_cast<int>(p->size()) - 1 == *oracle);
      check_path(*p, m, tasks[0].start, tasks[0].goal, table);
    }
  }
}

TEST_CASE("prioritized_plan") {
  SUBCASE("disjoint agents pay their distances") {
    const auto m = grid({".....", "@@@@@", "....."});
    const auto s = scenario(m, {{{0, 0}, {0, 4}}, {{2, 4}, {2, 1}}});
    const auto r = prioritized_plan(s);
    REQUIRE(r.solution);
    CHECK(validate_solution(*r.solution, s).valid());
    CHECK(sum_of_costs(*r.solution, s) == 4 + 3);
  }
  SUBCASE("head-on corridor with a siding") {
    const auto m = grid({".....", "@@@.@"});
    const auto s = scenario(m, {{{0, 0}, {0, 4}}, {{0, 4}, {0, 0}}});
    const auto r = prioritized_plan(s);
    REQUIRE(r.solution);
    const auto report = validate_solution(*r.solution, s);
    CHECK(report.valid());
    CHECK(report.sum_of_costs >= 8);
    bool used_siding = false;
    for (const auto& path : r.solution->paths) {
      used_siding |= std::find(path.begin(), path.end(), Cell{1, 3}) != path.end();
    }
    CHECK(used_siding);
  }
  SUBCASE("packed 2x2 pair swap fails in every order") {
    const auto m = fixtures::empty_grid(2, 2);
    const auto s = scenario(m, {{{0, 0}, {0, 1}}, {{0, 1}, {0, 0}}, {{1, 0}, {1, 1}}, {{1, 1}, {1, 0}}});

    // Joint-state reachability: the goal arrangement is never reached.
    using Joint = std::vector<Cell>;
    std::set<Joint> seen{s.starts()};
    std::queue<Joint> open;
    open.push(s.starts());
    while (!open.empty()) {
      const Joint cur = open.front();
      open.pop();
      for (int code = 0; code < 625; ++code) {
        std::vector<Action> acts(4);
        for (int i = 0, c = code; i < 4; ++i, c /= 5) acts[i] = action_from_index(c % 5);
        if (!fixtures::step_is_safe(cur, acts, *m)) continue;
        Joint nxt(4);
        for (int i = 0; i < 4; ++i) nxt[i] = apply(cur[i], acts[i]);
        if (seen.insert(nxt).second) open.push(nxt);
      }
    }
    CHECK(seen.size() == 4);
    CHECK_FALSE(seen.count(s.goals()));

    const auto tables = tables_for(s);
    std::vector<int> order = {0, 1, 2, 3};
    int orders = 0;
    do {
      CHECK_FALSE(plan_in_order(s, order, default_horizon(s, tables), tables));
      ++orders;
    } while (std::next_permutation(order.begin(), order.end()));
    CHECK(orders == 24);
    const auto r = prioritized_plan(s, {5, 10.0, 0}, 3);
    CHECK_FALSE(r.solution);
    CHECK(r.attempts == 6);
  }
  SUBCASE("rotation is a legal joint move") {
    const auto m = fixtures::empty_grid(2, 2);
    const auto s = scenario(m, {{{0, 0}, {0, 1}}, {{0, 1}, {1, 1}}, {{1, 1}, {1, 0}}, {{1, 0}, {0, 0}}});
    const auto r = prioritized_plan(s);
    REQUIRE(r.solution);
    CHECK(validate_solution(*r.solution, s).valid());
    CHECK(r.solution->makespan() == 1);
  }
}

TEST_CASE("prioritized_plan solutions are valid and above the distance bound") {
  Rng rng(77);
  int solved = 0;
  for (int k = 0; k < 40; ++k) {
    const auto s = fixtures::random_instance(rng, 14, 2, 25);
    const auto tables = tables_for(s);
    const auto r = prioritized_plan(s, {}, rng(), tables);
    if (!r.solution) continue;
    ++solved;
    const auto report = validate_solution(*r.solution, s);
    CHECK(report.valid());
    long bound = 0;
    for (int i = 0; i < s.num_agents(); ++i) bound += tables[i]->at(s.agents[i].start);
    CHECK(report.sum_of_costs >= bound);
  }
  CHECK(solved >= 20);
}

TEST_CASE("prioritized_plan is deterministic for a seed") {
  Rng rng(4);
  const auto s = fixtures::random_instance(rng, 12, 10, 20);
  const auto a = prioritized_plan(s, {}, 9);
  const auto b = prioritized_plan(s, {}, 9);
  REQUIRE(a.solution.has_value() == b.solution.has_value());
  if (a.solution) CHECK(*a.solution == *b.solution);
}
