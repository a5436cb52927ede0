#include <doctest.h>

#include <map>
#include <queue>
#include <set>

#include "fixtures.hpp"

using namespace mapf;
using fixtures::grid;
using fixtures::scenario;

namespace {

int rank_of(const ActionOrdering& o, Action a) {
  for (int k = 0; k < kNumActions; ++k) {
    if (o[k] == a) return k;
  }
  return kNumActions;
}

ActionOrdering ordering_from(std::initializer_list<Action> first) {
  ActionOrdering o{};
  int k = 0;
  for (Action a : first) o[k++] = a;
  for (Action a : kAllActions) {
    if (rank_of(o, a) >= k) o[k++] = a;
  }
  return o;
}

}  // namespace

TEST_CASE("2x2 priority inheritance matches the exhaustive joint-action oracle") {
  const auto m = fixtures::empty_grid(2, 2);
  const auto s = scenario(m, {{{0, 0}, {0, 1}}, {{0, 1}, {0, 0}}});
  SimState state = initial_state(s);
  state.priorities = {0.9, 0.1};
  const auto tables = tables_for(s);
  const std::vector<ActionOrdering> orderings = {greedy_ordering(*tables[0], {0, 0}, *m),
                                                 greedy_ordering(*tables[1], {0, 1}, *m)};
  CHECK(orderings[0][0] == Action::East);
  CHECK(orderings[1][0] == Action::West);

  // Oracle: among collision-free joint actions, the higher-priority agent's rank
  // is minimized first, then the other's.
  std::pair<int, int> best{99, 99};
  std::vector<Action> expected;
  for (Action a : kAllActions) {
    for (Action b : kAllActions) {
      const std::vector<Action> joint = {a, b};
      if (!fixtures::step_is_safe(state.positions, joint, *m)) continue;
      const std::pair<int, int> key{rank_of(orderings[0], a), rank_of(orderings[1], b)};
      if (key < best) {
        best = key;
        expected = joint;
      }
    }
  }
  const auto got = pibt_step(state, orderings);
  CHECK(got == expected);
  CHECK(got == std::vector<Action>{Action::East, Action::South});
}

TEST_CASE("pibt_step falls back along the ordering") {
  const auto m = grid({"@..", "...", "..."});
  const auto s = scenario(m, {{{1, 0}, {2, 2}}});
  const auto state = initial_state(s);
  const std::vector<ActionOrdering> o = {
      ordering_from({Action::North, Action::East, Action::South, Action::West, Action::Wait})};
  CHECK(pibt_step(state, o)[0] == Action::East);
}

TEST_CASE("agent at its goal with nobody around waits") {
  const auto m = fixtures::empty_grid(3, 3);
  const auto s = scenario(m, {{{1, 1}, {1, 1}}});
  const auto tables = tables_for(s);
  const std::vector<ActionOrdering> o = {greedy_ordering(*tables[0], {1, 1}, *m)};
  CHECK(o[0][0] == Action::Wait);
  CHECK(pibt_step(initial_state(s), o)[0] == Action::Wait);
}

TEST_CASE("greedy_ordering puts illegal moves last") {
  const auto m = grid({".@", ".."});
  const auto t = backward_dijkstra(*m, {1, 1});
  const auto o = greedy_ordering(t, {0, 0}, *m);
  CHECK(o[0] == Action::South);
  CHECK(o[1] == Action::Wait);
  CHECK(o[2] == Action::North);
  CHECK(o[3] == Action::East);
  CHECK(o[4] == Action::West);
}

TEST_CASE("run_pibt single agent") {
  const auto s = scenario(fixtures::empty_grid(3, 3), {{{2, 2}, {0, 0}}});
  const auto r = run_pibt(s);
  CHECK(r.success);
  CHECK(r.solution.makespan() == 4);
  CHECK(sum_of_costs(r.solution, s) == 4);
}

TEST_CASE("run_pibt cannot swap in a 1x3 corridor") {
  const auto m = fixtures::empty_grid(1, 3);
  const auto s = scenario(m, {{{0, 0}, {0, 2}}, {{0, 2}, {0, 0}}});

  // Reachability oracle over all joint positions of the two agents.
  using Joint = std::pair<int, int>;
  std::set<Joint> seen{{0, 2}};
  std::queue<Joint> open;
  open.push({0, 2});
  while (!open.empty()) {
    const auto [a, b] = open.front();
    open.pop();
    for (int da = -1; da <= 1; ++da) {
      for (int db = -1; db <= 1; ++db) {
        const int na = a + da;
        const int nb = b + db;
        if (na < 0 || na > 2 || nb < 0 || nb > 2 || na == nb) continue;
        if (na == b && nb == a) continue;
        if (seen.insert({na, nb}).second) open.push({na, nb});
      }
    }
  }
  CHECK_FALSE(seen.count({2, 0}));

  const auto r = run_pibt(s);
  CHECK_FALSE(r.success);
  CHECK(r.steps == 64);
  CHECK(validate_solution(r.solution, s).collision_free());
}

TEST_CASE("run_pibt with independent agents pays exactly the distances") {
  const auto s = scenario(fixtures::empty_grid(8, 8), {{{0, 0}, {0, 7}}, {{7, 0}, {7, 7}}});
  const auto r = run_pibt(s);
  REQUIRE(r.success);
  CHECK(agent_cost(r.solution.paths[0], {0, 7}) == 7);
  CHECK(agent_cost(r.solution.paths[1], {7, 7}) == 7);
}

TEST_CASE("step_limit rule") {
  const auto s = scenario(fixtures::empty_grid(1, 40), {{{0, 0}, {0, 30}}});
  const auto tables = tables_for(s);
  CHECK(step_limit({}, s, tables) == 90);
  CHECK(step_limit({3, 100, 0, 1.0}, s, tables) == 100);
  CHECK(step_limit({3, 64, 7, 1.0}, s, tables) == 7);
}

TEST_CASE("priorities reset at the goal and grow elsewhere") {
  const auto s = scenario(fixtures::empty_grid(1, 3), {{{0, 0}, {0, 1}}, {{0, 2}, {0, 2}}});
  SimState state = initial_state(s);
  const auto tie = state.tie_breakers;
  CHECK(tie[0] >= 0.0);
  CHECK(tie[0] < 1.0);
  const std::vector<Action> wait = {Action::Wait, Action::Wait};
  advance_state(state, wait);
  CHECK(state.priorities[0] == doctest::Approx(tie[0] + 1.0));
  CHECK(state.priorities[1] == tie[1]);
  const std::vector<Action> go = {Action::East, Action::Wait};
  advance_state(state, go);
  CHECK(state.priorities[0] == tie[0]);
  CHECK(state.timestep == 2);
}

TEST_CASE("pibt_step is collision-free under random orderings") {
  Rng rng(2024);
  for (int k = 0; k < 300; ++k) {
    const auto s = fixtures::random_instance(rng, 10, 1, 30);
    SimState state = initial_state(s);
    for (int t = 0; t < 5; ++t) {
      std::vector<ActionOrdering> o(s.num_agents());
      for (auto& x : o) {
        x = kAllActions;
        shuffle(x.begin(), x.end(), rng);
      }
      const auto actions = pibt_step(state, o);
      REQUIRE(fixtures::step_is_safe(state.positions, actions, *s.map));
      advance_state(state, actions);
    }
  }
}

TEST_CASE("run_pibt is deterministic and always collision-free") {
  Rng rng(7);
  for (int k = 0; k < 30; ++k) {
    const auto s = fixtures::random_instance(rng, 16, 2, 60);
    const auto a = run_pibt(s);
    const auto b = run_pibt(s);
    CHECK(a.solution == b.solution);
    const auto report = validate_solution(a.solution, s);
    CHECK(report.collision_free());
    CHECK(report.all_at_goal == a.success);
  }
}
