#include <doctest.h>

#include <algorithm>
#include <fstream>

#include "fixtures.hpp"
#include "mapf/dataset.hpp"
#include "mapf/errors.hpp"
#include "mapf/features.hpp"
#include "mapf/supervisor.hpp"

using namespace mapf;
using fixtures::grid;
using fixtures::scenario;

namespace {

// Nearest `m` others within Chebyshev radius r, by squared distance then index.
std::vector<int> neighbor_oracle(const std::vector<Cell>& pos, int i, int r, int m) {
  std::vector<std::tuple<int, int>> all;
  for (int j = 0; j < static_cast<int>(pos.size()); ++j) {
    if (j == i) continue;
    const int dr = pos[j].row - pos[i].row;
    const int dc = pos[j].col - pos[i].col;
    if (std::max(std::abs(dr), std::abs(dc)) > r) continue;
    all.emplace_back(dr * dr + dc * dc, j);
  }
  std::sort(all.begin(), all.end());
  std::vector<int> out;
  for (int k = 0; k < std::min<int>(m, static_cast<int>(all.size())); ++k) out.push_back(std::get<1>(all[k]));
  return out;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("extract_fov layout") {
  const auto m = fixtures::empty_grid(1, 20);
  const auto s = scenario(m, {{{0, 10}, {0, 0}}});
  const auto tables = tables_for(s);
  const auto state = initial_state(s);
  const auto fov = extract_fov(state, 0, *tables[0], 4);

  CHECK(fov.size() == 9);
  CHECK(fov.channels.size() == 3u * 9 * 9);
  CHECK(fov.at(1, 0, 0) == 0.0f);
  CHECK(fov.at(1, 0, 4) == 0.5f);
  CHECK(fov.at(1, 0, -4) == -0.5f);
  CHECK(fov.at(2, 0, 0) == 1.0f);
  // Rows above and below are off the map.
  CHECK(fov.at(0, -1, 0) == 1.0f);
  CHECK(fov.at(1, 1, 2) == 1.0f);
  CHECK(fov.greedy == std::array<float, 5>{0, 0, 0, 0, 1});
}

TEST_CASE("heuristic channel clamps detours") {
  const auto m = grid({"...", "@@.", "..."});
  const auto s = scenario(m, {{{2, 0}, {2, 0}}});
  const auto t = backward_dijkstra(*m, {2, 0});
  const auto fov = extract_fov(initial_state(s), 0, t, 2);
  CHECK(fov.at(1, 0, 0) == 0.0f);
  CHECK(fov.at(1, 0, 1) == 0.25f);
  CHECK(fov.at(1, -1, 2) == 0.75f);
  CHECK(fov.at(1, -2, 1) == 1.0f);  // 5 / 4
  CHECK(fov.at(1, -2, 0) == 1.0f);  // 6 / 4
  CHECK(fov.at(0, -1, 0) == 1.0f);
  CHECK(fov.at(1, -1, 0) == 1.0f);
  CHECK(fov.at(0, 0, -1) == 1.0f);
}

TEST_CASE("corner agent pads the off-map quadrant") {
  const auto m = fixtures::empty_grid(6, 6);
  const auto s = scenario(m, {{{0, 0}, {5, 5}}, {{0, 1}, {4, 4}}});
  const auto tables = tables_for(s);
  const auto fov = extract_fov(initial_state(s), 0, *tables[0], 4);
  for (int dr = -4; dr <= 4; ++dr) {
    for (int dc = -4; dc <= 4; ++dc) {
      const bool off = dr < 0 || dc < 0;
      if (!off) continue;
      CHECK(fov.at(0, dr, dc) == 1.0f);
      CHECK(fov.at(1, dr, dc) == 1.0f);
      CHECK(fov.at(2, dr, dc) == 0.0f);
    }
  }
  CHECK(fov.at(2, 0, 1) == 1.0f);
  CHECK(fov.at(0, 2, 2) == 0.0f);
}

TEST_CASE("build_graph") {
  const auto m = fixtures::empty_grid(20, 20);
  SUBCASE("two agents three apart") {
    const std::vector<Cell> pos = {{5, 5}, {5, 8}};
    const auto g = build_graph(*m, pos, 4, 5);
    CHECK(g[0] == std::vector<int>{1});
    CHECK(g[1] == std::vector<int>{0});
  }
  SUBCASE("isolated agent") {
    const std::vector<Cell> pos = {{0, 0}, {10, 10}};
    const auto g = build_graph(*m, pos, 4, 5);
    CHECK(g[0].empty());
    CHECK(g[1].empty());
  }
  SUBCASE("seven clustered agents keep the five nearest") {
    const std::vector<Cell> pos = {{10, 10}, {10, 13}, {9, 10}, {12, 12}, {10, 11}, {14, 14}, {8, 8}};
    const auto g = build_graph(*m, pos, 4, 5);
    CHECK(g[0] == std::vector<int>{2, 4, 3, 6, 1});
    CHECK(g[0] == neighbor_oracle(pos, 0, 4, 5));
    CHECK(std::find(g[0].begin(), g[0].end(), 5) == g[0].end());
  }
  SUBCASE("chebyshev membership, not euclidean") {
    const std::vector<Cell> pos = {{10, 10}, {14, 14}, {15, 10}};
    const auto g = build_graph(*m, pos, 4, 5);
    CHECK(g[0] == std::vector<int>{1});
  }
  SUBCASE("random placements match the oracle") {
    Rng rng(12);
    for (int k = 0; k < 50; ++k) {
      const auto tasks = random_tasks(*m, 60, rng());
      std::vector<Cell> pos;
      for (const auto& t : tasks) pos.push_back(t.start);
      const int r = 1 + static_cast<int>(uniform_below(rng, 5));
      const int mm = 1 + static_cast<int>(uniform_below(rng, 8));
      const auto g = build_graph(*m, pos, r, mm);
      for (int i = 0; i < 60; ++i) REQUIRE(g[i] == neighbor_oracle(pos, i, r, mm));
    }
  }
}

TEST_CASE("features are translation equivariant") {
  // Embedding a map in a larger all-blocked frame changes nothing an agent sees.
  Rng rng(6);
  for (int k = 0; k < 20; ++k) {
    const auto small = random_map("s", 10, 11, 0.2, rng());
    const int off_r = 3 + static_cast<int>(uniform_below(rng, 4));
    const int off_c = 2 + static_cast<int>(uniform_below(rng, 4));
    std::vector<std::uint8_t> blocked(22 * 24, 1);
    for (int r = 0; r < 10; ++r) {
      for (int c = 0; c < 11; ++c) blocked[(r + off_r) * 24 + c + off_c] = small.is_blocked({r, c});
    }
    const GridMap big("b", 24, 22, blocked);
    const auto tasks = random_tasks(small, 12, rng());
    std::vector<Cell> pos_small;
    std::vector<Cell> pos_big;
    for (const auto& t : tasks) {
      pos_small.push_back(t.start);
      pos_big.push_back({t.start.row + off_r, t.start.col + off_c});
    }
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      const Cell g = tasks[i].goal;
      const auto ts = backward_dijkstra(small, g);
      const auto tb = backward_dijkstra(big, {g.row + off_r, g.col + off_c});
      CHECK(extract_fov(small, pos_small, static_cast<int>(i), ts, 4) ==
            extract_fov(big, pos_big, static_cast<int>(i), tb, 4));
    }
    CHECK(build_graph(small, pos_small, 4, 5) == build_graph(big, pos_big, 4, 5));
  }
}

TEST_CASE("extract_all agrees with extract_fov") {
  Rng rng(3);
  const auto s = fixtures::random_instance(rng, 16, 5, 30);
  const auto tables = tables_for(s);
  const auto state = initial_state(s);
  const auto all = extract_all(*s.map, state.positions, tables, 3);
  for (int i = 0; i < s.num_agents(); ++i) CHECK(all[i] == extract_fov(state, i, *tables[i], 3));
}

TEST_CASE("export_dataset") {
  fixtures::TempDir dir("features");
  const auto m = fixtures::empty_grid(6, 6);
  const auto s = scenario(m, {{{0, 0}, {0, 5}}, {{2, 0}, {2, 2}}, {{4, 4}, {4, 4}}});
  const auto plan = prioritized_plan(s);
  REQUIRE(plan.solution);
  REQUIRE(plan.solution->makespan() == 5);
  const std::vector<LabeledSolution> one = {{s, *plan.solution}};

  SUBCASE("one graph per timestep") {
    const auto stats = export_dataset(one, dir / "a.bin", 4, 5);
    CHECK(stats.graphs == 5);
    CHECK(stats.agent_records == 15);
    std::uint64_t total = 0;
    for (auto c : stats.label_histogram) total += c;
    CHECK(total == 15);
    const auto ds = read_dataset(dir / "a.bin");
    CHECK(ds.radius == 4);
    CHECK(ds.max_neighbors == 5);
    REQUIRE(ds.graphs.size() == 5);
    for (std::size_t t = 0; t < 5; ++t) {
      CHECK(ds.graphs[t].timestep == t);
      CHECK(ds.graphs[t].agents.size() == 3);
    }
    // Labels reproduce the solution.
    for (int t = 0; t < 5; ++t) {
      for (int i = 0; i < 3; ++i) {
        const auto& rec = ds.graphs[t].agents[i];
        CHECK(apply(rec.position, rec.label) == plan.solution->paths[i][t + 1]);
        CHECK(rec.goal == s.agents[i].goal);
      }
    }
  }
  SUBCASE("round trip is bit exact") {
    const auto tables = tables_for(s);
    DatasetWriter w(dir / "b.bin", 4, 5);
    std::vector<GraphExample> written;
    for (int t = 0; t < 5; ++t) {
      written.push_back(make_example(s, *plan.solution, t, tables, 4, 5));
      w.write(written.back());
    }
    w.close();
    const auto ds = read_dataset(dir / "b.bin");
    REQUIRE(ds.graphs.size() == written.size());
    for (std::size_t g = 0; g < written.size(); ++g) {
      CHECK(ds.graphs[g].timestep == written[g].timestep);
      CHECK(ds.graphs[g].agents == written[g].agents);
    }
    export_dataset(one, dir / "c.bin", 4, 5);
    CHECK(slurp(dir / "b.bin") == slurp(dir / "c.bin"));
  }
  SUBCASE("empty input still makes a valid file") {
    const auto stats = export_dataset({}, dir / "e.bin", 4, 5);
    CHECK(stats.graphs == 0);
    CHECK(read_dataset(dir / "e.bin").graphs.empty());
  }
  SUBCASE("wait dominates when most agents are parked") {
    std::vector<AgentTask> tasks = {{{0, 0}, {5, 5}}};
    for (int c = 0; c < 6; ++c) tasks.push_back({{2, c}, {2, c}});
    tasks.push_back({{4, 1}, {4, 1}});
    const auto parked = scenario(m, tasks);
    const auto r = prioritized_plan(parked);
    REQUIRE(r.solution);
    const std::vector<LabeledSolution> in = {{parked, *r.solution}};
    const auto stats = export_dataset(in, dir / "w.bin", 4, 5);
    CHECK(stats.label_histogram[0] * 2 > stats.agent_records);
  }
  SUBCASE("worker count does not change the bytes") {
    Rng rng(15);
    std::vector<LabeledSolution> many;
    while (many.size() < 6) {
      const auto inst = fixtures::random_instance(rng, 12, 3, 12);
      const auto r = prioritized_plan(inst, {}, 1);
      if (r.solution) many.push_back({inst, *r.solution});
    }
    const auto a = export_dataset(many, dir / "w1.bin", 3, 4, 1);
    const auto b = export_dataset(many, dir / "w3.bin", 3, 4, 3);
    CHECK(a.graphs == b.graphs);
    CHECK(slurp(dir / "w1.bin") == slurp(dir / "w3.bin"));
  }
  SUBCASE("invalid solutions are rejected before writing") {
    Solution bad = *plan.solution;
    bad.paths[0].back() = {0, 4};
    bad.paths[0][bad.makespan() - 1] = {0, 4};
    const std::vector<LabeledSolution> in = {{s, bad}};
    CHECK_THROWS_AS(export_dataset(in, dir / "x.bin", 4, 5), InvalidSolution);
  }
  SUBCASE("corrupt files") {
    export_dataset(one, dir / "t.bin", 4, 5);
    auto bytes = slurp(dir / "t.bin");
    write_text_file(dir / "short.bin", bytes.substr(0, bytes.size() - 7));
    CHECK_THROWS_WITH_AS(read_dataset(dir / "short.bin"), doctest::Contains("unexpected EOF"),
                         DatasetError);
    bytes[0] = 'X';
    write_text_file(dir / "magic.bin", bytes);
    CHECK_THROWS_AS(read_dataset(dir / "magic.bin"), DatasetError);
  }
}
