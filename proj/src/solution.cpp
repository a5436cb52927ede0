#include "mapf/solution.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <sstream>
#include <unordered_map>

#include "mapf/errors.hpp"

namespace mapf {

std::vector<Cell> Solution::positions_at(int t) const {
  std::vector<Cell> out;
  out.reserve(paths.size());
  for (const auto& p : paths) out.push_back(p[std::min<std::size_t>(t, p.size() - 1)]);
  return out;
}

void pad_paths(Solution& sol) {
  std::size_t len = 0;
  for (const auto& p : sol.paths) len = std::max(len, p.size());
  for (auto& p : sol.paths) {
    if (p.empty()) continue;
    p.resize(len, p.back());
  }
}

namespace {

std::uint64_t pair_key(int a, int b) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

// Appends collisions between consecutive configurations `from` (time t) and `to` (t + 1).
// Vertex collisions are reported at time t + 1.
void collect_step_collisions(const std::vector<Cell>& from, const std::vector<Cell>& to,
                             const GridMap& map, int t, ValidationReport& report) {
  const int n = static_cast<int>(to.size());
  std::vector<std::pair<int, int>> at;  // (cell index, agent)
  at.reserve(n);
  for (int i = 0; i < n; ++i) at.emplace_back(map.index(to[i]), i);
  std::sort(at.begin(), at.end());
  for (std::size_t a = 0; a < at.size();) {
    std::size_t b = a + 1;
    while (b < at.size() && at[b].first == at[a].first) ++b;
    for (std::size_t x = a; x < b; ++x) {
      for (std::size_t y = x + 1; y < b; ++y) {
        report.vertex_collisions.push_back({t + 1, at[x].second, at[y].second, to[at[x].second]});
      }
    }
    a = b;
  }

  std::unordered_map<std::uint64_t, std::vector<int>> moves;
  for (int i = 0; i < n; ++i) {
    if (from[i] == to[i]) continue;
    moves[pair_key(map.index(from[i]), map.index(to[i]))].push_back(i);
  }
  for (int i = 0; i < n; ++i) {
    if (from[i] == to[i]) continue;
    auto it = moves.find(pair_key(map.index(to[i]), map.index(from[i])));
    if (it == moves.end()) continue;
    for (int j : it->second) {
      if (i < j) report.edge_collisions.push_back({t, i, j});
    }
  }
}

void check_move(const GridMap& map, Cell from, Cell to, int agent, int t) {
  if (!map.in_bounds(to)) {
    throw InvalidSolution("agent " + std::to_string(agent) + " t=" + std::to_string(t) +
                          ": moves out of bounds");
  }
  if (map.is_blocked(to)) {
    throw InvalidSolution("agent " + std::to_string(agent) + " t=" + std::to_string(t) +
                          ": moves into an obstacle");
  }
  if (!action_between(from, to)) {
    throw InvalidSolution("agent " + std::to_string(agent) + " t=" + std::to_string(t) +
                          ": illegal move (teleport)");
  }
}

}  // namespace

ValidationReport validate_step(const std::vector<Cell>& from, const std::vector<Cell>& to,
                               const GridMap& map) {
  if (from.size() != to.size()) throw InvalidSolution("step agent count mismatch");
  ValidationReport report;
  for (std::size_t i = 0; i < from.size(); ++i) check_move(map, from[i], to[i], static_cast<int>(i), 0);
  collect_step_collisions(from, to, map, 0, report);
  return report;
}

ValidationReport validate_solution(const Solution& sol, const Scenario& scen) {
  const GridMap& map = *scen.map;
  const int n = scen.num_agents();
  if (sol.num_agents() != n) {
    throw InvalidSolution("solution has " + std::to_string(sol.num_agents()) + " paths for " +
                          std::to_string(n) + " agents");
  }
  const int makespan = sol.makespan();
  for (int i = 0; i < n; ++i) {
    const auto& path = sol.paths[i];
    if (static_cast<int>(path.size()) != makespan + 1) {
      throw InvalidSolution("agent " + std::to_string(i) + ": path not padded to makespan");
    }
    if (path.front() != scen.agents[i].start) {
      throw InvalidSolution("agent " + std::to_string(i) + " t=0: path does not begin at start");
    }
    for (int t = 0; t < makespan; ++t) check_move(map, path[t], path[t + 1], i, t);
  }

  ValidationReport report;
  if (n > 0 && makespan >= 0) {
    // Vertex collisions at t = 0.
    collect_step_collisions(sol.positions_at(0), sol.positions_at(0), map, -1, report);
    report.edge_collisions.clear();
    for (int t = 0; t < makespan; ++t) {
      collect_step_collisions(sol.positions_at(t), sol.positions_at(t + 1), map, t, report);
    }
  }
  report.all_at_goal = true;
  for (int i = 0; i < n; ++i) {
    if (sol.paths[i].back() != scen.agents[i].goal) report.all_at_goal = false;
  }
  report.sum_of_costs = sum_of_costs(sol, scen);
  return report;
}

long agent_cost(const std::vector<Cell>& path, Cell goal) {
  for (long t = static_cast<long>(path.size()) - 1; t >= 0; --t) {
    if (path[t] != goal) return t + 1;
  }
  return 0;
}

long sum_of_costs(const Solution& sol, const Scenario& scen) {
  long total = 0;
  for (int i = 0; i < sol.num_agents(); ++i) total += agent_cost(sol.paths[i], scen.agents[i].goal);
  return total;
}

std::string to_solution_text(const Solution& sol) {
  std::string out = "makespan " + std::to_string(sol.makespan()) + " agents " +
                    std::to_string(sol.num_agents()) + "\n";
  for (const auto& path : sol.paths) {
    for (std::size_t t = 0; t < path.size(); ++t) {
      if (t) out.push_back(' ');
      out += "(" + std::to_string(path[t].row) + "," + std::to_string(path[t].col) + ")";
    }
    out.push_back('\n');
  }
  return out;
}

Solution parse_solution(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) throw ParseError("solution line 1: empty file");
  std::istringstream header(line);
  std::string k1, k2;
  long makespan = -1, agents = -1;
  if (!(header >> k1 >> makespan >> k2 >> agents) || k1 != "makespan" || k2 != "agents" ||
      makespan < 0 || agents < 0) {
    throw ParseError("solution line 1: expected 'makespan T agents N'");
  }
  Solution sol;
  sol.paths.resize(agents);
  for (long i = 0; i < agents; ++i) {
    const std::string where = "solution line " + std::to_string(i + 2);
    if (!std::getline(in, line)) throw ParseError(where + ": missing agent path");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream row(line);
    std::string tok;
    while (row >> tok) {
      int r = 0, c = 0;
      char tail = 0;
      if (std::sscanf(tok.c_str(), "(%d,%d%c", &r, &c, &tail) != 3 || tail != ')') {
        throw ParseError(where + ": bad cell token '" + tok + "'");
      }
      sol.paths[i].push_back({r, c});
    }
    if (static_cast<long>(sol.paths[i].size()) != makespan + 1) {
      throw ParseError(where + ": expected " + std::to_string(makespan + 1) + " cells");
    }
  }
  return sol;
}

Solution load_solution_file(const std::filesystem::path& path) {
  return parse_solution(read_text_file(path));
}

void save_solution_file(const std::filesystem::path& path, const Solution& sol) {
  write_text_file(path, to_solution_text(sol));
}

}  // namespace mapf
