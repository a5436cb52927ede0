#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mapf/scenario.hpp"

namespace mapf {

// Per-agent paths padded with the final cell to a common length makespan + 1.
struct Solution {
  std::vector<std::vector<Cell>> paths;

  int num_agents() const { return static_cast<int>(paths.size()); }
  int makespan() const { return paths.empty() ? 0 : static_cast<int>(paths.front().size()) - 1; }
  std::vector<Cell> positions_at(int t) const;

  friend bool operator==(const Solution&, const Solution&) = default;
};

// Pads every path with its final cell to the longest length.
void pad_paths(Solution& sol);

struct VertexCollision {
  int t;
  int agent_i;
  int agent_j;
  Cell cell;
  friend bool operator==(const VertexCollision&, const VertexCollision&) = default;
};

struct EdgeCollision {
  int t;
  int agent_i;
  int agent_j;
  friend bool operator==(const EdgeCollision&, const EdgeCollision&) = default;
};

struct ValidationReport {
  std::vector<VertexCollision> vertex_collisions;
  std::vector<EdgeCollision> edge_collisions;
  bool all_at_goal = false;
  long sum_of_costs = 0;

  bool collision_free() const { return vertex_collisions.empty() && edge_collisions.empty(); }
  bool valid() const { return collision_free() && all_at_goal; }
};

// Throws InvalidSolution naming (agent, t) for a wrong start, teleport, or obstacle step.
ValidationReport validate_solution(const Solution& sol, const Scenario& scen);

// Validates one joint step from `from` to `to` (same agent order).
ValidationReport validate_step(const std::vector<Cell>& from, const std::vector<Cell>& to,
                               const GridMap& map);

// Per agent: smallest T_i with path[t] == goal for all t >= T_i. An agent that never
// settles at its goal counts the full path length.
long agent_cost(const std::vector<Cell>& path, Cell goal);
long sum_of_costs(const Solution& sol, const Scenario& scen);

// Text format: `makespan T agents N`, then one line of `(r,c)` pairs per agent.
std::string to_solution_text(const Solution& sol);
Solution parse_solution(std::string_view text);
Solution load_solution_file(const std::filesystem::path& path);
void save_solution_file(const std::filesystem::path& path, const Solution& sol);

}  // namespace mapf
