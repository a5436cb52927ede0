#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "mapf/grid.hpp"

namespace mapf {

struct AgentTask {
  Cell start;
  Cell goal;
};

// A map plus N (start, goal) pairs. `seed` drives every tie-break of runs on it.
struct Scenario {
  std::shared_ptr<const GridMap> map;
  std::vector<AgentTask> agents;
  std::uint64_t seed = 0;

  int num_agents() const { return static_cast<int>(agents.size()); }
  std::vector<Cell> starts() const;
  std::vector<Cell> goals() const;
};

// Throws LoadError naming the first violating agent: out of bounds, blocked,
// duplicate start/goal, or goal in a different component than the start.
void check_scenario(const Scenario& scen);

// Moving-AI .scen text; takes the first `n` entries and converts x/y to (row, col).
Scenario parse_scenario(std::string_view text, std::shared_ptr<const GridMap> map, int n,
                        std::uint64_t seed = 0);
Scenario load_scenario_file(const std::filesystem::path& path, std::shared_ptr<const GridMap> map,
                            int n, std::uint64_t seed = 0);

// Writes the Moving-AI scen format; the optimal-length column is the BFS distance.
std::string to_scen_text(const GridMap& map, std::string_view map_file,
                         const std::vector<AgentTask>& tasks);

}  // namespace mapf
