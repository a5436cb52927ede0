#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mapf/scenario.hpp"

namespace mapf {

// `round(density * cells)` obstacles at uniformly random cells.
GridMap random_map(std::string name, int height, int width, double density, std::uint64_t seed);

// Rooms of `room` x `room` free cells separated by 1-cell walls with one or two
// doorways per wall segment, plus scattered obstacles at `clutter` density.
GridMap rooms_map(std::string name, int height, int width, int room, double clutter,
                  std::uint64_t seed);

// `count` tasks with pairwise-distinct starts and goals drawn from the largest
// connected component. Throws std::invalid_argument if the component is too small.
std::vector<AgentTask> random_tasks(const GridMap& map, int count, std::uint64_t seed);

struct SuitePaths {
  std::filesystem::path map;
  std::vector<std::filesystem::path> scenes;
};

// Writes `<dir>/<name>.map` and `<dir>/<name>-random-<k>.scen` for k = 1..scenes.
SuitePaths write_suite(const std::filesystem::path& dir, const GridMap& map, int scenes,
                       int agents_per_scene, std::uint64_t seed);

}  // namespace mapf
