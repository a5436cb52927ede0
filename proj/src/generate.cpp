#include "mapf/generate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "mapf/rng.hpp"

namespace mapf {

GridMap random_map(std::string name, int height, int width, double density, std::uint64_t seed) {
  const int cells = height * width;
  const int obstacles = static_cast<int>(std::lround(density * cells));
  std::vector<int> idx(cells);
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  shuffle(idx.begin(), idx.end(), rng);
  std::vector<std::uint8_t> blocked(cells, 0);
  for (int k = 0; k < obstacles; ++k) blocked[idx[k]] = 1;
  return GridMap(std::move(name), width, height, std::move(blocked));
}

GridMap rooms_map(std::string name, int height, int width, int room, double clutter,
                  std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::uint8_t> blocked(static_cast<std::size_t>(height) * width, 0);
  auto at = [&](int r, int c) -> std::uint8_t& { return blocked[static_cast<std::size_t>(r) * width + c]; };
  const int pitch = room + 1;
  for (int r = room; r < height; r += pitch) {
    for (int c = 0; c < width; ++c) at(r, c) = 1;
  }
  for (int c = room; c < width; c += pitch) {
    for (int r = 0; r < height; ++r) at(r, c) = 1;
  }
  // Doorways: every wall segment between two rooms gets 1-2 openings.
  for (int r = room; r < height; r += pitch) {
    for (int c0 = 0; c0 < width; c0 += pitch) {
      const int span = std::min(room, width - c0);
      const int doors = 1 + static_cast<int>(uniform_below(rng, 2));
      for (int d = 0; d < doors; ++d) at(r, c0 + static_cast<int>(uniform_below(rng, span))) = 0;
    }
  }
  for (int c = room; c < width; c += pitch) {
    for (int r0 = 0; r0 < height; r0 += pitch) {
      const int span = std::min(room, height - r0);
      const int doors = 1 + static_cast<int>(uniform_below(rng, 2));
      for (int d = 0; d < doors; ++d) at(r0 + static_cast<int>(uniform_below(rng, span)), c) = 0;
    }
  }
  for (auto& b : blocked) {
    if (!b && uniform01(rng) < clutter) b = 1;
  }
  return GridMap(std::move(name), width, height, std::move(blocked));
}

std::vector<AgentTask> random_tasks(const GridMap& map, int count, std::uint64_t seed) {
  const auto labels = component_labels(map);
  std::vector<int> sizes;
  for (int l : labels) {
    if (l < 0) continue;
    if (l >= static_cast<int>(sizes.size())) sizes.resize(l + 1, 0);
    ++sizes[l];
  }
  if (sizes.empty()) throw std::invalid_argument("map has no free cells");
  const int largest = static_cast<int>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
  std::vector<int> cells;
  for (int i = 0; i < map.size(); ++i) {
    if (labels[i] == largest) cells.push_back(i);
  }
  if (static_cast<int>(cells.size()) < count) {
    throw std::invalid_argument("largest component has " + std::to_string(cells.size()) +
                                " cells, fewer than " + std::to_string(count) + " agents");
  }
  Rng rng(seed);
  std::vector<int> starts = cells;
  std::vector<int> goals = cells;
  shuffle(starts.begin(), starts.end(), rng);
  shuffle(goals.begin(), goals.end(), rng);
  std::vector<AgentTask> tasks;
  tasks.reserve(count);
  for (int i = 0; i < count; ++i) tasks.push_back({map.cell(starts[i]), map.cell(goals[i])});
  return tasks;
}

SuitePaths write_suite(const std::filesystem::path& dir, const GridMap& map, int scenes,
                       int agents_per_scene, std::uint64_t seed) {
  std::filesystem::create_directories(dir);
  SuitePaths out;
  out.map = dir / (map.name() + ".map");
  write_text_file(out.map, to_map_text(map));
  for (int k = 1; k <= scenes; ++k) {
    const auto tasks = random_tasks(map, agents_per_scene, hash_text(std::to_string(k), seed));
    auto path = dir / (map.name() + "-random-" + std::to_string(k) + ".scen");
    write_text_file(path, to_scen_text(map, map.name() + ".map", tasks));
    out.scenes.push_back(std::move(path));
  }
  return out;
}

}  // namespace mapf
