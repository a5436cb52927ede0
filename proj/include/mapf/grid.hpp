#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mapf/action.hpp"

namespace mapf {

/// Binary-obstacle grid, row-major. Immutable after construction.
class GridMap {
 public:
  GridMap(std::string name, int width, int height, std::vector<std::uint8_t> blocked);

  const std::string& name() const { return name_; }
  int width() const { return width_; }
  int height() const { return height_; }
  int size() const { return width_ * height_; }

  bool in_bounds(Cell c) const {
    return c.row >= 0 && c.row < height_ && c.col >= 0 && c.col < width_;
  }
  bool is_blocked(Cell c) const { return blocked_[index(c)] != 0; }
  // In bounds and not an obstacle.
  bool is_free(Cell c) const { return in_bounds(c) && blocked_[index(c)] == 0; }

  int index(Cell c) const { return c.row * width_ + c.col; }
  Cell cell(int idx) const { return {idx / width_, idx % width_}; }

  int free_count() const;
  const std::vector<std::uint8_t>& blocked() const { return blocked_; }

 private:
  std::string name_;
  int width_;
  int height_;
  std::vector<std::uint8_t> blocked_;
};

// Moving-AI .map text. `.` and `G` are free; `@`, `O`, `T` are blocked.
GridMap parse_map(std::string_view text, std::string name);
GridMap load_map_file(const std::filesystem::path& path);

// Serializes with `.` for free and `@` for blocked cells.
std::string to_map_text(const GridMap& map);

// Connected-component label per cell over free 4-neighbors; -1 for blocked cells.
std::vector<int> component_labels(const GridMap& map);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace mapf
