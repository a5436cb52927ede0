#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string_view>

namespace mapf {

// Grid coordinate; north is row - 1.
struct Cell {
  int row = 0;
  int col = 0;

  friend constexpr bool operator==(const Cell&, const Cell&) = default;
  friend constexpr auto operator<=>(const Cell&, const Cell&) = default;
};

inline std::ostream& operator<<(std::ostream& os, const Cell& c) {
  return os << "(" << c.row << "," << c.col << ")";
}

// The index order is global: every serialized label and distribution uses it.
enum class Action : std::uint8_t { Wait = 0, North = 1, East = 2, South = 3, West = 4 };

inline constexpr int kNumActions = 5;

inline constexpr std::array<Action, kNumActions> kAllActions = {
    Action::Wait, Action::North, Action::East, Action::South, Action::West};

constexpr int index_of(Action a) { return static_cast<int>(a); }

constexpr Action action_from_index(int i) { return static_cast<Action>(i); }

constexpr Cell displacement(Action a) {
  switch (a) {
    case Action::North: return {-1, 0};
    case Action::East: return {0, 1};
    case Action::South: return {1, 0};
    case Action::West: return {0, -1};
    case Action::Wait: break;
  }
  return {0, 0};
}

constexpr Cell apply(Cell c, Action a) {
  const Cell d = displacement(a);
  return {c.row + d.row, c.col + d.col};
}

// The action moving `from` to `to`, if they are equal or 4-adjacent.
constexpr std::optional<Action> action_between(Cell from, Cell to) {
  for (Action a : kAllActions) {
    if (apply(from, a) == to) return a;
  }
  return std::nullopt;
}

constexpr std::string_view action_name(Action a) {
  constexpr std::array<std::string_view, kNumActions> names = {"wait", "north", "east", "south",
                                                               "west"};
  return names[index_of(a)];
}

inline std::ostream& operator<<(std::ostream& os, Action a) { return os << action_name(a); }

}  // namespace mapf
