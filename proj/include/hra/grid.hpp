#pragma once

#include <array>
#include <compare>
#include <cstddef>

namespace hra {

struct Cell {
  int row = 0;
  int col = 0;
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

/// Compass moves share action indices across both environments; the maze
/// adds a no-op as action 4.
enum class Direction : std::size_t { north = 0, east = 1, south = 2, west = 3 };

inline constexpr std::size_t kCompassActions = 4;

inline constexpr std::array<Cell, 4> kDirectionDelta = {Cell{-1, 0}, Cell{0, 1}, Cell{1, 0}, Cell{0, -1}};

inline Cell moved(Cell c, Direction d) {
  const Cell delta = kDirectionDelta[static_cast<std::size_t>(d)];
  return {c.row + delta.row, c.col + delta.col};
}

inline int manhattan(Cell a, Cell b) {
  return (a.row > b.row ? a.row - b.row : b.row - a.row) + (a.col > b.col ? a.col - b.col : b.col - a.col);
}

}  // namespace hra
