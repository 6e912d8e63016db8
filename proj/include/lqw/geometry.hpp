#pragma once

#include <array>
#include <cstdint>
#include <string>

#include <Eigen/Core>

#include "lqw/errors.hpp"

namespace lqw {

using Index = Eigen::Index;

// Coin basis. The numeric value is the row of the direction inside a
// vertex's 5-amplitude block.
enum class Direction : std::uint8_t { Up = 0, Down, Left, Right, SelfLoop };

inline constexpr Index kDirections = 5;

inline constexpr std::array<Direction, 5> kAllDirections{
    Direction::Up, Direction::Down, Direction::Left, Direction::Right,
    Direction::SelfLoop};

constexpr Index index_of(Direction d) noexcept { return static_cast<Index>(d); }

constexpr Direction reverse(Direction d) noexcept {
  switch (d) {
    case Direction::Up: return Direction::Down;
    case Direction::Down: return Direction::Up;
    case Direction::Left: return Direction::Right;
    case Direction::Right: return Direction::Left;
    case Direction::SelfLoop: return Direction::SelfLoop;
  }
  return d;
}

/// n×n torus. Vertex v = row·n + col.
///
/// Up decrements the row, Down increments it, Left decrements the column and
/// Right increments it, all modulo n.
class GridGeometry {
 public:
  explicit GridGeometry(Index side) : side_(side) {
    if (side < 2) {
      throw InvalidConfig("grid side must be >= 2, got " + std::to_string(side));
    }
  }

  Index side() const noexcept { return side_; }
  Index vertices() const noexcept { return side_ * side_; }
  /// Dimension of the walk's Hilbert space, 5·N.
  Index dimension() const noexcept { return kDirections * vertices(); }

  Index row(Index v) const noexcept { return v / side_; }
  Index col(Index v) const noexcept { return v % side_; }

  /// Vertex at (row, col), wrapping both coordinates onto the torus.
  Index vertex(Index row, Index col) const noexcept {
    return wrap(row) * side_ + wrap(col);
  }

  Index neighbor(Index v, Direction d) const noexcept {
    const Index r = row(v);
    const Index c = col(v);
    switch (d) {
      case Direction::Up: return vertex(r - 1, c);
      case Direction::Down: return vertex(r + 1, c);
      case Direction::Left: return vertex(r, c - 1);
      case Direction::Right: return vertex(r, c + 1);
      case Direction::SelfLoop: return v;
    }
    return v;
  }

  /// Position of amplitude (v, d) in the flattened vertex-major state.
  Index flat(Index v, Direction d) const noexcept {
    return v * kDirections + index_of(d);
  }

  bool operator==(const GridGeometry&) const = default;

 private:
  Index wrap(Index x) const noexcept {
    const Index m = x % side_;
    return m < 0 ? m + side_ : m;
  }

  Index side_;
};

}  // namespace lqw
