#pragma once

#include <array>
#include <cmath>
#include <compare>
#include <cstdint>
#include <functional>
#include <vector>

namespace cwalk {

struct LatticePoint {
  std::int64_t x = 0;
  std::int64_t y = 0;

  constexpr auto operator<=>(const LatticePoint&) const = default;

  constexpr LatticePoint operator+(LatticePoint o) const { return {x + o.x, y + o.y}; }
  constexpr LatticePoint operator-(LatticePoint o) const { return {x - o.x, y - o.y}; }

  /// Exact for coordinates below 2^31 in magnitude.
  constexpr std::int64_t norm2() const { return x * x + y * y; }
  /// Squared norm in floating point; safe for any coordinates.
  constexpr double norm2_real() const {
    const double dx = static_cast<double>(x);
    const double dy = static_cast<double>(y);
    return dx * dx + dy * dy;
  }
  double norm() const { return std::sqrt(norm2_real()); }
  constexpr bool is_origin() const { return x == 0 && y == 0; }

  /// East, north, west, south.
  constexpr std::array<LatticePoint, 4> neighbours() const {
    return {LatticePoint{x + 1, y}, LatticePoint{x, y + 1}, LatticePoint{x - 1, y},
            LatticePoint{x, y - 1}};
  }
};

constexpr std::array<LatticePoint, 4> kUnitSteps = {
    LatticePoint{1, 0}, LatticePoint{0, 1}, LatticePoint{-1, 0}, LatticePoint{0, -1}};

constexpr bool are_neighbours(LatticePoint a, LatticePoint b) {
  const auto d = a - b;
  return (d.x == 0 && (d.y == 1 || d.y == -1)) || (d.y == 0 && (d.x == 1 || d.x == -1));
}

struct LatticePointHash {
  std::size_t operator()(LatticePoint p) const noexcept {
    std::uint64_t h = static_cast<std::uint64_t>(p.x) * 0x9E3779B97F4A7C15ULL;
    h ^= static_cast<std::uint64_t>(p.y) + 0x7F4A7C159E3779B9ULL + (h << 6) + (h >> 2);
    h ^= h >> 31;
    return static_cast<std::size_t>(h * 0xBF58476D1CE4E5B9ULL);
  }
};

/// Real point in the plane; ball centres need not be lattice sites.
struct PlanePoint {
  double x = 0.0;
  double y = 0.0;
};

/// Discrete ball {p in Z^2 : |p - center| <= radius}.
struct Ball {
  PlanePoint center{};
  double radius = 0.0;

  bool contains(LatticePoint p) const {
    const double dx = static_cast<double>(p.x) - center.x;
    const double dy = static_cast<double>(p.y) - center.y;
    return dx * dx + dy * dy <= radius * radius;
  }
};

inline Ball ball_at_origin(double radius) { return Ball{{0.0, 0.0}, radius}; }

/// Every site of the ball, lexicographic by (x, y).
std::vector<LatticePoint> ball_sites(const Ball& ball);

/// Internal boundary: sites of the ball with at least one neighbour outside,
/// lexicographic by (x, y). Throws std::invalid_argument on negative radius.
std::vector<LatticePoint> boundary_sites(const Ball& ball);

/// True when p lies in the internal boundary of the ball.
bool on_boundary(const Ball& ball, LatticePoint p);

}  // namespace cwalk
