#include "cwalk/lattice.hpp"

#include <stdexcept>

namespace cwalk {
namespace {

void check_radius(const Ball& ball) {
  if (!(ball.radius >= 0.0)) throw std::invalid_argument("ball radius must be >= 0");
}

template <typename Fn>
void for_each_site(const Ball& ball, Fn&& fn) {
  const auto x_lo = static_cast<std::int64_t>(std::ceil(ball.center.x - ball.radius));
  const auto x_hi = static_cast<std::int64_t>(std::floor(ball.center.x + ball.radius));
  for (std::int64_t x = x_lo; x <= x_hi; ++x) {
    const double dx = static_cast<double>(x) - ball.center.x;
    const double half = std::sqrt(std::max(0.0, ball.radius * ball.radius - dx * dx));
    auto y_lo = static_cast<std::int64_t>(std::ceil(ball.center.y - half)) - 1;
    auto y_hi = static_cast<std::int64_t>(std::floor(ball.center.y + half)) + 1;
    for (std::int64_t y = y_lo; y <= y_hi; ++y) {
      if (ball.contains({x, y})) fn(LatticePoint{x, y});
    }
  }
}

}  // namespace

std::vector<LatticePoint> ball_sites(const Ball& ball) {
  check_radius(ball);
  std::vector<LatticePoint> out;
  for_each_site(ball, [&](LatticePoint p) { out.push_back(p); });
  return out;
}

bool on_boundary(const Ball& ball, LatticePoint p) {
  if (!ball.contains(p)) return false;
  for (const auto& q : p.neighbours())
    if (!ball.contains(q)) return true;
  return false;
}

std::vector<LatticePoint> boundary_sites(const Ball& ball) {
  check_radius(ball);
  std::vector<LatticePoint> out;
  for_each_site(ball, [&](LatticePoint p) {
    if (on_boundary(ball, p)) out.push_back(p);
  });
  return out;
}

}  // namespace cwalk
