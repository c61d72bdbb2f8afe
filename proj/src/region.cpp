#include "cwalk/region.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "cwalk/errors.hpp"
#include "cwalk/io.hpp"

namespace cwalk {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::size_t kMaxGridCells = 20'000'000;

double segment_distance(PlanePoint u, PlanePoint a, PlanePoint b) {
  const double vx = b.x - a.x, vy = b.y - a.y;
  const double wx = u.x - a.x, wy = u.y - a.y;
  const double len2 = vx * vx + vy * vy;
  const double t = len2 > 0.0 ? std::clamp((wx * vx + wy * vy) / len2, 0.0, 1.0) : 0.0;
  return std::hypot(wx - t * vx, wy - t * vy);
}

bool angle_in(double phi, double t0, double t1) {
  double d = std::fmod(phi - t0, kTwoPi);
  if (d < 0.0) d += kTwoPi;
  return d <= t1 - t0;
}

double distance_to(const Box& b, PlanePoint u) {
  const double dx = std::max({b.x0 - u.x, 0.0, u.x - b.x1});
  const double dy = std::max({b.y0 - u.y, 0.0, u.y - b.y1});
  return std::hypot(dx, dy);
}

double distance_to(const Disk& d, PlanePoint u) {
  return std::max(std::hypot(u.x - d.center.x, u.y - d.center.y) - d.radius, 0.0);
}

double distance_to(const AnnularSector& s, PlanePoint u) {
  const double r = std::hypot(u.x, u.y);
  if (r > 0.0 && angle_in(std::atan2(u.y, u.x), s.theta0, s.theta1))
    return std::max({s.r0 - r, 0.0, r - s.r1});
  auto edge = [&](double t) {
    return segment_distance(u, {s.r0 * std::cos(t), s.r0 * std::sin(t)},
                            {s.r1 * std::cos(t), s.r1 * std::sin(t)});
  };
  return std::min(edge(s.theta0), edge(s.theta1));
}

double outer_radius_of(const Box& b) {
  return std::hypot(std::max(std::abs(b.x0), std::abs(b.x1)), std::max(std::abs(b.y0), std::abs(b.y1)));
}
double outer_radius_of(const Disk& d) { return std::hypot(d.center.x, d.center.y) + d.radius; }
double outer_radius_of(const AnnularSector& s) { return s.r1; }

void validate(const RegionPrimitive& p) {
  std::visit(
      [](const auto& q) {
        using T = std::decay_t<decltype(q)>;
        if constexpr (std::is_same_v<T, Box>) {
          if (!(q.x0 <= q.x1 && q.y0 <= q.y1)) throw std::invalid_argument("box corners out of order");
        } else if constexpr (std::is_same_v<T, Disk>) {
          if (!(q.radius >= 0.0)) throw std::invalid_argument("disk radius < 0");
        } else {
          if (!(0.0 <= q.r0 && q.r0 <= q.r1)) throw std::invalid_argument("sector radii out of order");
          if (!(q.theta0 < q.theta1 && q.theta1 <= q.theta0 + kTwoPi))
            throw std::invalid_argument("sector angles out of order");
        }
      },
      p);
}

std::vector<double> numbers(const std::string& body, std::size_t expected, const std::string& spec) {
  std::vector<double> out;
  std::stringstream ss(body);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(io::parse_double(tok));
  if (out.size() != expected) throw std::invalid_argument("region spec '" + spec + "': wrong arity");
  return out;
}

}  // namespace

RegionG::RegionG(std::vector<RegionPrimitive> parts, std::string label)
    : parts_(std::move(parts)), label_(std::move(label)) {
  for (const auto& p : parts_) validate(p);
}

RegionG RegionG::parse(const std::string& spec) {
  std::vector<RegionPrimitive> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ';')) {
    if (item.empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("region spec '" + item + "': missing ':'");
    const std::string kind = item.substr(0, colon);
    const std::string body = item.substr(colon + 1);
    if (kind == "box") {
      const auto v = numbers(body, 4, item);
      parts.emplace_back(Box{v[0], v[1], v[2], v[3]});
    } else if (kind == "disk") {
      const auto v = numbers(body, 3, item);
      parts.emplace_back(Disk{{v[0], v[1]}, v[2]});
    } else if (kind == "sector") {
      const auto v = numbers(body, 4, item);
      parts.emplace_back(AnnularSector{v[0], v[1], v[2], v[3]});
    } else {
      throw std::invalid_argument("region spec: unknown primitive '" + kind + "'");
    }
  }
  if (parts.empty()) throw std::invalid_argument("region spec is empty");
  return RegionG(std::move(parts), spec);
}

double RegionG::distance(PlanePoint u) const {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& p : parts_) d = std::min(d, std::visit([&](const auto& q) { return distance_to(q, u); }, p));
  return d;
}

bool RegionG::contains(PlanePoint u) const { return distance(u) == 0.0; }

double RegionG::outer_radius() const {
  double r = 0.0;
  for (const auto& p : parts_) r = std::max(r, std::visit([](const auto& q) { return outer_radius_of(q); }, p));
  return r;
}

std::vector<LatticePoint> RegionG::lattice_sites(double scale) const {
  if (!(scale > 0.0)) throw std::invalid_argument("scale must be positive");
  const auto lim = static_cast<std::int64_t>(std::ceil(outer_radius() * scale));
  std::vector<LatticePoint> out;
  for (std::int64_t x = -lim; x <= lim; ++x)
    for (std::int64_t y = -lim; y <= lim; ++y)
      if (contains({static_cast<double>(x) / scale, static_cast<double>(y) / scale})) out.push_back({x, y});
  return out;
}

SurroundResult surrounds_origin_check(const RegionG& g, double c3) {
  if (!(c3 > 0.0)) throw std::invalid_argument("clearance c3 must be positive");
  if (g.parts().empty()) throw std::invalid_argument("region is empty");
  SurroundResult res;
  res.c3 = c3;
  res.c1 = g.outer_radius() + c3;
  const double h = c3 / 4.0;
  const auto half = static_cast<std::int64_t>(std::ceil(res.c1 / h)) + 2;
  const auto side = static_cast<std::size_t>(2 * half + 1);
  if (side > kMaxGridCells / side) throw ResourceError("escape-path grid too large");
  auto at = [&](std::int64_t i, std::int64_t j) { return PlanePoint{static_cast<double>(i) * h, static_cast<double>(j) * h}; };
  auto id = [&](std::int64_t i, std::int64_t j) {
    return static_cast<std::size_t>(i + half) * side + static_cast<std::size_t>(j + half);
  };
  auto free_cell = [&](std::int64_t i, std::int64_t j) { return g.distance(at(i, j)) >= c3 + h; };
  if (!free_cell(0, 0)) return res;

  std::vector<std::int64_t> parent(side * side, -2);
  std::deque<std::pair<std::int64_t, std::int64_t>> queue{{0, 0}};
  parent[id(0, 0)] = -1;
  std::optional<std::pair<std::int64_t, std::int64_t>> goal;
  while (!queue.empty() && !goal) {
    const auto [i, j] = queue.front();
    queue.pop_front();
    for (const auto& s : kUnitSteps) {
      const std::int64_t a = i + s.x, b = j + s.y;
      if (a < -half || a > half || b < -half || b > half) continue;
      if (parent[id(a, b)] != -2 || !free_cell(a, b)) continue;
      parent[id(a, b)] = static_cast<std::int64_t>(id(i, j));
      const auto p = at(a, b);
      if (std::hypot(p.x, p.y) >= res.c1) {
        goal = {a, b};
        break;
      }
      queue.emplace_back(a, b);
    }
  }
  if (!goal) return res;

  std::vector<PlanePoint> path;
  for (auto cell = static_cast<std::int64_t>(id(goal->first, goal->second)); cell >= 0;
       cell = parent[static_cast<std::size_t>(cell)]) {
    const auto i = cell / static_cast<std::int64_t>(side) - half;
    const auto j = cell % static_cast<std::int64_t>(side) - half;
    path.push_back(at(i, j));
  }
  std::reverse(path.begin(), path.end());
  // End exactly on the circle of radius c1 along the last segment.
  const PlanePoint a = path[path.size() - 2], b = path.back();
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 60; ++it) {
    const double m = 0.5 * (lo + hi);
    (std::hypot(a.x + m * (b.x - a.x), a.y + m * (b.y - a.y)) >= res.c1 ? hi : lo) = m;
  }
  path.back() = {a.x + hi * (b.x - a.x), a.y + hi * (b.y - a.y)};
  const double scale = res.c1 / std::hypot(path.back().x, path.back().y);
  path.back() = {path.back().x * scale, path.back().y * scale};
  for (std::size_t k = 1; k < path.size(); ++k)
    res.path_length += std::hypot(path[k].x - path[k - 1].x, path[k].y - path[k - 1].y);
  res.witness = std::move(path);
  res.ok = true;
  return res;
}

}  // namespace cwalk
