// Measures the error-term constants in calibration.hpp against exact solves.
#include <json.hpp>

#include <cwalk/exact_solver.hpp>
#include <cwalk/hitting.hpp>
#include <cwalk/kernel.hpp>

#include <cmath>
#include <iostream>

namespace {

using cwalk::LatticePoint;
using cwalk::WalkKind;
using Json = nlohmann::ordered_json;

std::vector<LatticePoint> ball_sites(double R, double r_excl) {
  std::vector<LatticePoint> out;
  const auto e = static_cast<std::int64_t>(std::floor(R));
  for (std::int64_t i = -e; i <= e; ++i)
    for (std::int64_t j = -e; j <= e; ++j) {
      const LatticePoint p{i, j};
      if (p.norm() <= R && p.norm() > r_excl) out.push_back(p);
    }
  return out;
}

// SRW: P_x[hit y before leaving B(R)]; required a(R) shift per max(|y|,1)/R.
Json calibrate_srw_hit(const cwalk::PotentialKernel& k) {
  Json rows = Json::array();
  double worst = 0.0;
  for (double R : {30.0, 60.0, 120.0}) {
    const auto h = static_cast<std::int64_t>(R / 2);
    for (LatticePoint y : {LatticePoint{0, 0}, LatticePoint{h / 3, h / 4}, LatticePoint{h, 0}}) {
      auto interior = ball_sites(R, -1.0);
      std::erase(interior, y);
      std::vector<std::vector<LatticePoint>> classes{{y}, {}};
      for (const auto& p : cwalk::outer_shell(interior))
        if (p != y) classes[1].push_back(p);
      const auto sol = cwalk::solve_hitting_exact(k, interior, classes, WalkKind::kSimple);
      for (LatticePoint x : {LatticePoint{1, 0}, LatticePoint{-h / 2, h / 3}, LatticePoint{0, -h}}) {
        if (x == y) continue;
        const double exact = sol.at(x, 0);
        const double aR = cwalk::asymptotic_a(R);
        const double axy = k(x - y);
        const double d = std::abs(exact - (1.0 - axy / aR));
        const double shift = aR - axy / (axy / aR + d);
        const double c = shift * R / std::max(y.norm(), 1.0);
        worst = std::max(worst, c);
        rows.push_back({{"R", R}, {"x", {x.x, x.y}}, {"y", {y.x, y.y}}, {"exact", exact},
                        {"abs_error", d}, {"required", c}});
      }
    }
  }
  return {{"constant", "kSrwHit"}, {"required", worst}, {"rows", rows}};
}

double exit_formula_error(double ax, double r, double R, double c) {
  auto value = [&](double ar, double aR) { return (1.0 / ar - 1.0 / ax) / (1.0 / ar - 1.0 / aR); };
  const double v = value(cwalk::asymptotic_a(r), cwalk::asymptotic_a(R));
  double err = 0.0;
  for (double sr : {-1.0, 1.0})
    for (double sR : {-1.0, 1.0}) {
      const double w = value(cwalk::asymptotic_a(r) + sr * c / r, cwalk::asymptotic_a(R) + sR * c / R);
      if (std::isfinite(w)) err = std::max(err, std::abs(w - v));
    }
  return err;
}

// Conditioned: P_x[leave B(R) before entering B(r)].
Json calibrate_exit(const cwalk::PotentialKernel& k) {
  Json rows = Json::array();
  double worst = 0.0;
  for (auto [r, R] : {std::pair{2.0, 40.0}, {5.0, 60.0}, {10.0, 100.0}, {20.0, 150.0}}) {
    const auto interior = ball_sites(R, r);
    std::vector<std::vector<LatticePoint>> classes(2);
    for (const auto& p : cwalk::outer_shell(interior)) {
      if (p.norm() > R) classes[0].push_back(p);
      else if (!p.is_origin()) classes[1].push_back(p);
    }
    const auto sol = cwalk::solve_hitting_exact(k, interior, classes, WalkKind::kConditioned);
    for (double f : {1.5, 3.0, 0.5 * R / r}) {
      const auto rx = static_cast<std::int64_t>(std::llround(f * r));
      for (LatticePoint x : {LatticePoint{rx, 0}, LatticePoint{rx * 7 / 10, rx * 7 / 10}}) {
        if (!(x.norm() > r && x.norm() <= R)) continue;
        const double exact = sol.at(x, 0);
        const auto p = cwalk::cond_exit_before_inner(k, x, r, R);
        const double d = std::abs(exact - p.value);
        double lo = 0.0, hi = 64.0;
        if (exit_formula_error(k(x), r, R, hi) < d) lo = hi;
        else
          for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            (exit_formula_error(k(x), r, R, mid) >= d ? hi : lo) = mid;
          }
        worst = std::max(worst, hi);
        rows.push_back({{"r", r}, {"R", R}, {"x", {x.x, x.y}}, {"exact", exact},
                        {"formula", p.value}, {"abs_error", d}, {"required", hi}});
      }
    }
  }
  return {{"constant", "kExit"}, {"required", worst}, {"rows", rows}};
}

// Conditioned: P_x[never enter B(r)] = v(x)/a(x), with v = a - E[a at entry]
// the SRW potential of the disk. Two outer radii eliminate the constant term.
Json calibrate_escape(const cwalk::PotentialKernel& k) {
  Json rows = Json::array();
  double worst = 0.0;
  const double R1 = 110.0, R2 = 170.0;
  for (double r : {2.0, 3.0, 5.0, 8.0}) {
    struct Pair {
      cwalk::DirichletSolution a_part, one_part;
    };
    auto solve_at = [&](double R) {
      const auto interior = ball_sites(R, r);
      auto outer = [&](LatticePoint p) { return p.norm() > R; };
      return Pair{cwalk::solve_dirichlet(k, interior, WalkKind::kSimple,
                                         [&](LatticePoint p) { return outer(p) ? k(p) : 0.0; }),
                  cwalk::solve_dirichlet(k, interior, WalkKind::kSimple,
                                         [&](LatticePoint p) { return outer(p) ? 1.0 : 0.0; })};
    };
    const Pair s1 = solve_at(R1), s2 = solve_at(R2);
    for (double f : {1.5, 3.0, 6.0}) {
      const LatticePoint x{static_cast<std::int64_t>(std::llround(f * r)), 1};
      if (x.norm() <= r || x.norm() > R1) continue;
      const double c_inf = (s1.a_part.at(x) - s2.a_part.at(x)) / (s1.one_part.at(x) - s2.one_part.at(x));
      const double v = s2.a_part.at(x) - c_inf * s2.one_part.at(x);
      const double exact = v / k(x);
      const auto p = cwalk::cond_never_hit_disk(k, x, r);
      const double d = std::abs(exact - p.value);
      const double c = d * r * k(x);
      worst = std::max(worst, c);
      rows.push_back({{"r", r}, {"x", {x.x, x.y}}, {"exact", exact}, {"formula", p.value},
                      {"c_inf", c_inf}, {"abs_error", d}, {"required", c}});
    }
  }
  return {{"constant", "kEscape"}, {"required", worst}, {"rows", rows}};
}

// Conditioned: P_x[hit y before leaving B(n ln^2 n)], relative error * ln^3 n.
Json calibrate_excursion(const cwalk::PotentialKernel& k) {
  Json rows = Json::array();
  double worst = 0.0;
  for (double n : {16.0, 18.0}) {
    const double R = cwalk::excursion_outer_radius(n);
    const double l = std::log(n);
    const double inner = n / l;
    const auto yi = static_cast<std::int64_t>(std::ceil(inner)) + 1;
    const auto yo = static_cast<std::int64_t>(std::floor(n));
    for (LatticePoint y : {LatticePoint{yi, 0}, LatticePoint{yo, 0}, LatticePoint{0, -yo}}) {
      auto interior = ball_sites(R, 0.0);
      std::erase(interior, y);
      std::vector<std::vector<LatticePoint>> classes{{y}, {}};
      for (const auto& p : cwalk::outer_shell(interior))
        if (p != y && !p.is_origin()) classes[1].push_back(p);
      const auto sol = cwalk::solve_hitting_exact(k, interior, classes, WalkKind::kConditioned);
      const auto xr = static_cast<std::int64_t>(std::llround(cwalk::excursion_inner_radius(n)));
      for (LatticePoint x : {LatticePoint{yo, 1}, LatticePoint{-xr, 0}, LatticePoint{xr / 2, xr / 2}}) {
        if (x == y) continue;
        const double exact = sol.at(x, 0);
        const auto p = cwalk::excursion_hit_prob(k, x, y, n);
        const double rel = std::abs(exact - p.value) / p.value;
        const double c = rel * l * l * l;
        worst = std::max(worst, c);
        rows.push_back({{"n", n}, {"x", {x.x, x.y}}, {"y", {y.x, y.y}}, {"exact", exact},
                        {"formula", p.value}, {"rel_error", rel}, {"required", c}});
      }
    }
  }
  return {{"constant", "kExcursion"}, {"required", worst}, {"rows", rows}};
}

}  // namespace

int main() {
  const auto k = cwalk::PotentialKernel::build(200);
  Json out = Json::array();
  out.push_back(calibrate_srw_hit(k));
  out.push_back(calibrate_exit(k));
  out.push_back(calibrate_escape(k));
  out.push_back(calibrate_excursion(k));
  std::cout << out.dump(2) << "\n";
  for (const auto& c : out)
    std::cerr << c["constant"].get<std::string>() << " required " << c["required"].get<double>() << "\n";
}
