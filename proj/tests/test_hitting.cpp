#include <doctest.h>

#include <cwalk/errors.hpp>
#include <cwalk/exact_solver.hpp>
#include <cwalk/hitting.hpp>
#include <cwalk/kernel.hpp>
#include <cwalk/rng.hpp>
#include <cwalk/stats.hpp>
#include <cwalk/walk.hpp>

#include <cmath>
#include <numbers>

using namespace cwalk;

namespace {

const PotentialKernel& kernel200() {
  static const PotentialKernel k = PotentialKernel::build(200);
  return k;
}

std::vector<LatticePoint> annulus(double r, double R) {
  std::vector<LatticePoint> out;
  const auto e = static_cast<std::int64_t>(R);
  for (std::int64_t x = -e; x <= e; ++x)
    for (std::int64_t y = -e; y <= e; ++y) {
      const LatticePoint p{x, y};
      if (p.norm() > r && p.norm() <= R) out.push_back(p);
    }
  return out;
}

// Absorbing classes for "leave B(R)" (class 0) and everything else (class 1).
std::vector<std::vector<LatticePoint>> exit_vs_inner(std::span<const LatticePoint> interior, double R,
                                                     bool drop_origin) {
  std::vector<std::vector<LatticePoint>> classes(2);
  for (const auto& p : outer_shell(interior)) {
    if (p.norm() > R) classes[0].push_back(p);
    else if (!(drop_origin && p.is_origin())) classes[1].push_back(p);
  }
  return classes;
}

}  // namespace

TEST_CASE("return to the same site") {
  const auto& k = kernel200();
  CHECK(prob_return_same_site(k, {1, 0}) == 0.5);
  CHECK(std::abs(prob_return_same_site(k, {1, 1}) - (1.0 - std::numbers::pi / 8.0)) <= 1e-12);
  CHECK(prob_return_same_site(k, {1'000'000, 0}) > 0.9);
  CHECK(prob_return_same_site(k, {1'000'000, 0}) < 1.0);
  CHECK_THROWS_AS(prob_return_same_site(k, {0, 0}), std::invalid_argument);
}

TEST_CASE("hit another site") {
  const auto& k = kernel200();
  CHECK(std::abs(prob_hit_other_site(k, {1, 0}, {2, 0}) - (2.0 - 4.0 / std::numbers::pi)) <= 1e-12);
  CHECK(std::abs(k({2, 2}) - 16.0 / (3.0 * std::numbers::pi)) <= 1e-12);
  CHECK(std::abs(prob_hit_other_site(k, {1, 1}, {-1, -1}) - 1.0 / 3.0) <= 1e-12);
  CHECK(std::abs(prob_hit_other_site(k, {1, 0}, {100'000'000, 0}) - 0.5) <= 1e-6);
  CHECK_THROWS_AS(prob_hit_other_site(k, {1, 0}, {1, 0}), std::invalid_argument);
  CHECK_THROWS_AS(prob_hit_other_site(k, {1, 0}, {0, 0}), std::invalid_argument);
}

TEST_CASE("hit another site against the exact solver") {
  // P_x[ever hit y] = lim_R P_x[hit y before leaving B(R)]; at R = 120 the
  // remainder is P_x[exit first] * P[return from distance 120] ~ small.
  const auto& k = kernel200();
  const LatticePoint y{3, -2};
  auto interior = annulus(0.0, 120.0);
  std::erase(interior, y);
  std::vector<std::vector<LatticePoint>> classes{{y}, {}};
  for (const auto& p : outer_shell(interior))
    if (p != y && !p.is_origin()) classes[1].push_back(p);
  const auto sol = solve_hitting_exact(k, interior, classes, WalkKind::kConditioned);
  for (LatticePoint x : {LatticePoint{1, 0}, LatticePoint{5, 5}, LatticePoint{-4, 1}}) {
    const double before = sol.at(x, 0);
    const double ever = prob_hit_other_site(k, x, y);
    CHECK(before <= ever + 1e-12);
    // Upper bound: exit first, then hit y from outside with probability <= 1/2 + slack.
    CHECK(ever - before <= 0.6 * sol.at(x, 1));
  }
}

TEST_CASE("simple walk hit before exit") {
  const auto& k = kernel200();
  CHECK(std::abs(asymptotic_a(1000.0) - 5.42699) <= 1e-5);
  const auto f = srw_hit_before_exit(k, {1, 0}, {0, 0}, 1000.0);
  CHECK(std::abs(f.value - (1.0 - 1.0 / 5.42699)) <= 1e-5);
  CHECK(std::abs(f.value - 0.8157) <= 1e-4);
  CHECK(srw_hit_before_exit(k, {1, 0}, {0, 0}, 1e15).value > srw_hit_before_exit(k, {1, 0}, {0, 0}, 1e6).value);
  CHECK_THROWS_AS(srw_hit_before_exit(k, {30, 0}, {0, 0}, 40.0), std::invalid_argument);
  CHECK_THROWS_AS(srw_hit_before_exit(k, {1, 0}, {1, 0}, 40.0), std::invalid_argument);

  // Exact solve on B(40) for |x - y| <= 5.
  for (LatticePoint y : {LatticePoint{0, 0}, LatticePoint{7, -3}}) {
    auto interior = annulus(-1.0, 40.0);
    std::erase(interior, y);
    std::vector<std::vector<LatticePoint>> classes{{y}, {}};
    for (const auto& p : outer_shell(interior))
      if (p != y) classes[1].push_back(p);
    const auto sol = solve_hitting_exact(k, interior, classes, WalkKind::kSimple);
    for (std::int64_t dx = -4; dx <= 4; ++dx)
      for (std::int64_t dy = -3; dy <= 3; ++dy) {
        const LatticePoint x = y + LatticePoint{dx, dy};
        if (x == y || (x - y).norm() > 5.0 || x.norm() > 20.0) continue;
        const auto p = srw_hit_before_exit(k, x, y, 40.0);
        CHECK(std::abs(p.value - sol.at(x, 0)) <= 2e-2);
        CHECK(std::abs(p.value - sol.at(x, 0)) <= p.error_bound);
      }
  }
}

TEST_CASE("simple walk hit before exit against Monte Carlo at R = 1000") {
  const auto& k = kernel200();
  const auto f = srw_hit_before_exit(k, {1, 0}, {0, 0}, 1000.0);
  StoppingSpec stop;
  stop.target_site = LatticePoint{0, 0};
  stop.exit_radius = 1000.0;
  const Walker w(k, {WalkKind::kSimple, true});
  const std::size_t m = 20000;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < m; ++i) {
    RandomSource rng(21, i);
    hits += w.run({1, 0}, stop, rng).reason == StopReason::kHitTarget;
  }
  const auto p = stats::proportion(hits, m);
  CHECK(std::abs(p.mean - f.value) <= 3.0 * p.standard_error + f.error_bound);
}

TEST_CASE("conditioned exit before inner ball") {
  const auto& k = kernel200();
  const auto at_r = cond_exit_before_inner(k, {10, 0}, 10.0, 1000.0);
  CHECK(at_r.value <= at_r.error_bound + 1e-2);
  const auto at_R = cond_exit_before_inner(k, {1000, 0}, 10.0, 1000.0);
  CHECK(std::abs(at_R.value - 1.0) <= at_R.error_bound + 1e-12);
  CHECK_THROWS_AS(cond_exit_before_inner(k, {5, 0}, 10.0, 1000.0), std::invalid_argument);
  CHECK_THROWS_AS(cond_exit_before_inner(k, {50, 0}, 1.0, 1000.0), std::invalid_argument);

  for (auto [r, R] : {std::pair{3.0, 45.0}, {12.0, 110.0}}) {
    const auto interior = annulus(r, R);
    const auto sol = solve_hitting_exact(k, interior, exit_vs_inner(interior, R, true), WalkKind::kConditioned);
    for (LatticePoint x : {LatticePoint{static_cast<std::int64_t>(2 * r), 3}, LatticePoint{-17, 19}}) {
      const auto p = cond_exit_before_inner(k, x, r, R);
      CHECK(std::abs(p.value - sol.at(x, 0)) <= p.error_bound);
    }
  }
}

TEST_CASE("conditioned exit before inner ball against Monte Carlo") {
  const auto& k = kernel200();
  const auto f = cond_exit_before_inner(k, {100, 0}, 10.0, 1000.0);
  StoppingSpec stop;
  stop.exit_radius = 1000.0;
  stop.enter = EnterRule{{0.0, 0.0}, 10.0};
  const Walker w(k, {WalkKind::kConditioned, true});
  const std::size_t m = 100000;
  std::size_t out = 0;
  for (std::size_t i = 0; i < m; ++i) {
    RandomSource rng(22, i);
    out += w.run({100, 0}, stop, rng).reason == StopReason::kExitedRadius;
  }
  const auto p = stats::proportion(out, m);
  CHECK(std::abs(p.mean - f.value) <= 3.0 * p.standard_error + f.error_bound);
}

TEST_CASE("never hit a disk") {
  const auto& k = kernel200();
  const auto at_r = cond_never_hit_disk(k, {7, 0}, 7.0);
  CHECK(at_r.value <= at_r.error_bound);
  const auto n1 = cond_never_hit_disk(k, {1, 1}, 1.0);
  CHECK(std::abs(n1.value - (1.0 - std::numbers::pi / 4.0)) <= n1.error_bound);
  // n = 1e4: x on the outer excursion circle, r the inner one.
  const double n = 1e4;
  const auto R = static_cast<std::int64_t>(std::llround(excursion_outer_radius(n)));
  const auto v = cond_never_hit_disk(k, {R, 0}, excursion_inner_radius(n));
  CHECK(std::abs(v.value - psi_exact(n).value) <= v.error_bound + psi_exact(n).error_bound);
  CHECK(std::abs(v.value - (1.0 - asymptotic_a(excursion_inner_radius(n)) / k({R, 0}))) <= 1e-15);
  CHECK_THROWS_AS(cond_never_hit_disk(k, {3, 0}, 5.0), std::invalid_argument);
}

TEST_CASE("never hit a disk against two-radius Dirichlet elimination") {
  // v(x) = a(x) - E_x[a at entry of B(r)] is the SRW potential of the disk;
  // P_x[never enter] = v(x)/a(x). Solving with two outer radii eliminates
  // the constant that v - a tends to.
  const auto& k = kernel200();
  const double r = 4.0;
  auto part = [&](double R, bool with_a) {
    return solve_dirichlet(k, annulus(r, R), WalkKind::kSimple, [&](LatticePoint p) {
      return p.norm() > R ? (with_a ? k(p) : 1.0) : 0.0;
    });
  };
  const auto a1 = part(90.0, true), o1 = part(90.0, false);
  const auto a2 = part(140.0, true), o2 = part(140.0, false);
  for (LatticePoint x : {LatticePoint{6, 2}, LatticePoint{-13, 9}, LatticePoint{0, 25}}) {
    const double c = (a1.at(x) - a2.at(x)) / (o1.at(x) - o2.at(x));
    const double exact = (a2.at(x) - c * o2.at(x)) / k(x);
    const auto p = cond_never_hit_disk(k, x, r);
    CHECK(std::abs(p.value - exact) <= p.error_bound);
  }
}

TEST_CASE("excursion hit formula") {
  const auto& k = kernel200();
  CHECK(excursion_hit_prob(k, {500, 0}, {500, 0}, 1000.0).value == 1.0);
  CHECK(std::abs(excursion_hit_leading(1000.0).value - 0.2799) <= 2e-4);
  CHECK_THROWS_AS(excursion_hit_prob(k, {500, 0}, {50, 0}, 1000.0), std::invalid_argument);
  CHECK_THROWS_AS(excursion_hit_prob(k, {500, 0}, {5000, 0}, 1000.0), std::invalid_argument);
  CHECK_THROWS_AS(excursion_hit_prob(k, {500, 0}, {600, 0}, 10.0), std::invalid_argument);
  CHECK_THROWS_AS(excursion_hit_leading(8.0), std::invalid_argument);

  // The leading forms are approached slowly from below.
  double last = 0.0;
  for (double n : {1e3, 1e5, 1e7, 1e9, 1e11}) {
    const auto xr = static_cast<std::int64_t>(std::llround(excursion_inner_radius(n)));
    const double ratio = excursion_hit_prob(k, {xr, 0}, {static_cast<std::int64_t>(n / 2), 0}, n).value /
                         excursion_hit_leading(n).value;
    CHECK(ratio > last);
    CHECK(ratio < 1.0);
    last = ratio;
  }
  CHECK(excursion_hit_leading_near(1000.0, 2.0).value ==
        doctest::Approx((2.0 * std::log(std::log(1000.0)) + std::log(2.0)) / std::log(1000.0)));
}

TEST_CASE("excursion hit formula against the exact solver") {
  const auto& k = kernel200();
  const double n = 17.0;
  const double R = excursion_outer_radius(n);
  for (LatticePoint y : {LatticePoint{9, 4}, LatticePoint{-12, -5}}) {
    auto interior = annulus(0.0, R);
    std::erase(interior, y);
    std::vector<std::vector<LatticePoint>> classes{{y}, {}};
    for (const auto& p : outer_shell(interior))
      if (p != y && !p.is_origin()) classes[1].push_back(p);
    const auto sol = solve_hitting_exact(k, interior, classes, WalkKind::kConditioned);
    for (LatticePoint x : {LatticePoint{30, -31}, LatticePoint{-8, 40}, LatticePoint{10, 7}}) {
      const auto p = excursion_hit_prob(k, x, y, n);
      CHECK(std::abs(p.value - sol.at(x, 0)) <= p.error_bound);
    }
  }
}

TEST_CASE("two-target split") {
  auto t = two_target_split(0.3, 0.4, 0.0, 0.0);
  CHECK(t.p1 == 0.3);
  CHECK(t.p2 == 0.4);
  t = two_target_split(0.3, 0.3, 0.5, 0.5);
  CHECK(t.p1 == doctest::Approx(0.3 / 1.5));
  CHECK(t.p2 == doctest::Approx(0.3 / 1.5));
  CHECK_THROWS_AS(two_target_split(0.3, 0.3, 1.0, 1.0), SingularInputError);
  CHECK_THROWS_AS(two_target_split(1.3, 0.3, 0.1, 0.1), InconsistentInputError);
  CHECK_THROWS_AS(two_target_split(0.1, 0.9, 0.0, 0.9), InconsistentInputError);
}

TEST_CASE("two-target split against exact first-hit probabilities") {
  // SRW in B(50), targets 0 and y.
  const auto& k = kernel200();
  const LatticePoint t1{0, 0}, t2{0, 3}, x{3, 0};
  auto hit_one = [&](LatticePoint target) {
    auto interior = annulus(-1.0, 50.0);
    std::erase(interior, target);
    std::vector<std::vector<LatticePoint>> classes{{target}, {}};
    for (const auto& p : outer_shell(interior))
      if (p != target) classes[1].push_back(p);
    return solve_hitting_exact(k, interior, classes, WalkKind::kSimple);
  };
  const auto s1 = hit_one(t1), s2 = hit_one(t2);
  // q12: from target 1 hit target 2 before exit; one step then solve.
  double q12 = 0.0, q21 = 0.0;
  for (auto nb : t1.neighbours()) q12 += (nb == t2 ? 1.0 : s2.at(nb, 0)) / 4.0;
  for (auto nb : t2.neighbours()) q21 += (nb == t1 ? 1.0 : s1.at(nb, 0)) / 4.0;
  const auto t = two_target_split(s1.at(x, 0), s2.at(x, 0), q12, q21);

  auto interior = annulus(-1.0, 50.0);
  std::erase(interior, t1);
  std::erase(interior, t2);
  std::vector<std::vector<LatticePoint>> classes{{t1}, {t2}, {}};
  for (const auto& p : outer_shell(interior))
    if (p != t1 && p != t2) classes[2].push_back(p);
  const auto both = solve_hitting_exact(k, interior, classes, WalkKind::kSimple);
  CHECK(std::abs(t.p1 - both.at(x, 0)) <= 1e-9);
  CHECK(std::abs(t.p2 - both.at(x, 1)) <= 1e-9);
}

TEST_CASE("excursion escape probability") {
  CHECK(std::abs(psi_n(1e4).value - 2.220327 / 13.650994) <= 1e-6);
  CHECK(std::abs(psi_n(1e4).value - 0.162649) <= 1e-6);
  CHECK(psi_n(1e100).value < psi_n(1e10).value);
  CHECK(psi_n(1e300).value < 0.01);
  CHECK_THROWS_AS(psi_n(10.0), std::invalid_argument);
  CHECK_THROWS_AS(psi_exact(10.0), std::invalid_argument);
  // Cross-check with the never-hit formula averaged over the outer circle.
  const auto& k = kernel200();
  const double n = 256.0;
  const auto R = excursion_outer_radius(n);
  const auto sites = boundary_sites(ball_at_origin(R));
  double mean = 0.0, err = 0.0;
  for (const auto& z : sites) {
    const auto p = cond_never_hit_disk(k, z, excursion_inner_radius(n));
    mean += p.value;
    err = std::max(err, p.error_bound);
  }
  mean /= static_cast<double>(sites.size());
  CHECK(std::abs(mean - psi_n(n).value) <= psi_n(n).error_bound + err);
  CHECK(std::abs(mean - psi_exact(n).value) <= psi_exact(n).error_bound + err);
}

TEST_CASE("exact solver basics") {
  const auto& k = kernel200();
  const auto interior = annulus(1.0, 30.0);
  const auto sol = solve_hitting_exact(k, interior, exit_vs_inner(interior, 30.0, false), WalkKind::kSimple);
  for (const auto& x : interior) CHECK(std::abs(sol.at(x, 0) + sol.at(x, 1) - 1.0) <= 1e-10);
  CHECK(sol.residual <= 1e-12);

  // SRW annulus: the inner class is the origin plus its neighbours on |x| <= 1.
  for (LatticePoint x : {LatticePoint{4, 3}, LatticePoint{-10, 2}}) {
    const auto p = srw_hit_before_exit(k, x, {0, 0}, 30.0);
    // Hitting B(1) happens no later than hitting 0.
    CHECK(sol.at(x, 1) >= p.value - p.error_bound);
  }

  CHECK_THROWS_AS(solve_hitting_exact(k, {}, {{LatticePoint{0, 0}}}, WalkKind::kSimple), std::invalid_argument);
  std::vector<std::vector<LatticePoint>> partial{{LatticePoint{40, 0}}};
  CHECK_THROWS_AS(solve_hitting_exact(k, interior, partial, WalkKind::kSimple), std::invalid_argument);
  auto overlap = exit_vs_inner(interior, 30.0, false);
  overlap[1].push_back(overlap[0].front());
  CHECK_THROWS_AS(solve_hitting_exact(k, interior, overlap, WalkKind::kSimple), std::invalid_argument);
  ExactSolverOptions small;
  small.max_sites = 100;
  CHECK_THROWS_AS(solve_hitting_exact(k, interior, exit_vs_inner(interior, 30.0, false), WalkKind::kSimple, small),
                  ResourceError);
}

TEST_CASE("optional stopping of 1/a for the conditioned walk") {
  const auto& k = kernel200();
  const auto interior = annulus(1.0, 30.0);
  const auto sol = solve_dirichlet(k, interior, WalkKind::kConditioned, [&](LatticePoint p) { return 1.0 / k(p); });
  RandomSource rng(23, 0);
  for (int i = 0; i < 50; ++i) {
    const auto x = interior[rng.below(interior.size())];
    CHECK(std::abs(sol.at(x) - 1.0 / k(x)) <= 1e-10);
  }
  // Hitting the four neighbours of the origin from (1,1).
  const auto hit = solve_hitting_exact(k, interior, exit_vs_inner(interior, 30.0, true), WalkKind::kConditioned);
  const auto outer = solve_dirichlet(k, interior, WalkKind::kConditioned,
                                     [&](LatticePoint p) { return p.norm() > 30.0 ? 1.0 / k(p) : 0.0; });
  const double pn = hit.at({1, 1}, 1);
  const double pout = hit.at({1, 1}, 0);
  CHECK(pn + pout == doctest::Approx(1.0));
  CHECK(std::abs(pn + outer.at({1, 1}) - 1.0 / k({1, 1})) <= 1e-10);
  CHECK(std::abs(pn - std::numbers::pi / 4.0) <= 0.1);
}
