#include <doctest.h>

#include <cwalk/errors.hpp>
#include <cwalk/kernel.hpp>
#include <cwalk/lattice.hpp>
#include <cwalk/rng.hpp>
#include <cwalk/simd.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <numbers>
#include <sstream>

using namespace cwalk;

namespace {

const PotentialKernel& kernel200() {
  static const PotentialKernel k = PotentialKernel::build(200);
  return k;
}

// a(n,n) = (4/pi) sum_{j<=n} 1/(2j-1)
double diagonal_closed_form(int n) {
  double s = 0.0;
  for (int j = 1; j <= n; ++j) s += 1.0 / (2.0 * j - 1.0);
  return 4.0 / std::numbers::pi * s;
}

}  // namespace

TEST_CASE("kernel values at small sites") {
  const auto& k = kernel200();
  CHECK(k({0, 0}) == 0.0);
  for (auto p : LatticePoint{0, 0}.neighbours()) CHECK(std::abs(k(p) - 1.0) <= 1e-12);
  CHECK(std::abs(k({1, 1}) - 4.0 / std::numbers::pi) <= 1e-12);
  CHECK(std::abs(k({2, 0}) - (4.0 - 8.0 / std::numbers::pi)) <= 1e-12);
  CHECK(std::abs(k({1, 1}) - 1.2732395447) <= 1e-10);
  CHECK(std::abs(k({2, 0}) - 1.4535209105) <= 1e-10);
}

TEST_CASE("kernel symmetric under the lattice group") {
  const auto& k = kernel200();
  for (std::int64_t x = -7; x <= 7; ++x)
    for (std::int64_t y = -7; y <= 7; ++y) {
      CHECK(k({x, y}) == k({y, x}));
      CHECK(k({x, y}) == k({-x, y}));
      CHECK(k({x, y}) == k({x, -y}));
    }
}

TEST_CASE("diagonal matches the odd harmonic sum") {
  const auto& k = kernel200();
  for (int n = 1; n <= 140; ++n) CHECK(std::abs(k({n, n}) - diagonal_closed_form(n)) <= 1e-12);
}

TEST_CASE("harmonic off the origin within radius 200") {
  const auto& k = kernel200();
  double worst = 0.0;
  for (std::int64_t x = -200; x <= 200; ++x)
    for (std::int64_t y = -200; y <= 200; ++y) {
      const LatticePoint p{x, y};
      if (p.is_origin() || p.norm() > 200.0) continue;
      double s = 0.0;
      for (auto q : p.neighbours()) s += k(q);
      worst = std::max(worst, std::abs(s / 4.0 - k(p)));
    }
  CHECK(worst <= 1e-10);
  // At the origin the mean of the neighbours is 1 = a(0) + 1.
  double s = 0.0;
  for (auto q : LatticePoint{0, 0}.neighbours()) s += k(q);
  CHECK(std::abs(s / 4.0 - 1.0) <= 1e-12);
}

TEST_CASE("asymptotic form") {
  CHECK(std::abs(kKappa - 1.02937370565457) <= 1e-13);
  CHECK(std::abs(asymptotic_a(1.0) - kKappa) <= 1e-15);
  CHECK(std::abs(asymptotic_a(std::exp(std::numbers::pi / 2)) - (1.0 + kKappa)) <= 1e-12);
  CHECK(std::abs(kGammaStar - 2.33275) <= 1e-5);
  CHECK_THROWS_AS(asymptotic_a(0.5), std::invalid_argument);

  const auto& k = kernel200();
  double worst = 0.0;
  for (std::int64_t x = 0; x <= 200; ++x)
    for (std::int64_t y = 0; y <= x; ++y) {
      const LatticePoint p{x, y};
      const double r = p.norm();
      if (r < 10.0 || r > 200.0) continue;
      worst = std::max(worst, std::abs(k(p) - asymptotic_a(r)) * r * r);
    }
  CHECK(worst <= 1.0);
  CHECK(k.asymptotic_constant() == doctest::Approx(worst).epsilon(1e-9));

  // Constant at |x| = 10 also bounds the error at |x| = 50.
  const double c10 = std::abs(k({10, 0}) - asymptotic_a(10.0)) * 100.0;
  CHECK(std::abs(k({50, 0}) - asymptotic_a(50.0)) <= c10 / 2500.0);
}

TEST_CASE("expansion beyond the table is within its error bound") {
  const auto& small = kernel200();
  const auto big = PotentialKernel::build(400);
  for (LatticePoint p : {LatticePoint{250, 0}, LatticePoint{210, 150}, LatticePoint{300, 299}, LatticePoint{0, 399}}) {
    CHECK_FALSE(small.tabulated(p));
    CHECK(big.tabulated(p));
    const auto q = small.query(p);
    CHECK_FALSE(q.exact);
    // The reference table itself is accurate to ~2e-14.
    CHECK(std::abs(q.value - big(p)) <= q.error_bound + 2e-14);
  }
  const auto t = small.query({3, 4});
  CHECK(t.exact);
  CHECK(t.error_bound == 0.0);
}

TEST_CASE("build argument and memory checks") {
  CHECK_THROWS_AS(PotentialKernel::build(1.5), std::invalid_argument);
  KernelBuildOptions tiny;
  tiny.memory_cap_bytes = 1024;
  CHECK_THROWS_AS(PotentialKernel::build(200, tiny), ResourceError);
}

TEST_CASE("kernel CSV round trip is exact") {
  const auto k = PotentialKernel::build(40);
  std::stringstream ss;
  k.write_csv(ss);
  const auto back = PotentialKernel::read_csv(ss);
  CHECK(back.extent() == k.extent());
  for (std::int64_t x = -40; x <= 40; ++x)
    for (std::int64_t y = -40; y <= 40; ++y) CHECK(back({x, y}) == k({x, y}));

  std::stringstream bad("x,y,a\n0,0,0\n1,0,1\n");
  CHECK_THROWS_AS(PotentialKernel::read_csv(bad), std::invalid_argument);
  std::stringstream noheader("0,0,0\n");
  CHECK_THROWS_AS(PotentialKernel::read_csv(noheader), std::invalid_argument);
}

TEST_CASE("kernel cache directory") {
  const auto dir = std::filesystem::temp_directory_path() / "cwalk_kernel_cache_test";
  std::filesystem::remove_all(dir);
  ::setenv("CWALK_KERNEL_CACHE", dir.c_str(), 1);
  const auto first = load_or_build_kernel(30);
  CHECK(std::filesystem::exists(dir / "kernel_30.csv"));
  const auto second = load_or_build_kernel(30);
  ::unsetenv("CWALK_KERNEL_CACHE");
  for (std::int64_t x = 0; x <= 30; ++x) CHECK(first({x, 7}) == second({x, 7}));
  std::filesystem::remove_all(dir);
}

TEST_CASE("ball boundaries") {
  const auto unit = boundary_sites(ball_at_origin(1.0));
  std::vector<LatticePoint> expect{{-1, 0}, {0, -1}, {0, 1}, {1, 0}};
  auto sorted = unit;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == expect);
  CHECK(boundary_sites(ball_at_origin(0.0)) == std::vector<LatticePoint>{{0, 0}});
  CHECK(boundary_sites(ball_at_origin(100.0)).size() == 564);
  for (const auto& p : boundary_sites(Ball{{0.5, -2.25}, 17.3})) {
    CHECK(Ball{{0.5, -2.25}, 17.3}.contains(p));
    CHECK(on_boundary(Ball{{0.5, -2.25}, 17.3}, p));
  }
  CHECK_THROWS_AS(ball_sites(ball_at_origin(-1.0)), std::invalid_argument);
}

TEST_CASE("SIMD variants agree bit for bit with scalar") {
  RandomSource rng(99, 0);
  for (std::size_t m : {4u, 8u, 64u, 260u}) {
    std::vector<double> w(m), re(m), im(m), c(m), s(m);
    for (std::size_t i = 0; i < m; ++i) {
      w[i] = rng.uniform();
      const double t = 3.0 * rng.uniform();
      re[i] = std::cos(5 * t);
      im[i] = std::sin(5 * t);
      c[i] = std::cos(t);
      s[i] = std::sin(t);
    }
    auto re0 = re, im0 = im;
    const double ref = simd::dot_and_rotate_scalar(w, re0, im0, c, s);
    for (auto isa : {simd::Isa::kAvx2, simd::Isa::kNeon}) {
      if (!simd::isa_supported(isa)) continue;
      auto re1 = re, im1 = im;
      CHECK(simd::dot_and_rotate(isa, w, re1, im1, c, s) == ref);
      CHECK(re1 == re0);
      CHECK(im1 == im0);
    }
  }
  std::vector<double> odd(3, 1.0), odd2(3, 1.0);
  CHECK_THROWS_AS(simd::dot_and_rotate(simd::Isa::kScalar, odd, odd2, odd2, odd, odd), std::invalid_argument);
  std::vector<double> four(4, 1.0), five(5, 1.0);
  CHECK_THROWS_AS(simd::dot_and_rotate(four, four, five, four, four), std::invalid_argument);
  CHECK(simd::isa_supported(simd::Isa::kScalar));
  CHECK(simd::isa_supported(simd::active_isa()));
}
