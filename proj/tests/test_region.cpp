#include <doctest.h>

#include <cwalk/region.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>

using namespace cwalk;

namespace {

constexpr double kPi = std::numbers::pi;

// Every point of the polyline keeps clearance c3 from g.
double min_clearance(const RegionG& g, const std::vector<PlanePoint>& w) {
  double best = INFINITY;
  for (std::size_t i = 0; i + 1 < w.size(); ++i)
    for (int s = 0; s <= 20; ++s) {
      const double t = s / 20.0;
      best = std::min(best, g.distance({w[i].x + t * (w[i + 1].x - w[i].x), w[i].y + t * (w[i + 1].y - w[i].y)}));
    }
  return best;
}

}  // namespace

TEST_CASE("primitives") {
  const RegionG g({Box{0.5, 1, 0.5, 1}, Disk{{-3, 0}, 1}, AnnularSector{2, 3, 0, kPi / 2}}, "mix");
  CHECK(g.label() == "mix");
  CHECK(g.contains({0.75, 0.75}));
  CHECK(g.contains({-3.5, 0.2}));
  CHECK(g.contains({0, 2.5}));
  CHECK_FALSE(g.contains({0, -2.5}));
  CHECK_FALSE(g.contains({0, 0}));
  CHECK(g.distance({0.75, 0.75}) == 0.0);
  CHECK(g.distance({0.5, 0}) == doctest::Approx(0.5));
  CHECK(g.distance({-6, 0}) == doctest::Approx(2.0));
  CHECK(g.distance({0, -2.5}) == doctest::Approx(std::sqrt(15.25) - 1.0).epsilon(1e-12));
  CHECK(g.outer_radius() == doctest::Approx(4.0));
}

TEST_CASE("lattice sites of a scaled region") {
  const RegionG g({Box{0.5, 1, 0.5, 1}});
  const auto s = g.lattice_sites(4);
  CHECK(s == std::vector<LatticePoint>{{2, 2}, {2, 3}, {2, 4}, {3, 2}, {3, 3}, {3, 4}, {4, 2}, {4, 3}, {4, 4}});
  CHECK(g.lattice_sites(1).size() == 1);
  CHECK_THROWS_AS(g.lattice_sites(0), std::invalid_argument);
}

TEST_CASE("a box off the origin does not surround it") {
  const auto g = RegionG::parse("box:0.5,1,0.5,1");
  const auto r = surrounds_origin_check(g, 0.1);
  REQUIRE(r.ok);
  CHECK(r.c3 == 0.1);
  CHECK(r.c1 >= g.outer_radius());
  REQUIRE(r.witness.size() >= 2);
  CHECK(r.witness.front().x == 0.0);
  CHECK(r.witness.front().y == 0.0);
  CHECK(std::hypot(r.witness.back().x, r.witness.back().y) >= r.c1 - 1e-12);
  CHECK(min_clearance(g, r.witness) >= 0.1 - 1e-12);
  CHECK(r.path_length > 0.0);
}

TEST_CASE("a full ring surrounds the origin") {
  const RegionG ring({AnnularSector{1, 2, 0, 2 * kPi}});
  CHECK_FALSE(surrounds_origin_check(ring, 0.05).ok);
  CHECK_FALSE(surrounds_origin_check(RegionG::parse("disk:0,0,1"), 0.05).ok);
}

TEST_CASE("a ring with a gap lets the origin out") {
  const RegionG g({AnnularSector{1, 2, kPi / 6, 2 * kPi}});
  const auto r = surrounds_origin_check(g, 0.05);
  REQUIRE(r.ok);
  CHECK(min_clearance(g, r.witness) >= 0.05 - 1e-12);
  // The gap is about 0.5 wide at radius 1, too narrow for clearance 0.3.
  CHECK_FALSE(surrounds_origin_check(g, 0.3).ok);
}

TEST_CASE("region parsing") {
  const auto g = RegionG::parse("box:0,1,0,1;disk:5,5,1;sector:2,3,0,1.5");
  CHECK(g.parts().size() == 3);
  CHECK(std::holds_alternative<Disk>(g.parts()[1]));
  CHECK_THROWS_AS(RegionG::parse(""), std::invalid_argument);
  CHECK_THROWS_AS(RegionG::parse("box:1,0,0,1"), std::invalid_argument);
  CHECK_THROWS_AS(RegionG::parse("box:0,1,0"), std::invalid_argument);
  CHECK_THROWS_AS(RegionG::parse("disk:0,0,-1"), std::invalid_argument);
  CHECK_THROWS_AS(RegionG::parse("sector:3,2,0,1"), std::invalid_argument);
  CHECK_THROWS_AS(RegionG::parse("sector:2,3,1,0"), std::invalid_argument);
  CHECK_THROWS_AS(RegionG::parse("square:0,1"), std::invalid_argument);
  CHECK_THROWS_AS(RegionG::parse("box0,1,0,1"), std::invalid_argument);
  CHECK_THROWS_AS(RegionG::parse("box:a,1,0,1"), std::invalid_argument);
  CHECK_THROWS_AS(surrounds_origin_check(g, 0), std::invalid_argument);
  CHECK_THROWS_AS(surrounds_origin_check(RegionG{}, 0.1), std::invalid_argument);
}
