#include <doctest.h>

#include <cwalk/excursions.hpp>
#include <cwalk/hitting.hpp>
#include <cwalk/lattice.hpp>
#include <cwalk/stats.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

using namespace cwalk;

namespace {

const PotentialKernel& kernel200() {
  static const PotentialKernel k = PotentialKernel::build(200);
  return k;
}

constexpr int kChains = 2000;

struct Sample {
  std::vector<std::int64_t> counts;
  std::vector<std::int64_t> hats;
  std::vector<LatticePoint> entrances;
};

Sample run_chains(ChainMode mode, std::uint64_t seed) {
  const auto spec = AnnulusSpec::for_scale(64);
  Sample s;
  for (int i = 0; i < kChains; ++i) {
    RandomSource rng(seed, static_cast<std::uint64_t>(i));
    ExcursionOptions o;
    o.mode = mode;
    o.psi = PsiSource::kExact;
    const auto c = sample_excursion_chain(kernel200(), spec, {1, 0}, rng, o);
    s.counts.push_back(c.count);
    s.hats.push_back(c.hat_count);
    for (const auto& e : c.excursions) s.entrances.push_back(e.start);
  }
  return s;
}

const Sample& direct_sample() {
  static const Sample s = run_chains(ChainMode::kDirect, 31);
  return s;
}

const Sample& faithful_sample() {
  static const Sample s = run_chains(ChainMode::kPaperFaithful, 32);
  return s;
}

// Expected L1 distance between two independent empirical pmfs of m draws
// from the same geometric law.
double l1_noise_floor(double p, int m) {
  double f = 0.0;
  for (std::int64_t j = 1; j < 400; ++j) {
    const double q = stats::geometric_pmf(j, p);
    f += std::sqrt(4.0 / (std::numbers::pi * m)) * std::sqrt(q * (1.0 - q));
  }
  return f;
}

}  // namespace

TEST_CASE("annulus geometry") {
  const auto s = AnnulusSpec::for_scale(64);
  const double l = std::log(64.0);
  CHECK(s.r_in == doctest::Approx(64.0 * l));
  CHECK(s.r_out == doctest::Approx(64.0 * l * l));
  CHECK_THROWS_AS(AnnulusSpec::for_scale(15.0), std::invalid_argument);
}

TEST_CASE("direct chain structure") {
  const auto spec = AnnulusSpec::for_scale(64);
  const Ball inner = ball_at_origin(spec.r_in);
  for (std::uint64_t i = 0; i < 20; ++i) {
    RandomSource rng(5, i);
    const auto c = sample_excursion_chain(kernel200(), spec, {3, -2}, rng);
    CHECK(c.start == LatticePoint{3, -2});
    CHECK(c.initial_piece.start == c.start);
    CHECK(on_boundary(inner, c.initial_piece.end));
    REQUIRE(c.count >= 1);
    CHECK(c.count == static_cast<std::int64_t>(c.excursions.size()));
    CHECK(c.decisions.size() == c.excursions.size());
    CHECK(c.excursions.front().start == c.initial_piece.end);
    for (std::size_t k = 0; k < c.excursions.size(); ++k) {
      const auto& e = c.excursions[k];
      CHECK(on_boundary(inner, e.start));
      CHECK(e.end.norm() > spec.r_out);
      CHECK(e.end.norm() <= spec.r_out + 1.0);
      CHECK(c.decisions[k].from == e.end);
      CHECK(c.decisions[k].never_returns == (k + 1 == c.excursions.size()));
    }
    REQUIRE(c.resolved_tail.has_value());
    CHECK(c.resolved_tail->never_returns);
    CHECK(c.hat_count >= 1);
  }
}

TEST_CASE("paper_faithful forced count") {
  const auto spec = AnnulusSpec::for_scale(64);
  RandomSource rng(6, 0);
  ExcursionOptions o;
  o.mode = ChainMode::kPaperFaithful;
  o.forced_count = 4;
  const auto c = sample_excursion_chain(kernel200(), spec, {1, 0}, rng, o);
  CHECK(c.count == 4);
  CHECK(c.hat_count == 4);
  CHECK(c.decisions.back().never_returns);
  CHECK(std::count_if(c.decisions.begin(), c.decisions.end(),
                      [](const DecisionRecord& d) { return d.never_returns; }) == 1);
  o.forced_count = 0;
  CHECK_THROWS_AS(sample_excursion_chain(kernel200(), spec, {1, 0}, rng, o), std::invalid_argument);
}

TEST_CASE("count is geometric with the exact escape probability") {
  const double p = psi_exact(64).value;
  CHECK(psi_value(64, PsiSource::kExact) == p);
  for (const auto* s : {&direct_sample(), &faithful_sample()}) {
    std::vector<double> n(s->counts.begin(), s->counts.end());
    const auto m = stats::mean_estimate(n);
    const double sd = std::sqrt((1.0 - p) / (p * p) / kChains);
    CHECK(std::abs(m.mean - 1.0 / p) <= 4.0 * sd);
  }
  // faithful mode draws the count directly.
  CHECK(faithful_sample().counts == faithful_sample().hats);
}

TEST_CASE("direct and coupled counts rarely disagree") {
  const auto& s = direct_sample();
  std::size_t differ = 0;
  for (std::size_t i = 0; i < s.counts.size(); ++i) differ += s.counts[i] != s.hats[i];
  const double budget = coupling_error_budget(64);
  const auto f = stats::proportion(differ, s.counts.size());
  CHECK(f.mean <= budget + 3.0 * std::sqrt(budget / kChains));
}

TEST_CASE("two modes agree within budget plus sampling noise") {
  const double p = psi_exact(64).value;
  const double tv = stats::tv_distance(direct_sample().counts, faithful_sample().counts);
  // TV is half the L1 distance.
  CHECK(tv <= coupling_error_budget(64) + 0.5 * 1.5 * l1_noise_floor(p, kChains));
  CHECK(stats::tv_to_geometric(faithful_sample().counts, p) <= 0.5 * 1.5 * l1_noise_floor(p, kChains) * std::sqrt(0.5));
}

TEST_CASE("escape probability at n = 1e4") {
  CHECK(1.0 / psi_n(1e4).value == doctest::Approx(6.15).epsilon(0.01));
}

TEST_CASE("entrance measure") {
  const auto ball = ball_at_origin(10.0);
  const auto one = empirical_entrance_measure(std::vector<LatticePoint>{{10, 0}}, ball);
  REQUIRE(one.support.size() == 1);
  CHECK(one.masses[0] == 1.0);

  const std::vector<LatticePoint> several{{10, 0}, {0, 10}, {10, 0}, {-6, 8}};
  const auto m = empirical_entrance_measure(several, ball);
  CHECK(m.support.size() == 3);
  double total = 0.0;
  for (double w : m.masses) total += w;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-15));
  const auto it = std::find(m.support.begin(), m.support.end(), LatticePoint{10, 0});
  REQUIRE(it != m.support.end());
  CHECK(m.masses[static_cast<std::size_t>(it - m.support.begin())] == 0.5);

  CHECK_THROWS_AS(empirical_entrance_measure(std::vector<LatticePoint>{}, ball), std::invalid_argument);
  CHECK_THROWS_AS(empirical_entrance_measure(std::vector<LatticePoint>{{3, 3}}, ball), std::invalid_argument);
}

TEST_CASE("chain entrances are mirror symmetric") {
  const auto& e = direct_sample().entrances;
  std::vector<double> upper, lower;
  for (auto p : e) {
    if (p.y == 0) continue;
    const double t = std::atan2(std::abs(static_cast<double>(p.y)), static_cast<double>(p.x));
    (p.y > 0 ? upper : lower).push_back(t);
  }
  REQUIRE(upper.size() > 500);
  REQUIRE(lower.size() > 500);
  const double crit = 1.95 * std::sqrt(1.0 / upper.size() + 1.0 / lower.size());
  CHECK(stats::ks_two_sample(upper, lower) <= crit);
}

TEST_CASE("coupling budget") {
  const double b64 = coupling_error_budget(64), b256 = coupling_error_budget(256),
               b1024 = coupling_error_budget(1024);
  CHECK(b64 > b256);
  CHECK(b256 > b1024);
  const double l = std::log(256.0);
  CHECK(b256 == doctest::Approx(std::log(l) / (256.0 * l) / psi_exact(256).value).epsilon(1e-12));
  CHECK(b256 == doctest::Approx(0.007459).epsilon(1e-3));
  CHECK_THROWS_AS(coupling_error_budget(8), std::invalid_argument);
}

TEST_CASE("jsonl output is deterministic") {
  const auto spec = AnnulusSpec::for_scale(32);
  ExcursionOptions o;
  o.record_visited = true;
  auto dump = [&] {
    RandomSource rng(77, 3);
    std::ostringstream out;
    write_chain_jsonl(out, sample_excursion_chain(kernel200(), spec, {1, 0}, rng, o));
    return out.str();
  };
  const auto a = dump();
  CHECK(a == dump());
  CHECK(a.rfind("{\"index\":0,", 0) == 0);
  CHECK(a.find("\"distinct_sites\":null") == std::string::npos);
}

TEST_CASE("chain errors") {
  const auto spec = AnnulusSpec::for_scale(64);
  RandomSource rng(8, 0);
  CHECK_THROWS_AS(sample_excursion_chain(kernel200(), spec, {0, 0}, rng), std::invalid_argument);
  CHECK_THROWS_AS(sample_excursion_chain(kernel200(), spec, {300, 0}, rng), std::invalid_argument);

  ExcursionOptions o;
  o.fast = false;
  o.segment_step_cap = 10;
  try {
    sample_excursion_chain(kernel200(), spec, {1, 0}, rng, o);
    FAIL("expected ChainResourceError");
  } catch (const ChainResourceError& e) {
    CHECK(e.partial().spec.n == 64.0);
    CHECK(e.partial().count == 0);
  }
  CHECK_THROWS_AS(sample_excursion_chain(kernel200(), spec, {1, 0}, rng, o), ResourceError);
}

TEST_CASE("coverage of a watched disk") {
  const auto spec = AnnulusSpec::for_scale(32);
  const auto sites = ball_sites(ball_at_origin(15.0));
  const SiteIndex watch(sites);
  ExcursionOptions o;
  o.watch = &watch;
  RandomSource rng(9, 1);
  const auto c = sample_excursion_chain(kernel200(), spec, {2, 2}, rng, o);
  REQUIRE(c.coverage.ks.size() == static_cast<std::size_t>(c.count) + 1);
  CHECK(c.coverage.ks.front() == 0);
  CHECK(c.coverage.nonincreasing());
  CHECK(c.coverage.fractions.front() < 1.0);
  CHECK(c.coverage.fractions.back() >= 0.0);
  std::size_t marked = c.initial_piece.new_watched;
  for (const auto& e : c.excursions) marked += e.new_watched;
  CHECK(c.coverage.fractions.back() ==
        doctest::Approx(1.0 - static_cast<double>(marked) / static_cast<double>(sites.size())));
}
