#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cwalk/excursions.hpp"
#include "cwalk/kernel.hpp"
#include "cwalk/lattice.hpp"
#include "cwalk/region.hpp"

namespace cwalk {

using Json = nlohmann::ordered_json;

/// Result document of one experiment: experiment_id, version, seed, params,
/// samples[], summary{}.
struct ExperimentRun {
  std::string experiment_id;
  std::uint64_t seed = 0;
  Json params = Json::object();
  std::vector<Json> samples;
  Json summary = Json::object();
  /// Set when a threshold given in the parameters is violated.
  bool threshold_violated = false;

  Json to_json() const;
  /// Serialized document, two-space indent, trailing newline.
  std::string dump() const;
};

/// Finite site set from "circle:r", "annulus:r1,r2" (r1 < |p| <= r2) or
/// "points:file" (one "x,y" per line). "axis" is an infinite family and is
/// rejected here.
std::vector<LatticePoint> parse_site_set(const std::string& spec);

/// Runs fn(i) for i in [0, count) on `threads` workers; results keep index
/// order, so output never depends on scheduling.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);

struct UniformLawParams {
  double n = 64;
  std::string set_spec = "circle:64";
  std::size_t samples = 500;
  double m0 = 1.0;
  ChainMode mode = ChainMode::kDirect;
  PsiSource psi = PsiSource::kLeading;
  bool fast = true;
  LatticePoint start{1, 0};
  unsigned threads = 1;
  std::optional<double> ks_threshold;
};

/// For each sample, the vacant fraction V(A) of an excursion chain from
/// start; summary holds the KS distance to Uniform[0,1], the DKW band, the
/// empirical CDF, l_A and the two terms of the theoretical bound.
ExperimentRun run_uniform_law(const PotentialKernel& kernel, const UniformLawParams& params,
                              std::uint64_t seed);

struct BigHolesParams {
  std::string region_spec = "box:0.5,1,0.5,1";
  double c3 = 0.1;
  std::vector<int> scales{1, 2, 3};
  std::size_t samples = 10'000;
  bool fast = true;
  LatticePoint start{1, 0};
  unsigned threads = 1;
  std::optional<double> p_avoid_min;
};

/// Per sample, one walk tracked across the scales 2^{3n}: whether it crosses
/// from the boundary of B(2^{3(n-1)}) to that of B(2^{3n}) avoiding
/// 2^{3n-1} G, and whether it afterwards stays outside B(2^{3n-1}) forever
/// (resolved by Bernoulli draws past 2^{3 max + 3}). Throws
/// std::invalid_argument when G surrounds the origin.
ExperimentRun run_big_holes(const PotentialKernel& kernel, const BigHolesParams& params,
                            std::uint64_t seed);

struct RecurrenceParams {
  int scales = 8;
  double base_radius = 16;
  /// Axis points per scale entering the second-moment bound; 1 is the plain
  /// single-target schedule.
  int points_per_scale = 64;
  double radius_cap = 0x1.0p52;
  std::size_t samples = 200;
  /// Finite set for the transience check, and the number of walks for it.
  std::vector<LatticePoint> finite_set{{5, 0}};
  std::size_t finite_runs = 200;
  LatticePoint start{1, 0};
  unsigned threads = 1;
  std::optional<double> hit_threshold;
};

struct ScheduleScale {
  double inner = 0.0;  // R_{k-1}
  double outer = 0.0;  // R_k
  std::vector<LatticePoint> targets;
  double bound = 0.0;  // min over starts of the formula lower bound
};

/// Adaptive schedule on the positive x-axis: for each scale the outer radius
/// doubles until, for every start on the inner circle (256 angles), the
/// second-moment lower bound (sum p)^2 / sum P[both] on hitting one of the
/// targets before the outer circle is >= 1/3. Throws ResourceError naming
/// the scale when the cap is exceeded.
std::vector<ScheduleScale> recurrence_schedule(const PotentialKernel& kernel,
                                               const RecurrenceParams& params);

ExperimentRun run_recurrence(const PotentialKernel& kernel, const RecurrenceParams& params,
                             std::uint64_t seed);

/// max over k of (sum_{i<=k} p_i)^2 / sum_{i,j<=k} pjoint_ij. Throws
/// std::invalid_argument for an inconsistent matrix.
double kochen_stone_bound(const std::vector<double>& p, const std::vector<std::vector<double>>& pjoint);

}  // namespace cwalk
