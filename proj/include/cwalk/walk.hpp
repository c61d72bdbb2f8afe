#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <optional>
#include <span>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "cwalk/kernel.hpp"
#include "cwalk/lattice.hpp"
#include "cwalk/rng.hpp"

namespace cwalk {

enum class WalkKind { kSimple, kConditioned };

std::string_view walk_kind_name(WalkKind kind);

enum class StopReason { kHitTarget, kExitedRadius, kEnteredRadius, kStepCap, kResolvedNeverReturn };

std::string_view stop_reason_name(StopReason reason);

/// Transition law of the conditioned walk out of one site.
struct StepDistribution {
  LatticePoint origin_site;
  std::array<LatticePoint, 4> destinations;
  std::array<double, 4> weights;
};

/// Weights a(y) / (4 a(x)) over the four neighbours y of x. Throws
/// std::invalid_argument for the origin.
StepDistribution conditioned_step(const PotentialKernel& kernel, LatticePoint x);

/// Membership and distance queries over a finite site set. Dense bitmap over
/// the bounding box when it is small enough, hash set otherwise.
class SiteIndex {
 public:
  SiteIndex() = default;
  explicit SiteIndex(std::span<const LatticePoint> sites);

  /// Position of p in sites(), or -1.
  std::int64_t index_of(LatticePoint p) const;
  bool contains(LatticePoint p) const { return index_of(p) >= 0; }
  std::size_t size() const { return sites_.size(); }
  bool empty() const { return sites_.empty(); }
  const std::vector<LatticePoint>& sites() const { return sites_; }

  /// A value no larger than the distance from p to the nearest site.
  double distance_lower_bound(LatticePoint p) const;

  double min_norm() const { return min_norm_; }
  double max_norm() const { return max_norm_; }

 private:
  std::vector<LatticePoint> sites_;
  std::int64_t x0_ = 0, y0_ = 0, width_ = 0, height_ = 0;
  std::vector<std::int32_t> grid_;  // index + 1, 0 when absent
  std::vector<std::pair<LatticePoint, std::int64_t>> sparse_;  // sorted fallback
  double min_norm_ = 0.0, max_norm_ = 0.0;
};

struct EnterRule {
  PlanePoint center{};
  double radius = 0.0;
};

/// Stopping rules checked after every move; the first satisfied one wins.
struct StoppingSpec {
  std::optional<LatticePoint> target_site;
  const SiteIndex* target_set = nullptr;
  /// Stop once |x| > exit_radius.
  std::optional<double> exit_radius;
  /// Stop once |x - center| <= radius.
  std::optional<EnterRule> enter;
  /// Stop on reaching the internal boundary of B(radius) around the origin
  /// (reported as a target hit).
  std::optional<double> reach_boundary;
  std::uint64_t step_cap = 100'000'000;

  /// Throws std::invalid_argument when no rule is present or step_cap == 0.
  void validate() const;
};

struct WalkOptions {
  WalkKind kind = WalkKind::kConditioned;
  /// Distant-jump acceleration: when every target (sites, and the origin for
  /// the conditioned walk) is at distance d >= jump_clearance, the walk
  /// inside B(x, d/2) is replaced by one draw of its exit point.
  bool fast = false;
  double jump_clearance = 64.0;
  /// Smallest jump radius used when the binding constraint is a stopping
  /// radius rather than a target.
  double min_jump_radius = 4.0;
};

/// Marks which sites of a watched set the walk visits.
class VisitTracker {
 public:
  explicit VisitTracker(const SiteIndex& sites) : sites_(&sites), hit_(sites.size(), 0) {}

  void mark(LatticePoint p) {
    const auto i = sites_->index_of(p);
    if (i >= 0 && !hit_[static_cast<std::size_t>(i)]) {
      hit_[static_cast<std::size_t>(i)] = 1;
      ++count_;
    }
  }
  const SiteIndex& sites() const { return *sites_; }
  bool hit(std::size_t i) const { return hit_[i] != 0; }
  std::size_t count() const { return count_; }
  /// Fraction of watched sites not yet visited.
  double vacant_fraction() const {
    return 1.0 - static_cast<double>(count_) / static_cast<double>(hit_.size());
  }

 private:
  const SiteIndex* sites_;
  std::vector<std::uint8_t> hit_;
  std::size_t count_ = 0;
};

struct WalkOutcome {
  LatticePoint end;
  StopReason reason = StopReason::kStepCap;
  std::uint64_t steps = 0;
  std::uint64_t jumps = 0;
};

/// Optional recording of every position (jump landings included).
struct PathRecorder {
  std::vector<LatticePoint> points;
  std::vector<std::size_t> jump_landings;  // indices into points
};

/// Step engine for the simple and the conditioned walk.
class Walker {
 public:
  Walker(const PotentialKernel& kernel, WalkOptions options);

  const WalkOptions& options() const { return options_; }
  const PotentialKernel& kernel() const { return *kernel_; }

  /// One nearest-neighbour move.
  LatticePoint step(LatticePoint x, RandomSource& rng) const;

  /// Exit site of B(x, radius) drawn from the uniform law on the circle and,
  /// for the conditioned walk, reweighted by a(exit)/a(x) with rejection.
  LatticePoint jump(LatticePoint x, double radius, RandomSource& rng) const;

  /// Runs from start until a stopping rule fires. The start site is marked in
  /// the tracker but not tested against the rules (hitting-time convention).
  WalkOutcome run(LatticePoint start, const StoppingSpec& stop, RandomSource& rng,
                  VisitTracker* tracker = nullptr, PathRecorder* recorder = nullptr) const;

 private:
  double jump_radius(LatticePoint x, const StoppingSpec& stop, const VisitTracker* tracker) const;

  const PotentialKernel* kernel_;
  WalkOptions options_;
};

struct Trajectory {
  LatticePoint start;
  std::vector<LatticePoint> steps;
  /// Indices into steps that are jump landings (not lattice neighbours of
  /// their predecessor). Empty for naive runs.
  std::vector<std::size_t> jump_landings;
  StopReason stop_reason = StopReason::kStepCap;

  /// Distinct sites among start and steps.
  std::unordered_set<LatticePoint, LatticePointHash> visited() const;
  LatticePoint end() const { return steps.empty() ? start : steps.back(); }
};

/// Throws std::invalid_argument when a conditioned walk starts at the origin
/// or the radii are inconsistent with the start.
Trajectory sample_path(const PotentialKernel& kernel, LatticePoint start, const StoppingSpec& stop,
                       WalkKind kind, RandomSource& rng, const WalkOptions& options = {});

/// Outcome of replacing "the walk from z ever re-enters B(inner_radius)" by
/// a Bernoulli draw.
struct DecisionRecord {
  LatticePoint from;
  double inner_radius = 0.0;
  bool never_returns = false;
  double probability_used = 0.0;
  double bias_bound = 0.0;
  double uniform = 0.0;  // the draw; never_returns == (uniform < probability_used)
};

/// p = 1 - a(inner_radius)/a(z) with a(inner_radius) the real-argument
/// asymptotic form. Requires |z| > inner_radius >= 1.
DecisionRecord resolve_never_return(const PotentialKernel& kernel, LatticePoint z,
                                    double inner_radius, RandomSource& rng);

/// Same decision from an externally drawn uniform.
DecisionRecord resolve_never_return_with(const PotentialKernel& kernel, LatticePoint z,
                                         double inner_radius, double uniform);

struct ReentrySample {
  LatticePoint site;
  std::uint64_t rejections = 0;
  double reject_radius = 0.0;
  /// Share of returning paths excluded because they pass reject_radius first.
  double residual_bias = 0.0;
};

struct ReentryOptions {
  /// Reject radius R' solves a(R') = factor * a(|z|).
  double reject_factor = 2.0;
  /// Explicit reject radius; overrides reject_factor when set.
  std::optional<double> reject_radius;
  std::uint64_t max_rejections = 10'000;
  WalkOptions walk{WalkKind::kConditioned, true};
};

/// Entrance site on the boundary of B(inner_radius) of the conditioned walk
/// from z, given that it returns. Rejection sampler: run the walk until it
/// enters B(inner_radius) (accept) or leaves B(reject_radius) (restart).
/// Requires |z| > inner_radius >= 2. Throws std::runtime_error after
/// max_rejections restarts.
ReentrySample sample_reentry_point(const PotentialKernel& kernel, LatticePoint z,
                                   double inner_radius, RandomSource& rng,
                                   const ReentryOptions& options = {});

/// Rows "step,x,y"; step 0 is the start.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);

/// One JSON object, no trailing newline.
std::string decision_to_json(const DecisionRecord& record);

}  // namespace cwalk
