#include "cwalk/walk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "cwalk/calibration.hpp"
#include "cwalk/errors.hpp"
#include "cwalk/io.hpp"

namespace cwalk {

std::string_view walk_kind_name(WalkKind kind) {
  return kind == WalkKind::kSimple ? "simple" : "conditioned";
}

std::string_view stop_reason_name(StopReason reason) {
  switch (reason) {
    case StopReason::kHitTarget: return "hit-target";
    case StopReason::kExitedRadius: return "exited-radius";
    case StopReason::kEnteredRadius: return "entered-radius";
    case StopReason::kStepCap: return "step-cap";
    case StopReason::kResolvedNeverReturn: return "resolved-never-return";
  }
  return "unknown";
}

StepDistribution conditioned_step(const PotentialKernel& kernel, LatticePoint x) {
  if (x.is_origin()) throw std::invalid_argument("conditioned walk is undefined at the origin");
  StepDistribution d;
  d.origin_site = x;
  d.destinations = x.neighbours();
  const double ax = kernel(x);
  for (std::size_t i = 0; i < 4; ++i) d.weights[i] = kernel(d.destinations[i]) / (4.0 * ax);
  return d;
}

// ---------------------------------------------------------------------------
// SiteIndex

namespace {
constexpr std::int64_t kDenseCellLimit = 40'000'000;
constexpr double kThinningMinNorm2 = 16.0 * 16.0;
constexpr std::size_t kExactDistanceSites = 64;
}

SiteIndex::SiteIndex(std::span<const LatticePoint> sites) {
  std::vector<LatticePoint> unique(sites.begin(), sites.end());
  std::sort(unique.begin(), unique.end());
  unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
  sites_ = std::move(unique);
  if (sites_.empty()) return;
  std::int64_t x1 = sites_.front().x, y1 = sites_.front().y;
  x0_ = x1;
  y0_ = y1;
  min_norm_ = sites_.front().norm();
  max_norm_ = min_norm_;
  for (const auto& p : sites_) {
    x0_ = std::min(x0_, p.x);
    x1 = std::max(x1, p.x);
    y0_ = std::min(y0_, p.y);
    y1 = std::max(y1, p.y);
    min_norm_ = std::min(min_norm_, p.norm());
    max_norm_ = std::max(max_norm_, p.norm());
  }
  width_ = x1 - x0_ + 1;
  height_ = y1 - y0_ + 1;
  if (width_ <= kDenseCellLimit / height_ && sites_.size() < (std::size_t{1} << 31)) {
    grid_.assign(static_cast<std::size_t>(width_ * height_), 0);
    for (std::size_t i = 0; i < sites_.size(); ++i) {
      const auto& p = sites_[i];
      grid_[static_cast<std::size_t>((p.y - y0_) * width_ + (p.x - x0_))] =
          static_cast<std::int32_t>(i + 1);
    }
  }
}

std::int64_t SiteIndex::index_of(LatticePoint p) const {
  if (sites_.empty()) return -1;
  if (p.x < x0_ || p.y < y0_ || p.x >= x0_ + width_ || p.y >= y0_ + height_) return -1;
  if (!grid_.empty())
    return static_cast<std::int64_t>(
               grid_[static_cast<std::size_t>((p.y - y0_) * width_ + (p.x - x0_))]) - 1;
  const auto it = std::lower_bound(sites_.begin(), sites_.end(), p);
  if (it == sites_.end() || *it != p) return -1;
  return it - sites_.begin();
}

double SiteIndex::distance_lower_bound(LatticePoint p) const {
  if (sites_.empty()) return std::numeric_limits<double>::infinity();
  if (sites_.size() <= kExactDistanceSites) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& q : sites_) best = std::min(best, (p - q).norm2_real());
    return std::sqrt(best);
  }
  const double r = p.norm();
  double d = std::max({r - max_norm_, min_norm_ - r, 0.0});
  const double dx = std::max({static_cast<double>(x0_ - p.x), 0.0,
                              static_cast<double>(p.x - (x0_ + width_ - 1))});
  const double dy = std::max({static_cast<double>(y0_ - p.y), 0.0,
                              static_cast<double>(p.y - (y0_ + height_ - 1))});
  return std::max(d, std::hypot(dx, dy));
}

// ---------------------------------------------------------------------------
// StoppingSpec

void StoppingSpec::validate() const {
  if (step_cap == 0) throw std::invalid_argument("step_cap must be positive");
  const bool any = target_site.has_value() || (target_set != nullptr && !target_set->empty()) ||
                   exit_radius.has_value() || enter.has_value() || reach_boundary.has_value();
  if (!any) throw std::invalid_argument("stopping spec has no rule");
  if (exit_radius && !(*exit_radius >= 0.0)) throw std::invalid_argument("exit_radius < 0");
  if (enter && !(enter->radius >= 0.0)) throw std::invalid_argument("enter radius < 0");
  if (reach_boundary && !(*reach_boundary >= 1.0))
    throw std::invalid_argument("boundary radius must be >= 1");
}

namespace {

double distance_to(LatticePoint p, PlanePoint c) {
  return std::hypot(static_cast<double>(p.x) - c.x, static_cast<double>(p.y) - c.y);
}

void check_start(LatticePoint start, const StoppingSpec& stop, WalkKind kind) {
  stop.validate();
  if (kind == WalkKind::kConditioned && start.is_origin())
    throw std::invalid_argument("conditioned walk cannot start at the origin");
  if (stop.exit_radius && start.norm() > *stop.exit_radius)
    throw std::invalid_argument("start lies outside exit_radius");
  if (stop.enter && distance_to(start, stop.enter->center) <= stop.enter->radius)
    throw std::invalid_argument("start lies inside enter radius");
  if (stop.reach_boundary && start.norm() > *stop.reach_boundary)
    throw std::invalid_argument("start lies outside the boundary radius");
  if (stop.exit_radius && stop.enter && stop.enter->radius >= *stop.exit_radius &&
      stop.enter->center.x == 0.0 && stop.enter->center.y == 0.0)
    throw std::invalid_argument("enter radius must be below exit_radius");
}

}  // namespace

// ---------------------------------------------------------------------------
// Walker

Walker::Walker(const PotentialKernel& kernel, WalkOptions options)
    : kernel_(&kernel), options_(options) {
  if (!(options_.jump_clearance >= 2.0 * options_.min_jump_radius) || options_.min_jump_radius < 1.0)
    throw std::invalid_argument("jump_clearance must be >= 2 * min_jump_radius >= 2");
}

LatticePoint Walker::step(LatticePoint x, RandomSource& rng) const {
  if (options_.kind == WalkKind::kSimple) return x + kUnitSteps[rng.below(4)];
  const double r2 = x.norm2_real();
  if (r2 >= kThinningMinNorm2) {
    // Uniform proposal accepted with a(y) / (a(x) (1 + slack)); since a >= 1
    // off the origin and |a(y) - a(x)| < 1/(|x| - 1), most proposals are
    // accepted before any kernel value is needed.
    const double slack = 1.0 / (std::sqrt(r2) - 1.0);
    const double sure = (1.0 - slack) / (1.0 + slack);
    double ax = 0.0;
    for (;;) {
      const std::uint64_t bits = rng.next_u64();
      const LatticePoint y = x + kUnitSteps[bits & 3];
      const double u = static_cast<double>(bits >> 11) * 0x1.0p-53;
      if (u < sure) return y;
      if (ax == 0.0) ax = (*kernel_)(x);
      const double ratio = (*kernel_)(y) / ax;
      if (std::abs(ratio - 1.0) > slack) throw NumericError("kernel increment exceeds thinning slack");
      if (u * (1.0 + slack) < ratio) return y;
    }
  }
  const auto nb = x.neighbours();
  std::array<double, 4> w;
  double total = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    w[i] = (*kernel_)(nb[i]);
    total += w[i];
  }
  double u = rng.uniform() * total;
  for (std::size_t i = 0; i < 3; ++i) {
    if (u < w[i]) return nb[i];
    u -= w[i];
  }
  // the origin has weight 0 and can only be reached through rounding here
  return nb[3].is_origin() ? nb[2] : nb[3];
}

LatticePoint Walker::jump(LatticePoint x, double radius, RandomSource& rng) const {
  const double cx = static_cast<double>(x.x);
  const double cy = static_cast<double>(x.y);
  auto land = [&](double phi) {
    return LatticePoint{static_cast<std::int64_t>(std::llround(cx + radius * std::cos(phi))),
                        static_cast<std::int64_t>(std::llround(cy + radius * std::sin(phi)))};
  };
  if (options_.kind == WalkKind::kSimple) return land(2.0 * std::numbers::pi * rng.uniform());

  const double r = x.norm();
  const double near = std::max(r - radius - 1.0, 1.0);
  const double ceiling =
      asymptotic_a(r + radius + 1.0) + std::max(kernel_->asymptotic_constant(), 0.1) / (near * near);
  for (int attempt = 0; attempt < 1'000'000; ++attempt) {
    const LatticePoint w = land(2.0 * std::numbers::pi * rng.uniform());
    const double aw = (*kernel_)(w);
    if (aw > ceiling) throw NumericError("jump acceptance ceiling below a(exit)");
    if (rng.uniform() * ceiling < aw) return w;
  }
  throw NumericError("jump rejection sampler did not accept");
}

double Walker::jump_radius(LatticePoint x, const StoppingSpec& stop,
                           const VisitTracker* tracker) const {
  double d = std::numeric_limits<double>::infinity();
  if (options_.kind == WalkKind::kConditioned) d = x.norm();
  if (stop.target_site) d = std::min(d, (x - *stop.target_site).norm());
  if (stop.target_set) d = std::min(d, stop.target_set->distance_lower_bound(x));
  if (tracker) d = std::min(d, tracker->sites().distance_lower_bound(x));
  if (d < options_.jump_clearance) return 0.0;
  double r = d / 2.0;
  if (stop.exit_radius) r = std::min(r, *stop.exit_radius - x.norm() - 1.0);
  if (stop.enter) r = std::min(r, distance_to(x, stop.enter->center) - stop.enter->radius - 1.0);
  if (stop.reach_boundary) r = std::min(r, *stop.reach_boundary - 2.0 - x.norm());
  if (!std::isfinite(r)) throw std::invalid_argument("fast mode needs a bounded jump radius");
  return r >= options_.min_jump_radius ? std::floor(r) : 0.0;
}

WalkOutcome Walker::run(LatticePoint start, const StoppingSpec& stop, RandomSource& rng,
                        VisitTracker* tracker, PathRecorder* recorder) const {
  check_start(start, stop, options_.kind);
  WalkOutcome out;
  LatticePoint x = start;
  if (tracker) tracker->mark(x);
  const double exit2 = stop.exit_radius ? *stop.exit_radius * *stop.exit_radius : 0.0;
  const double boundary_inner =
      stop.reach_boundary ? std::max(*stop.reach_boundary - 1.0, 0.0) : 0.0;
  const double boundary_inner2 = boundary_inner * boundary_inner;
  while (out.steps < stop.step_cap) {
    const double r = options_.fast ? jump_radius(x, stop, tracker) : 0.0;
    if (r > 0.0) {
      x = jump(x, r, rng);
      ++out.jumps;
      if (recorder) recorder->jump_landings.push_back(recorder->points.size());
    } else {
      x = step(x, rng);
    }
    ++out.steps;
    if (tracker) tracker->mark(x);
    if (recorder) recorder->points.push_back(x);
    if ((stop.target_site && x == *stop.target_site) ||
        (stop.target_set && stop.target_set->contains(x))) {
      out.reason = StopReason::kHitTarget;
      out.end = x;
      return out;
    }
    if (stop.reach_boundary && x.norm2_real() > boundary_inner2 &&
        on_boundary(ball_at_origin(*stop.reach_boundary), x)) {
      out.reason = StopReason::kHitTarget;
      out.end = x;
      return out;
    }
    if (stop.exit_radius && x.norm2_real() > exit2) {
      out.reason = StopReason::kExitedRadius;
      out.end = x;
      return out;
    }
    if (stop.enter) {
      const double dx = static_cast<double>(x.x) - stop.enter->center.x;
      const double dy = static_cast<double>(x.y) - stop.enter->center.y;
      if (dx * dx + dy * dy <= stop.enter->radius * stop.enter->radius) {
        out.reason = StopReason::kEnteredRadius;
        out.end = x;
        return out;
      }
    }
  }
  out.reason = StopReason::kStepCap;
  out.end = x;
  return out;
}

// ---------------------------------------------------------------------------
// Trajectory

std::unordered_set<LatticePoint, LatticePointHash> Trajectory::visited() const {
  std::unordered_set<LatticePoint, LatticePointHash> v;
  v.reserve(steps.size() + 1);
  v.insert(start);
  v.insert(steps.begin(), steps.end());
  return v;
}

Trajectory sample_path(const PotentialKernel& kernel, LatticePoint start, const StoppingSpec& stop,
                       WalkKind kind, RandomSource& rng, const WalkOptions& options) {
  WalkOptions o = options;
  o.kind = kind;
  const Walker walker(kernel, o);
  PathRecorder rec;
  const auto outcome = walker.run(start, stop, rng, nullptr, &rec);
  Trajectory t;
  t.start = start;
  t.steps = std::move(rec.points);
  t.jump_landings = std::move(rec.jump_landings);
  t.stop_reason = outcome.reason;
  return t;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
  out << "step,x,y\n";
  out << "0," << trajectory.start.x << ',' << trajectory.start.y << '\n';
  for (std::size_t i = 0; i < trajectory.steps.size(); ++i)
    out << i + 1 << ',' << trajectory.steps[i].x << ',' << trajectory.steps[i].y << '\n';
}

// ---------------------------------------------------------------------------
// Infinite-horizon resolution

DecisionRecord resolve_never_return_with(const PotentialKernel& kernel, LatticePoint z,
                                         double inner_radius, double uniform) {
  if (!(inner_radius >= 1.0)) throw std::invalid_argument("inner_radius must be >= 1");
  if (!(z.norm() > inner_radius)) throw std::invalid_argument("|z| must exceed inner_radius");
  DecisionRecord d;
  d.from = z;
  d.inner_radius = inner_radius;
  const double az = kernel(z);
  d.probability_used = std::clamp(1.0 - asymptotic_a(inner_radius) / az, 0.0, 1.0);
  d.bias_bound = calibration::kEscape / (inner_radius * az);
  d.uniform = uniform;
  d.never_returns = uniform < d.probability_used;
  return d;
}

DecisionRecord resolve_never_return(const PotentialKernel& kernel, LatticePoint z,
                                    double inner_radius, RandomSource& rng) {
  return resolve_never_return_with(kernel, z, inner_radius, rng.uniform());
}

std::string decision_to_json(const DecisionRecord& record) {
  nlohmann::ordered_json j;
  j["from"] = {record.from.x, record.from.y};
  j["inner_radius"] = record.inner_radius;
  j["never_returns"] = record.never_returns;
  j["probability_used"] = record.probability_used;
  j["bias_bound"] = record.bias_bound;
  j["uniform"] = record.uniform;
  return j.dump();
}

ReentrySample sample_reentry_point(const PotentialKernel& kernel, LatticePoint z,
                                   double inner_radius, RandomSource& rng,
                                   const ReentryOptions& options) {
  if (!(inner_radius >= 2.0)) throw std::invalid_argument("inner_radius must be >= 2");
  if (!(z.norm() > inner_radius)) throw std::invalid_argument("|z| must exceed inner_radius");
  const double az = kernel(z);
  double reject = 0.0;
  if (options.reject_radius) {
    reject = *options.reject_radius;
  } else {
    if (!(options.reject_factor > 1.0)) throw std::invalid_argument("reject_factor must exceed 1");
    reject = std::exp((options.reject_factor * az - kKappa) * std::numbers::pi / 2.0);
  }
  if (!(reject > z.norm() + 1.0) || !std::isfinite(reject))
    throw std::invalid_argument("reject radius must exceed |z| + 1 and be finite");

  WalkOptions wo = options.walk;
  wo.kind = WalkKind::kConditioned;
  const Walker walker(kernel, wo);
  StoppingSpec stop;
  stop.exit_radius = reject;
  stop.enter = EnterRule{{0.0, 0.0}, inner_radius};

  ReentrySample s;
  s.reject_radius = reject;
  const double ar = asymptotic_a(inner_radius);
  s.residual_bias = std::clamp((az - ar) / (asymptotic_a(reject) - ar), 0.0, 1.0);
  for (;;) {
    const auto out = walker.run(z, stop, rng);
    if (out.reason == StopReason::kEnteredRadius) {
      s.site = out.end;
      return s;
    }
    if (out.reason == StopReason::kStepCap) throw ResourceError("re-entry walk hit the step cap");
    if (++s.rejections > options.max_rejections)
      throw std::runtime_error("re-entry sampler exceeded the rejection limit");
  }
}

}  // namespace cwalk
