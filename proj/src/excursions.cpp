#include "cwalk/excursions.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "cwalk/calibration.hpp"
#include "cwalk/hitting.hpp"

namespace cwalk {

AnnulusSpec AnnulusSpec::for_scale(double n) {
  if (!(n >= 16.0)) throw std::invalid_argument("excursion scale n must be >= 16");
  return {n, excursion_inner_radius(n), excursion_outer_radius(n)};
}

std::string_view chain_mode_name(ChainMode mode) {
  return mode == ChainMode::kDirect ? "direct" : "paper_faithful";
}

double psi_value(double n, PsiSource source) {
  return source == PsiSource::kLeading ? psi_n(n).value : psi_exact(n).value;
}

namespace {

class ChainBuilder {
 public:
  ChainBuilder(const PotentialKernel& kernel, const AnnulusSpec& spec, LatticePoint start,
               RandomSource& rng, const ExcursionOptions& options)
      : kernel_(kernel),
        rng_(rng),
        options_(options),
        walker_(kernel, WalkOptions{WalkKind::kConditioned, options.fast}) {
    chain_.spec = spec;
    chain_.mode = options.mode;
    chain_.start = start;
    chain_.psi_used = psi_value(spec.n, options.psi);
    if (options.watch) tracker_.emplace(*options.watch);
  }

  ExcursionChain run() {
    chain_.initial_piece = initial_piece();
    record_coverage(0);
    if (options_.mode == ChainMode::kDirect)
      run_direct();
    else
      run_faithful();
    chain_.count = static_cast<std::int64_t>(chain_.excursions.size());
    return std::move(chain_);
  }

 private:
  [[noreturn]] void fail(const std::string& what) {
    chain_.count = static_cast<std::int64_t>(chain_.excursions.size());
    throw ChainResourceError(what, std::move(chain_));
  }

  Excursion segment(LatticePoint from, const StoppingSpec& stop) {
    Excursion e;
    e.start = from;
    const bool record = options_.record_paths || options_.record_visited;
    PathRecorder rec;
    const std::size_t before = tracker_ ? tracker_->count() : 0;
    const auto out = walker_.run(from, stop, rng_, tracker_ ? &*tracker_ : nullptr,
                                 record ? &rec : nullptr);
    if (out.reason == StopReason::kStepCap) fail("excursion segment reached the step cap");
    e.end = out.end;
    e.steps = out.steps;
    e.jumps = out.jumps;
    e.new_watched = tracker_ ? tracker_->count() - before : 0;
    if (options_.record_visited) {
      std::unordered_set<LatticePoint, LatticePointHash> v(rec.points.begin(), rec.points.end());
      v.insert(from);
      recorded_ += v.size();
      e.visited = std::move(v);
    }
    if (options_.record_paths) {
      recorded_ += rec.points.size();
      Trajectory t;
      t.start = from;
      t.steps = std::move(rec.points);
      t.jump_landings = std::move(rec.jump_landings);
      t.stop_reason = out.reason;
      e.path = std::move(t);
    }
    if (recorded_ > options_.max_recorded_sites) {
      chain_.excursions.push_back(std::move(e));
      fail("recorded sites exceed the memory cap");
    }
    return e;
  }

  Excursion initial_piece() {
    const auto& spec = chain_.spec;
    if (on_boundary(ball_at_origin(spec.r_in), chain_.start)) {
      Excursion e;
      e.start = e.end = chain_.start;
      if (tracker_) {
        tracker_->mark(chain_.start);
        e.new_watched = tracker_->count();
      }
      if (options_.record_visited) e.visited.emplace(std::initializer_list<LatticePoint>{chain_.start});
      if (options_.record_paths) e.path = Trajectory{chain_.start, {}, {}, StopReason::kHitTarget};
      return e;
    }
    StoppingSpec stop;
    stop.reach_boundary = spec.r_in;
    stop.step_cap = options_.segment_step_cap;
    return segment(chain_.start, stop);
  }

  Excursion excursion(LatticePoint from) {
    if (static_cast<std::int64_t>(chain_.excursions.size()) >= options_.max_excursions)
      fail("chain exceeded max_excursions");
    StoppingSpec stop;
    stop.exit_radius = chain_.spec.r_out;
    stop.step_cap = options_.segment_step_cap;
    return segment(from, stop);
  }

  LatticePoint reenter(LatticePoint z) {
    const auto s = sample_reentry_point(kernel_, z, chain_.spec.r_in, rng_, options_.reentry);
    chain_.reentry_rejections += s.rejections;
    chain_.reentry_bias = std::max(chain_.reentry_bias, s.residual_bias);
    return s.site;
  }

  void record_coverage(std::int64_t k) {
    if (!tracker_) return;
    chain_.coverage.ks.push_back(k);
    chain_.coverage.fractions.push_back(tracker_->vacant_fraction());
  }

  void run_direct() {
    LatticePoint current = chain_.initial_piece.end;
    for (std::int64_t k = 1;; ++k) {
      chain_.excursions.push_back(excursion(current));
      record_coverage(k);
      const auto d = resolve_never_return(kernel_, chain_.excursions.back().end, chain_.spec.r_in, rng_);
      chain_.decisions.push_back(d);
      if (chain_.hat_count == 0 && d.uniform < chain_.psi_used) chain_.hat_count = k;
      if (d.never_returns) {
        chain_.resolved_tail = d;
        for (std::int64_t j = k + 1; chain_.hat_count == 0; ++j)
          if (rng_.uniform() < chain_.psi_used) chain_.hat_count = j;
        return;
      }
      current = reenter(chain_.excursions.back().end);
    }
  }

  void run_faithful() {
    std::vector<double> draws;
    if (options_.forced_count) {
      if (*options_.forced_count < 1) throw std::invalid_argument("forced count must be >= 1");
      chain_.hat_count = *options_.forced_count;
    } else {
      for (std::int64_t k = 1;; ++k) {
        const double u = rng_.uniform();
        draws.push_back(u);
        if (u < chain_.psi_used) {
          chain_.hat_count = k;
          break;
        }
        if (k >= options_.max_excursions) fail("geometric count exceeded max_excursions");
      }
    }
    LatticePoint current = chain_.initial_piece.end;
    for (std::int64_t k = 1; k <= chain_.hat_count; ++k) {
      chain_.excursions.push_back(excursion(current));
      record_coverage(k);
      DecisionRecord d;
      d.from = chain_.excursions.back().end;
      d.inner_radius = chain_.spec.r_in;
      d.probability_used = chain_.psi_used;
      d.never_returns = k == chain_.hat_count;
      d.uniform = draws.empty() ? (d.never_returns ? 0.0 : 1.0) : draws[static_cast<std::size_t>(k - 1)];
      chain_.decisions.push_back(d);
      if (k < chain_.hat_count) current = reenter(d.from);
    }
    chain_.resolved_tail = chain_.decisions.back();
  }

  const PotentialKernel& kernel_;
  RandomSource& rng_;
  const ExcursionOptions& options_;
  Walker walker_;
  std::optional<VisitTracker> tracker_;
  std::size_t recorded_ = 0;
  ExcursionChain chain_;
};

}  // namespace

ExcursionChain sample_excursion_chain(const PotentialKernel& kernel, const AnnulusSpec& spec,
                                      LatticePoint start, RandomSource& rng,
                                      const ExcursionOptions& options) {
  if (!(spec.n >= 16.0) || !(1.0 < spec.r_in && spec.r_in < spec.r_out) || spec.r_in <= spec.n)
    throw std::invalid_argument("invalid annulus geometry");
  if (start.is_origin()) throw std::invalid_argument("chain cannot start at the origin");
  if (!(start.norm() < spec.r_in)) throw std::invalid_argument("start must lie inside B(r_in)");
  return ChainBuilder(kernel, spec, start, rng, options).run();
}

void write_chain_jsonl(std::ostream& out, const ExcursionChain& chain) {
  auto line = [&](std::size_t index, const Excursion& e) {
    nlohmann::ordered_json j;
    j["index"] = index;
    j["start"] = {e.start.x, e.start.y};
    j["end"] = {e.end.x, e.end.y};
    j["steps"] = e.steps;
    if (e.visited)
      j["distinct_sites"] = e.visited->size();
    else
      j["distinct_sites"] = nullptr;
    out << j.dump() << '\n';
  };
  line(0, chain.initial_piece);
  for (std::size_t i = 0; i < chain.excursions.size(); ++i) line(i + 1, chain.excursions[i]);
}

EntranceMeasure empirical_entrance_measure(std::span<const LatticePoint> samples, const Ball& ball) {
  if (samples.empty()) throw std::invalid_argument("entrance measure needs samples");
  std::map<LatticePoint, std::size_t> counts;
  for (const auto& p : samples) {
    if (!on_boundary(ball, p)) throw std::invalid_argument("sample off the ball boundary");
    ++counts[p];
  }
  EntranceMeasure m;
  for (const auto& [p, c] : counts) {
    m.support.push_back(p);
    m.masses.push_back(static_cast<double>(c) / static_cast<double>(samples.size()));
  }
  return m;
}

double coupling_error_budget(double n) {
  if (!(n >= 16.0)) throw std::invalid_argument("n must be >= 16");
  const double l = std::log(n);
  return calibration::kCouple * std::log(l) / (n * l) / psi_exact(n).value;
}

}  // namespace cwalk
