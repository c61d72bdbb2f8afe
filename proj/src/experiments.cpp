#include "cwalk/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "cwalk/calibration.hpp"
#include "cwalk/errors.hpp"
#include "cwalk/hitting.hpp"
#include "cwalk/io.hpp"
#include "cwalk/range_stats.hpp"
#include "cwalk/stats.hpp"
#include "cwalk/walk.hpp"

namespace cwalk {

// ---------------------------------------------------------------------------
// Plumbing

Json ExperimentRun::to_json() const {
  Json j;
  j["experiment_id"] = experiment_id;
  j["version"] = io::kVersion;
  j["seed"] = seed;
  j["params"] = params;
  j["samples"] = samples;
  j["summary"] = summary;
  return j;
}

std::string ExperimentRun::dump() const { return to_json().dump(2) + "\n"; }

std::vector<LatticePoint> parse_site_set(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string body = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "circle") {
    return boundary_sites(ball_at_origin(io::parse_double(body)));
  }
  if (kind == "annulus") {
    const auto comma = body.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("annulus spec needs r1,r2");
    const double r1 = io::parse_double(body.substr(0, comma));
    const double r2 = io::parse_double(body.substr(comma + 1));
    if (!(0.0 <= r1 && r1 < r2)) throw std::invalid_argument("annulus spec needs 0 <= r1 < r2");
    std::vector<LatticePoint> out;
    for (const auto& p : ball_sites(ball_at_origin(r2)))
      if (p.norm() > r1) out.push_back(p);
    return out;
  }
  if (kind == "points") {
    std::ifstream in(body);
    if (!in) throw std::invalid_argument("cannot open points file '" + body + "'");
    std::vector<LatticePoint> out;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      const auto comma = line.find(',');
      if (comma == std::string::npos) throw std::invalid_argument("points file: expected x,y");
      out.push_back({std::stoll(line.substr(0, comma)), std::stoll(line.substr(comma + 1))});
    }
    if (out.empty()) throw std::invalid_argument("points file is empty");
    return out;
  }
  if (kind == "axis") throw std::invalid_argument("'axis' is an infinite family; use it with recurrence");
  throw std::invalid_argument("unknown set spec '" + spec + "'");
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  for (unsigned t = 0; t < workers; ++t)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < count;) {
        try {
          fn(i);
        } catch (...) {
          const std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = count;
        }
      }
    });
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

double kochen_stone_bound(const std::vector<double>& p, const std::vector<std::vector<double>>& pjoint) {
  constexpr double tol = 1e-12;
  const std::size_t k = p.size();
  if (k == 0) throw std::invalid_argument("kochen_stone_bound needs events");
  if (pjoint.size() != k) throw std::invalid_argument("pjoint has the wrong size");
  for (std::size_t i = 0; i < k; ++i) {
    if (!(p[i] >= 0.0 && p[i] <= 1.0)) throw std::invalid_argument("p outside [0, 1]");
    if (pjoint[i].size() != k) throw std::invalid_argument("pjoint is not square");
  }
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      const double v = pjoint[i][j];
      if (std::abs(v - pjoint[j][i]) > tol) throw std::invalid_argument("pjoint is not symmetric");
      if (i == j && std::abs(v - p[i]) > tol) throw std::invalid_argument("pjoint diagonal differs from p");
      if (v < std::max(0.0, p[i] + p[j] - 1.0) - tol || v > std::min(p[i], p[j]) + tol)
        throw std::invalid_argument("pjoint entry outside the Frechet bounds");
    }
  double best = 0.0, sum = 0.0, joint = 0.0;
  for (std::size_t m = 0; m < k; ++m) {
    sum += p[m];
    for (std::size_t i = 0; i < m; ++i) joint += 2.0 * pjoint[i][m];
    joint += pjoint[m][m];
    if (joint > 0.0) best = std::max(best, sum * sum / joint);
  }
  return best;
}

namespace {

Json point_json(LatticePoint p) { return Json::array({p.x, p.y}); }

double lnln_over_ln(double n) { return std::log(std::log(n)) / std::log(n); }

}  // namespace

// ---------------------------------------------------------------------------
// Uniform law

ExperimentRun run_uniform_law(const PotentialKernel& kernel, const UniformLawParams& params,
                              std::uint64_t seed) {
  if (params.samples < 100) throw std::invalid_argument("uniform-law needs >= 100 samples");
  if (!(params.m0 > 0.0)) throw std::invalid_argument("M0 must be positive");
  const auto spec = AnnulusSpec::for_scale(params.n);
  const auto points = parse_site_set(params.set_spec);
  const SiteSet a(points, params.set_spec);
  const double inner = params.n / std::pow(std::log(params.n), params.m0);
  for (const auto& p : a.sites.sites())
    if (p.norm() < inner || p.norm() > params.n)
      throw std::invalid_argument("set lies outside B(n) minus B(n / ln^M0 n)");
  if (params.start.is_origin() || !(params.start.norm() < spec.r_in))
    throw std::invalid_argument("start must be a non-origin site inside B(n ln n)");

  ExperimentRun run;
  run.experiment_id = "uniform-law";
  run.seed = seed;
  run.params = {{"n", params.n},
                {"set", params.set_spec},
                {"set_size", a.size()},
                {"samples", params.samples},
                {"M0", params.m0},
                {"mode", chain_mode_name(params.mode)},
                {"psi", params.psi == PsiSource::kLeading ? "leading" : "exact"},
                {"fast", params.fast},
                {"start", point_json(params.start)}};
  if (params.ks_threshold) run.params["ks_threshold"] = *params.ks_threshold;

  ExcursionOptions opt;
  opt.mode = params.mode;
  opt.psi = params.psi;
  opt.fast = params.fast;
  opt.watch = &a.sites;

  std::vector<double> vacant(params.samples);
  std::vector<std::int64_t> counts(params.samples);
  std::vector<double> bias(params.samples);
  parallel_for(params.samples, params.threads, [&](std::size_t i) {
    RandomSource rng(seed, i);
    const auto chain = sample_excursion_chain(kernel, spec, params.start, rng, opt);
    vacant[i] = chain.coverage.fractions.back();
    counts[i] = chain.count;
    bias[i] = chain.reentry_bias;
  });

  for (std::size_t i = 0; i < params.samples; ++i)
    run.samples.push_back({{"index", i}, {"V", vacant[i]}, {"excursions", counts[i]}});

  const auto ks = stats::ks_uniform(vacant);
  std::vector<double> ecdf = vacant;
  std::sort(ecdf.begin(), ecdf.end());
  const double ell = ell_a(a, params.n, params.m0);
  const double q = lnln_over_ln(params.n);
  std::vector<double> cdv(counts.begin(), counts.end());
  run.summary = {{"ks", ks.statistic},
                 {"dkw_epsilon_95", ks.dkw_epsilon},
                 {"ell_A", ell},
                 {"bound_terms",
                  {{"c1_coefficient", std::cbrt(q)}, {"c2_coefficient", ell / std::cbrt(q * q)}}},
                 {"mean_excursions", stats::mean_estimate(cdv).mean},
                 {"psi_used", psi_value(params.n, params.psi)},
                 {"max_reentry_bias", *std::max_element(bias.begin(), bias.end())},
                 {"ecdf", ecdf}};
  if (params.ks_threshold) {
    run.threshold_violated = ks.statistic > *params.ks_threshold;
    run.summary["pass"] = !run.threshold_violated;
  }
  return run;
}

// ---------------------------------------------------------------------------
// Big holes

namespace {

double scale_radius(int n) { return std::ldexp(1.0, 3 * n); }       // 2^{3n}
double hole_radius(int n) { return std::ldexp(1.0, 3 * n - 1); }    // 2^{3n-1}

struct HoleOutcome {
  std::vector<bool> avoid;   // per scale
  std::vector<bool> eprime;  // per scale
  std::uint64_t resolver_cycles = 0;
};

class HoleTracker {
 public:
  HoleTracker(const PotentialKernel& kernel, const BigHolesParams& params,
              const std::vector<SiteIndex>& holes, RandomSource& rng)
      : kernel_(kernel),
        params_(params),
        holes_(holes),
        rng_(rng),
        walker_(kernel, WalkOptions{WalkKind::kConditioned, params.fast}) {}

  HoleOutcome run() {
    const auto& scales = params_.scales;
    out_.avoid.assign(scales.size(), true);
    out_.eprime.assign(scales.size(), true);
    LatticePoint x = params_.start;
    for (std::size_t s = 0; s < scales.size(); ++s) {
      const double from = scale_radius(scales[s] - 1);
      if (!on_boundary(ball_at_origin(from), x)) x = advance(x, from, nullptr, s);
      x = advance(x, scale_radius(scales[s]), &holes_[s], s);
      pending_.push_back(s);
    }
    resolve(x);
    return out_;
  }

 private:
  std::optional<EnterRule> enter_rule() const {
    if (pending_.empty()) return std::nullopt;
    return EnterRule{{0.0, 0.0}, hole_radius(params_.scales[pending_.back()])};
  }

  void fail_top() {
    out_.eprime[pending_.back()] = false;
    pending_.pop_back();
  }

  // Walk until the internal boundary of B(goal); records hole hits for scale
  // s and failures of pending scales on the way.
  LatticePoint advance(LatticePoint x, double goal, const SiteIndex* hole, std::size_t s) {
    bool watching = hole != nullptr && !hole->empty();
    for (;;) {
      StoppingSpec stop;
      stop.reach_boundary = goal;
      if (watching) stop.target_set = hole;
      stop.enter = enter_rule();
      const auto r = walker_.run(x, stop, rng_);
      x = r.end;
      if (r.reason == StopReason::kStepCap) throw ResourceError("big-holes walk reached the step cap");
      if (watching && hole->contains(x)) {
        out_.avoid[s] = false;
        watching = false;
      }
      if (stop.enter && r.reason == StopReason::kEnteredRadius) fail_top();
      if (on_boundary(ball_at_origin(goal), x)) return x;
    }
  }

  void resolve(LatticePoint x) {
    const double far = 8.0 * scale_radius(params_.scales.back());
    while (!pending_.empty()) {
      StoppingSpec stop;
      stop.exit_radius = far;
      stop.enter = enter_rule();
      const auto r = walker_.run(x, stop, rng_);
      x = r.end;
      if (r.reason == StopReason::kStepCap) throw ResourceError("big-holes walk reached the step cap");
      if (r.reason == StopReason::kEnteredRadius) {
        fail_top();
        continue;
      }
      ++out_.resolver_cycles;
      const double inner = stop.enter->radius;
      const auto d = resolve_never_return(kernel_, x, inner, rng_);
      if (d.never_returns) return;
      x = sample_reentry_point(kernel_, x, inner, rng_).site;
      fail_top();
    }
  }

  const PotentialKernel& kernel_;
  const BigHolesParams& params_;
  const std::vector<SiteIndex>& holes_;
  RandomSource& rng_;
  Walker walker_;
  std::vector<std::size_t> pending_;
  HoleOutcome out_;
};

}  // namespace

ExperimentRun run_big_holes(const PotentialKernel& kernel, const BigHolesParams& params,
                            std::uint64_t seed) {
  if (params.scales.empty()) throw std::invalid_argument("big-holes needs scales");
  for (std::size_t i = 0; i < params.scales.size(); ++i)
    if (params.scales[i] < 1 || params.scales[i] > 16 || (i > 0 && params.scales[i] <= params.scales[i - 1]))
      throw std::invalid_argument("scales must be increasing integers in [1, 16]");
  if (params.samples == 0) throw std::invalid_argument("big-holes needs samples");
  const auto g = RegionG::parse(params.region_spec);
  const auto check = surrounds_origin_check(g, params.c3);
  if (!check.ok) throw std::invalid_argument("region surrounds the origin (no escape path at clearance c3)");
  if (params.start.is_origin() || params.start.norm() > scale_radius(params.scales.front() - 1))
    throw std::invalid_argument("start must be a non-origin site of B(2^{3(n1-1)})");

  std::vector<SiteIndex> holes;
  for (int n : params.scales) {
    auto sites = g.lattice_sites(hole_radius(n));
    std::erase_if(sites, [](LatticePoint p) { return p.is_origin(); });
    holes.emplace_back(sites);
  }

  ExperimentRun run;
  run.experiment_id = "big-holes";
  run.seed = seed;
  Json witness = Json::array();
  for (const auto& p : check.witness) witness.push_back({p.x, p.y});
  run.params = {{"region", params.region_spec},
                {"c3", params.c3},
                {"scales", params.scales},
                {"samples", params.samples},
                {"fast", params.fast},
                {"start", point_json(params.start)}};
  if (params.p_avoid_min) run.params["p_avoid_min"] = *params.p_avoid_min;

  std::vector<HoleOutcome> outcomes(params.samples);
  parallel_for(params.samples, params.threads, [&](std::size_t i) {
    RandomSource rng(seed, i);
    outcomes[i] = HoleTracker(kernel, params, holes, rng).run();
  });

  const std::size_t k = params.scales.size();
  std::vector<std::size_t> avoid(k, 0), ep(k, 0), e(k, 0);
  std::vector<std::vector<std::size_t>> ep_joint(k, std::vector<std::size_t>(k, 0));
  std::vector<std::vector<std::size_t>> e_joint = ep_joint;
  for (std::size_t i = 0; i < params.samples; ++i) {
    const auto& o = outcomes[i];
    Json av = Json::array(), epj = Json::array();
    for (std::size_t s = 0; s < k; ++s) {
      av.push_back(static_cast<bool>(o.avoid[s]));
      epj.push_back(static_cast<bool>(o.eprime[s]));
      avoid[s] += o.avoid[s];
      ep[s] += o.eprime[s];
      e[s] += o.avoid[s] && o.eprime[s];
      for (std::size_t t = 0; t < k; ++t) {
        ep_joint[s][t] += o.eprime[s] && o.eprime[t];
        e_joint[s][t] += o.avoid[s] && o.eprime[s] && o.avoid[t] && o.eprime[t];
      }
    }
    run.samples.push_back({{"index", i}, {"avoid", av}, {"eprime", epj}, {"resolver_cycles", o.resolver_cycles}});
  }

  const double m = static_cast<double>(params.samples);
  Json scales = Json::array();
  bool avoid_ok = true;
  std::vector<double> pe(k);
  std::vector<std::vector<double>> pej(k, std::vector<double>(k));
  for (std::size_t s = 0; s < k; ++s) {
    const int n = params.scales[s];
    const auto pa = stats::proportion(avoid[s], params.samples);
    const auto pp = stats::proportion(ep[s], params.samples);
    const auto pen = stats::proportion(e[s], params.samples);
    const double formula = 1.0 / (3.0 * n + kGammaStar);
    const double bias = calibration::kEscape / (hole_radius(n) * asymptotic_a(scale_radius(n)));
    pe[s] = pen.mean;
    for (std::size_t t = 0; t < k; ++t) pej[s][t] = static_cast<double>(e_joint[s][t]) / m;
    if (params.p_avoid_min && pa.mean < *params.p_avoid_min) avoid_ok = false;
    scales.push_back({{"n", n},
                      {"hole_sites", holes[s].size()},
                      {"p_avoid", pa.mean},
                      {"p_avoid_se", pa.standard_error},
                      {"p_escape", pp.mean},
                      {"p_escape_se", pp.standard_error},
                      {"p_escape_formula", formula},
                      {"resolver_bias_bound", bias},
                      {"p_E", pen.mean},
                      {"p_E_se", pen.standard_error},
                      {"n_times_p_E", n * pen.mean}});
  }
  Json pairs = Json::array();
  bool monotone = true;
  for (std::size_t s = 0; s < k; ++s)
    for (std::size_t t = s + 1; t < k; ++t) {
      const int mm = params.scales[s], nn = params.scales[t];
      const auto pj = stats::proportion(ep_joint[s][t], params.samples);
      const double formula = 1.0 / ((3.0 * (nn - mm) + 1.0) * (3.0 * mm + kGammaStar));
      monotone = monotone && ep_joint[s][t] <= ep[s];
      pairs.push_back({{"m", mm},
                       {"n", nn},
                       {"p_joint", pj.mean},
                       {"p_joint_se", pj.standard_error},
                       {"formula", formula},
                       {"ratio", formula > 0.0 ? pj.mean / formula : 0.0},
                       {"p_E_joint", pej[s][t]}});
    }
  double ks_bound = 0.0;
  bool any = false;
  for (double v : pe) any = any || v > 0.0;
  if (any) ks_bound = kochen_stone_bound(pe, pej);
  run.summary = {{"region_does_not_surround", true},
                 {"witness", witness},
                 {"witness_length", check.path_length},
                 {"c1", check.c1},
                 {"scales", scales},
                 {"pairs", pairs},
                 {"joint_monotone", monotone},
                 {"kochen_stone_bound", ks_bound},
                 {"note", "quantitative ingredients only; the infinitely-often statement is not checked"}};
  if (params.p_avoid_min) {
    run.threshold_violated = !avoid_ok;
    run.summary["pass"] = avoid_ok;
  }
  return run;
}

// ---------------------------------------------------------------------------
// Recurrence

namespace {

constexpr int kScheduleAngles = 256;

// P_x[hit y before leaving B(R)] for the conditioned walk, clamped.
double hit_before(const PotentialKernel& k, LatticePoint x, LatticePoint y, double aR) {
  if (x == y) return 1.0;
  const double ax = k(x), ay = k(y);
  const double v = (ax * aR + ay * aR - k(x - y) * aR - ax * ay) / (ax * (2.0 * aR - ay));
  return std::clamp(v, 0.0, 1.0);
}

double second_moment_bound(const PotentialKernel& k, double inner, const std::vector<LatticePoint>& ys,
                           double R) {
  const double aR = asymptotic_a(R);
  const std::size_t m = ys.size();
  std::vector<double> q(m * m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) q[i * m + j] = hit_before(k, ys[i], ys[j], aR);
  double worst = 1.0;
  std::vector<double> p(m);
  for (int t = 0; t < kScheduleAngles; ++t) {
    const double phi = 2.0 * std::numbers::pi * t / kScheduleAngles;
    const LatticePoint x{std::llround(inner * std::cos(phi)), std::llround(inner * std::sin(phi))};
    double s = 0.0, both = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      p[i] = hit_before(k, x, ys[i], aR);
      s += p[i];
    }
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        both += i == j ? p[i] : p[i] * q[i * m + j] + p[j] * q[j * m + i];
    worst = std::min(worst, both > 0.0 ? s * s / both : 0.0);
  }
  return worst;
}

std::vector<LatticePoint> axis_targets(double inner, double outer, int m) {
  std::vector<LatticePoint> ys;
  for (int i = 0; i < m; ++i) {
    const double r = inner * std::pow(outer / inner, (i + 0.5) / m);
    const auto x = static_cast<std::int64_t>(std::llround(r));
    if (static_cast<double>(x) > inner + 1.0 && static_cast<double>(x) < outer - 1.0) ys.push_back({x, 0});
  }
  std::sort(ys.begin(), ys.end());
  ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
  return ys;
}

}  // namespace

std::vector<ScheduleScale> recurrence_schedule(const PotentialKernel& kernel, const RecurrenceParams& params) {
  if (params.scales < 1) throw std::invalid_argument("recurrence needs >= 1 scale");
  if (params.points_per_scale < 1) throw std::invalid_argument("points_per_scale must be >= 1");
  if (!(params.base_radius >= 4.0)) throw std::invalid_argument("base radius must be >= 4");
  if (!(params.radius_cap <= 0x1.0p60)) throw std::invalid_argument("radius cap beyond lattice range");
  std::vector<ScheduleScale> out;
  double inner = params.base_radius;
  for (int k = 1; k <= params.scales; ++k) {
    ScheduleScale s;
    s.inner = inner;
    for (double R = 2.0 * inner;; R *= 2.0) {
      if (R > params.radius_cap)
        throw ResourceError("recurrence schedule exceeded the radius cap at scale " + std::to_string(k));
      auto ys = axis_targets(inner, R, params.points_per_scale);
      if (ys.empty()) continue;
      const double b = second_moment_bound(kernel, inner, ys, R);
      if (b >= 1.0 / 3.0) {
        s.outer = R;
        s.targets = std::move(ys);
        s.bound = b;
        break;
      }
    }
    inner = s.outer;
    out.push_back(std::move(s));
  }
  return out;
}

ExperimentRun run_recurrence(const PotentialKernel& kernel, const RecurrenceParams& params,
                             std::uint64_t seed) {
  if (params.samples == 0) throw std::invalid_argument("recurrence needs samples");
  if (params.start.is_origin() || params.start.norm() >= params.base_radius)
    throw std::invalid_argument("start must be a non-origin site inside the base radius");
  const auto schedule = recurrence_schedule(kernel, params);
  std::vector<SiteIndex> targets;
  for (const auto& s : schedule) targets.emplace_back(s.targets);

  ExperimentRun run;
  run.experiment_id = "recurrence";
  run.seed = seed;
  Json finite_pts = Json::array();
  for (const auto& p : params.finite_set) finite_pts.push_back(point_json(p));
  run.params = {{"family", "axis"},
                {"scales", params.scales},
                {"base_radius", params.base_radius},
                {"points_per_scale", params.points_per_scale},
                {"radius_cap", params.radius_cap},
                {"samples", params.samples},
                {"finite_set", finite_pts},
                {"finite_runs", params.finite_runs},
                {"start", point_json(params.start)}};
  if (params.hit_threshold) run.params["hit_threshold"] = *params.hit_threshold;

  const std::size_t k = schedule.size();
  std::vector<std::vector<std::uint8_t>> hits(params.samples, std::vector<std::uint8_t>(k, 0));
  const Walker walker(kernel, WalkOptions{WalkKind::kConditioned, true});
  parallel_for(params.samples, params.threads, [&](std::size_t i) {
    RandomSource rng(seed, i);
    LatticePoint x = params.start;
    StoppingSpec first;
    first.reach_boundary = params.base_radius;
    if (!on_boundary(ball_at_origin(params.base_radius), x)) x = walker.run(x, first, rng).end;
    for (std::size_t s = 0; s < k; ++s) {
      VisitTracker tracker(targets[s]);
      StoppingSpec stop;
      stop.reach_boundary = schedule[s].outer;
      const auto r = walker.run(x, stop, rng, &tracker);
      if (r.reason == StopReason::kStepCap) throw ResourceError("recurrence walk reached the step cap");
      hits[i][s] = tracker.count() > 0;
      x = r.end;
    }
  });

  // Transience of a finite set: count visits until a never-return decision.
  const SiteIndex finite(params.finite_set);
  double finite_radius = 1.0;
  for (const auto& p : finite.sites()) finite_radius = std::max(finite_radius, p.norm() + 1.0);
  finite_radius = std::max(finite_radius, 2.0);
  const double far = 8.0 * finite_radius;
  struct FiniteOutcome {
    std::uint64_t visits = 0;
    double radius_at_last_visit = 0.0;
    std::uint64_t cycles = 0;
  };
  std::vector<FiniteOutcome> finite_out(params.finite_runs);
  if (!finite.empty() && params.start.norm() >= finite_radius)
    throw std::invalid_argument("start must lie inside the ball around the finite set");
  parallel_for(finite.empty() ? 0 : params.finite_runs, params.threads, [&](std::size_t i) {
    RandomSource rng(seed, params.samples + i);
    FiniteOutcome o;
    LatticePoint x = params.start;
    double max_norm = x.norm();
    if (finite.contains(x)) ++o.visits;
    for (;;) {
      StoppingSpec stop;
      stop.target_set = &finite;
      stop.exit_radius = far;
      PathRecorder rec;
      const auto r = walker.run(x, stop, rng, nullptr, &rec);
      for (const auto& p : rec.points) max_norm = std::max(max_norm, p.norm());
      x = r.end;
      if (r.reason == StopReason::kHitTarget) {
        ++o.visits;
        o.radius_at_last_visit = max_norm;
        continue;
      }
      if (r.reason != StopReason::kExitedRadius) throw ResourceError("finite-set walk reached the step cap");
      ++o.cycles;
      if (resolve_never_return(kernel, x, finite_radius, rng).never_returns) break;
      x = sample_reentry_point(kernel, x, finite_radius, rng).site;
      max_norm = std::max(max_norm, far);
      if (finite.contains(x)) {
        ++o.visits;
        o.radius_at_last_visit = max_norm;
      }
    }
    finite_out[i] = o;
  });

  for (std::size_t i = 0; i < params.samples; ++i) {
    Json h = Json::array();
    for (auto v : hits[i]) h.push_back(static_cast<bool>(v));
    run.samples.push_back({{"index", i}, {"hits", h}});
  }
  Json finite_samples = Json::array();
  std::uint64_t max_visits = 0;
  for (std::size_t i = 0; i < finite_out.size(); ++i) {
    max_visits = std::max(max_visits, finite_out[i].visits);
    finite_samples.push_back({{"index", i},
                              {"visits", finite_out[i].visits},
                              {"radius_at_last_visit", finite_out[i].radius_at_last_visit},
                              {"resolver_cycles", finite_out[i].cycles}});
  }

  Json per_scale = Json::array();
  bool ok = true;
  bool increasing = true;
  for (std::size_t s = 0; s < k; ++s) {
    std::size_t c = 0;
    for (const auto& h : hits) c += h[s];
    const auto pr = stats::proportion(c, params.samples);
    if (params.hit_threshold && pr.mean < *params.hit_threshold - 3.0 * pr.standard_error) ok = false;
    if (s > 0 && !(schedule[s].outer > schedule[s - 1].outer)) increasing = false;
    Json ts = Json::array();
    for (const auto& y : schedule[s].targets) ts.push_back(point_json(y));
    per_scale.push_back({{"scale", s + 1},
                         {"inner", schedule[s].inner},
                         {"outer", schedule[s].outer},
                         {"targets", ts},
                         {"bound", schedule[s].bound},
                         {"hit_frequency", pr.mean},
                         {"hit_se", pr.standard_error}});
  }
  run.summary = {{"scales", per_scale},
                 {"radii_increasing", increasing},
                 {"finite_set_runs", finite_samples},
                 {"finite_all_terminated", true},
                 {"finite_max_visits", max_visits}};
  if (params.hit_threshold) {
    run.threshold_violated = !ok;
    run.summary["pass"] = ok;
  }
  return run;
}

}  // namespace cwalk
