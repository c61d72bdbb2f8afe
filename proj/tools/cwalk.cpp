// cwalk command-line front end.
#include <CLI11.hpp>
#include <json.hpp>

#include <cwalk/errors.hpp>
#include <cwalk/exact_solver.hpp>
#include <cwalk/excursions.hpp>
#include <cwalk/experiments.hpp>
#include <cwalk/hitting.hpp>
#include <cwalk/io.hpp>
#include <cwalk/kernel.hpp>
#include <cwalk/walk.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

namespace {

using cwalk::Json;
using cwalk::LatticePoint;

/// Default master seed when --seed is not given.
constexpr std::uint64_t kDefaultSeed = 20240601;
constexpr double kDefaultKernelRadius = 200.0;

struct Global {
  std::string seed = std::to_string(kDefaultSeed);
  unsigned threads = 1;
  std::string out;
  double kernel_radius = kDefaultKernelRadius;
};

std::optional<std::uint64_t> parse_seed(const std::string& s) {
  std::uint64_t v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || end != s.data() + s.size()) return std::nullopt;
  return v;
}

std::string check_seed(const std::string& s) {
  return s == "random" || parse_seed(s) ? "" : "expected an unsigned integer or 'random'";
}

std::uint64_t resolve_seed(const std::string& s) {
  if (s == "random") {
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  }
  const auto v = parse_seed(s);
  if (!v) throw CLI::ValidationError("--seed", check_seed(s));
  return *v;
}

void emit(const Global& g, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(g.out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + g.out);
  f << text;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json prob_json(const cwalk::ProbabilityWithError& p) {
  return {{"value", p.value}, {"error_bound", p.error_bound}, {"formula_id", p.formula_id},
          {"version", cwalk::io::kVersion}};
}

cwalk::PotentialKernel kernel_for(const Global& g) { return cwalk::load_or_build_kernel(g.kernel_radius); }

std::vector<double> read_numbers(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read " + path);
  std::vector<double> v;
  std::string tok;
  while (in >> tok) v.push_back(cwalk::io::parse_double(tok));
  return v;
}

cwalk::WalkKind parse_kind(const std::string& s) {
  return s == "srw" ? cwalk::WalkKind::kSimple : cwalk::WalkKind::kConditioned;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation and exact formulas for the planar random walk conditioned to avoid the origin", "cwalk"};
  app.set_version_flag("--version", cwalk::io::kVersion);
  app.require_subcommand(1);
  app.fallthrough();
  Global g;
  app.add_option("--seed", g.seed, "master seed (default " + std::to_string(kDefaultSeed) + "; 'random' for entropy)")
      ->check(check_seed, "SEED");
  app.add_option("--threads", g.threads, "worker streams for exp runs")->check(CLI::Range(1u, 1024u));
  app.add_option("--out", g.out, "write output here instead of stdout");
  app.add_option("--kernel-radius", g.kernel_radius, "radius of the tabulated kernel")->check(CLI::Range(2.0, 5000.0));

  std::function<int()> action;

  // kernel
  auto* kernel_cmd = app.add_subcommand("kernel", "potential kernel a(x)");
  std::int64_t kx = 0, ky = 0;
  std::optional<double> kradius;
  bool kjson = false;
  std::string kcsv;
  kernel_cmd->add_option("--x", kx)->required();
  kernel_cmd->add_option("--y", ky)->required();
  kernel_cmd->add_option("--radius", kradius, "table radius for this query");
  kernel_cmd->add_flag("--json", kjson);
  kernel_cmd->add_option("--export-csv", kcsv, "write the whole table as CSV");
  kernel_cmd->callback([&] {
    action = [&] {
      if (kradius) g.kernel_radius = *kradius;
      const auto k = kernel_for(g);
      if (!kcsv.empty()) {
        std::ofstream f(kcsv);
        k.write_csv(f);
      }
      const auto q = k.query({kx, ky});
      if (kjson)
        emit(g, dump({{"x", kx}, {"y", ky}, {"value", q.value}, {"error_bound", q.error_bound},
                      {"exact", q.exact}, {"version", cwalk::io::kVersion}}));
      else
        emit(g, cwalk::io::format_double(q.value) + "\n");
      return 0;
    };
  });

  // prob
  auto* prob = app.add_subcommand("prob", "closed-form probabilities as {value, error_bound, formula_id}");
  prob->require_subcommand(1);
  std::int64_t px = 0, py = 0, tx = 0, ty = 0;
  double pr = 0, pR = 0, pn = 0, pm0 = 1.0;
  double h1 = 0, h2 = 0, q12 = 0, q21 = 0;
  bool psi_exact = false;
  auto start_opts = [&](CLI::App* c) {
    c->add_option("--x", px)->required();
    c->add_option("--y", py)->required();
  };
  auto target_opts = [&](CLI::App* c) {
    c->add_option("--tx", tx, "target x")->required();
    c->add_option("--ty", ty, "target y")->required();
  };
  auto* p_return = prob->add_subcommand("return", "P_x[return to x]");
  start_opts(p_return);
  p_return->callback([&] {
    action = [&] {
      const auto k = kernel_for(g);
      emit(g, dump(prob_json({cwalk::prob_return_same_site(k, {px, py}), 0.0, "return"})));
      return 0;
    };
  });
  auto* p_hit = prob->add_subcommand("hit", "P_x[ever hit y]");
  start_opts(p_hit);
  target_opts(p_hit);
  p_hit->callback([&] {
    action = [&] {
      const auto k = kernel_for(g);
      emit(g, dump(prob_json({cwalk::prob_hit_other_site(k, {px, py}, {tx, ty}), 0.0, "hit"})));
      return 0;
    };
  });
  auto* p_srw = prob->add_subcommand("srw-annulus", "simple walk: P_x[hit y before leaving B(R)]");
  start_opts(p_srw);
  target_opts(p_srw);
  p_srw->add_option("--R", pR)->required();
  p_srw->callback([&] {
    action = [&] {
      const auto k = kernel_for(g);
      emit(g, dump(prob_json(cwalk::srw_hit_before_exit(k, {px, py}, {tx, ty}, pR))));
      return 0;
    };
  });
  auto* p_exit = prob->add_subcommand("exit-inner", "P_x[leave B(R) before entering B(r)]");
  start_opts(p_exit);
  p_exit->add_option("--r", pr)->required();
  p_exit->add_option("--R", pR)->required();
  p_exit->callback([&] {
    action = [&] {
      const auto k = kernel_for(g);
      emit(g, dump(prob_json(cwalk::cond_exit_before_inner(k, {px, py}, pr, pR))));
      return 0;
    };
  });
  auto* p_never = prob->add_subcommand("never-hit-disk", "P_x[never enter B(r)]");
  start_opts(p_never);
  p_never->add_option("--r", pr)->required();
  p_never->callback([&] {
    action = [&] {
      const auto k = kernel_for(g);
      emit(g, dump(prob_json(cwalk::cond_never_hit_disk(k, {px, py}, pr))));
      return 0;
    };
  });
  auto* p_exc = prob->add_subcommand("excursion-hit", "P_x[hit y before leaving B(n ln^2 n)]");
  start_opts(p_exc);
  target_opts(p_exc);
  p_exc->add_option("--n", pn)->required();
  p_exc->add_option("--M0", pm0);
  p_exc->callback([&] {
    action = [&] {
      const auto k = kernel_for(g);
      emit(g, dump(prob_json(cwalk::excursion_hit_prob(k, {px, py}, {tx, ty}, pn, pm0))));
      return 0;
    };
  });
  auto* p_psi = prob->add_subcommand("psi", "per-excursion escape probability");
  p_psi->add_option("--n", pn)->required();
  p_psi->add_flag("--exact", psi_exact, "1 - a(n ln n)/a(n ln^2 n) instead of the leading form");
  p_psi->callback([&] {
    action = [&] {
      emit(g, dump(prob_json(psi_exact ? cwalk::psi_exact(pn) : cwalk::psi_n(pn))));
      return 0;
    };
  });
  auto* p_two = prob->add_subcommand("two-split", "first-hit split from h1, h2, q12, q21");
  p_two->add_option("--h1", h1)->required();
  p_two->add_option("--h2", h2)->required();
  p_two->add_option("--q12", q12)->required();
  p_two->add_option("--q21", q21)->required();
  p_two->callback([&] {
    action = [&] {
      const auto t = cwalk::two_target_split(h1, h2, q12, q21);
      emit(g, dump({{"p1", t.p1}, {"p2", t.p2}, {"value", t.p1 + t.p2}, {"error_bound", 0.0},
                    {"formula_id", "two-split"}, {"version", cwalk::io::kVersion}}));
      return 0;
    };
  });

  // sample
  auto* sample = app.add_subcommand("sample", "draw paths, excursion chains, resolver decisions");
  sample->require_subcommand(1);
  std::int64_t sx = 1, sy = 0;
  std::string skind = "conditioned", smode = "direct", spsi = "exact";
  double sR = 100, sn = 64, sr = 10;
  bool snaive = false;
  auto* s_path = sample->add_subcommand("path", "one path until |x| > R, as CSV step,x,y");
  s_path->add_option("--x", sx);
  s_path->add_option("--y", sy);
  s_path->add_option("--kind", skind)->check(CLI::IsMember({"srw", "conditioned"}));
  s_path->add_option("--R", sR)->required();
  s_path->add_flag("--naive", snaive, "disable distant jumps");
  s_path->callback([&] {
    action = [&] {
      const auto k = kernel_for(g);
      cwalk::RandomSource rng(resolve_seed(g.seed), 0);
      cwalk::StoppingSpec stop;
      stop.exit_radius = sR;
      const auto kind = parse_kind(skind);
      const auto t = cwalk::sample_path(k, {sx, sy}, stop, kind, rng, cwalk::WalkOptions{kind, !snaive});
      std::ostringstream os;
      cwalk::write_trajectory_csv(os, t);
      emit(g, os.str());
      return 0;
    };
  });
  auto* s_chain = sample->add_subcommand("chain", "one excursion chain, one JSON line per excursion");
  s_chain->add_option("--x", sx);
  s_chain->add_option("--y", sy);
  s_chain->add_option("--n", sn)->required();
  s_chain->add_option("--mode", smode)->check(CLI::IsMember({"direct", "paper_faithful"}));
  s_chain->add_option("--psi", spsi)->check(CLI::IsMember({"leading", "exact"}));
  s_chain->add_flag("--naive", snaive);
  s_chain->callback([&] {
    action = [&] {
      const auto k = kernel_for(g);
      cwalk::RandomSource rng(resolve_seed(g.seed), 0);
      cwalk::ExcursionOptions o;
      o.mode = smode == "direct" ? cwalk::ChainMode::kDirect : cwalk::ChainMode::kPaperFaithful;
      o.psi = spsi == "exact" ? cwalk::PsiSource::kExact : cwalk::PsiSource::kLeading;
      o.fast = !snaive;
      const auto c = cwalk::sample_excursion_chain(k, cwalk::AnnulusSpec::for_scale(sn), {sx, sy}, rng, o);
      std::ostringstream os;
      cwalk::write_chain_jsonl(os, c);
      emit(g, os.str());
      return 0;
    };
  });
  auto* s_resolve = sample->add_subcommand("resolve", "never-return decision from z, plus a re-entry point if it returns");
  s_resolve->add_option("--x", sx)->required();
  s_resolve->add_option("--y", sy)->required();
  s_resolve->add_option("--r", sr, "inner radius")->required();
  s_resolve->callback([&] {
    action = [&] {
      const auto k = kernel_for(g);
      cwalk::RandomSource rng(resolve_seed(g.seed), 0);
      const auto d = cwalk::resolve_never_return(k, {sx, sy}, sr, rng);
      Json j = Json::parse(cwalk::decision_to_json(d));
      if (!d.never_returns) {
        const auto e = cwalk::sample_reentry_point(k, {sx, sy}, sr, rng);
        j["reentry"] = {{"site", {e.site.x, e.site.y}},
                        {"rejections", e.rejections},
                        {"reject_radius", e.reject_radius},
                        {"residual_bias", e.residual_bias}};
      }
      j["version"] = cwalk::io::kVersion;
      emit(g, dump(j));
      return 0;
    };
  });

  // exp
  auto* exp = app.add_subcommand("exp", "experiments with JSON results");
  exp->require_subcommand(1);
  cwalk::UniformLawParams ul;
  std::string ul_mode = "direct", ul_psi = "leading";
  bool ul_naive = false;
  auto* e_ul = exp->add_subcommand("uniform-law", "vacant fraction of a target set against Uniform[0,1]");
  e_ul->add_option("--n", ul.n);
  e_ul->add_option("--set", ul.set_spec, "circle:r | annulus:r1,r2 | points:file");
  e_ul->add_option("--samples", ul.samples);
  e_ul->add_option("--M0", ul.m0);
  e_ul->add_option("--mode", ul_mode)->check(CLI::IsMember({"direct", "paper_faithful"}));
  e_ul->add_option("--psi", ul_psi)->check(CLI::IsMember({"leading", "exact"}));
  e_ul->add_flag("--naive", ul_naive);
  e_ul->add_option("--ks-threshold", ul.ks_threshold);
  e_ul->callback([&] {
    action = [&] {
      ul.mode = ul_mode == "direct" ? cwalk::ChainMode::kDirect : cwalk::ChainMode::kPaperFaithful;
      ul.psi = ul_psi == "exact" ? cwalk::PsiSource::kExact : cwalk::PsiSource::kLeading;
      ul.fast = !ul_naive;
      ul.threads = g.threads;
      const auto k = kernel_for(g);
      const auto run = cwalk::run_uniform_law(k, ul, resolve_seed(g.seed));
      emit(g, run.dump());
      return run.threshold_violated ? 2 : 0;
    };
  });
  cwalk::BigHolesParams bh;
  bool bh_naive = false;
  auto* e_bh = exp->add_subcommand("big-holes", "avoidance and escape frequencies for scaled copies of a region");
  e_bh->add_option("--region", bh.region_spec, "box:x0,x1,y0,y1;disk:cx,cy,r;sector:r0,r1,t0,t1");
  e_bh->add_option("--c3", bh.c3);
  e_bh->add_option("--scales", bh.scales)->delimiter(',');
  e_bh->add_option("--samples", bh.samples);
  e_bh->add_flag("--naive", bh_naive);
  e_bh->add_option("--p-avoid-min", bh.p_avoid_min);
  e_bh->callback([&] {
    action = [&] {
      bh.fast = !bh_naive;
      bh.threads = g.threads;
      const auto k = kernel_for(g);
      const auto run = cwalk::run_big_holes(k, bh, resolve_seed(g.seed));
      emit(g, run.dump());
      return run.threshold_violated ? 2 : 0;
    };
  });
  cwalk::RecurrenceParams rc;
  std::string rc_family = "axis", rc_finite = "points:";
  auto* e_rc = exp->add_subcommand("recurrence", "per-scale hits of the positive axis; visits to a finite set");
  e_rc->add_option("--family", rc_family)->check(CLI::IsMember({"axis"}));
  e_rc->add_option("--scales", rc.scales);
  e_rc->add_option("--base-radius", rc.base_radius);
  e_rc->add_option("--points-per-scale", rc.points_per_scale);
  e_rc->add_option("--samples", rc.samples);
  e_rc->add_option("--finite-runs", rc.finite_runs);
  e_rc->add_option("--finite-set", rc_finite, "circle:r | annulus:r1,r2 | points:file (default {(5,0)})");
  e_rc->add_option("--hit-threshold", rc.hit_threshold);
  e_rc->callback([&] {
    action = [&] {
      if (rc_finite != "points:") rc.finite_set = cwalk::parse_site_set(rc_finite);
      rc.threads = g.threads;
      const auto k = kernel_for(g);
      const auto run = cwalk::run_recurrence(k, rc, resolve_seed(g.seed));
      emit(g, run.dump());
      return run.threshold_violated ? 2 : 0;
    };
  });

  // oracle
  auto* oracle = app.add_subcommand("oracle", "exact linear-solve references");
  oracle->require_subcommand(1);
  std::string o_kind = "conditioned";
  double o_inner = 1, o_outer = 30;
  std::int64_t ox = 5, oy = 0;
  auto* o_solve = oracle->add_subcommand("solve", "P_x[leave B(R) before entering B(r)] by sparse solve");
  o_solve->add_option("--kind", o_kind)->check(CLI::IsMember({"srw", "conditioned"}));
  o_solve->add_option("--inner", o_inner, "r: absorbed on |x| <= r");
  o_solve->add_option("--outer", o_outer, "R: absorbed on |x| > R");
  o_solve->add_option("--x", ox);
  o_solve->add_option("--y", oy);
  o_solve->callback([&] {
    action = [&] {
      if (!(o_outer > o_inner + 1.0)) throw std::invalid_argument("need outer > inner + 1");
      const LatticePoint x0{ox, oy};
      if (!(x0.norm() > o_inner && x0.norm() <= o_outer)) throw std::invalid_argument("x must lie in the annulus");
      const auto k = kernel_for(g);
      std::vector<LatticePoint> interior;
      const auto e = static_cast<std::int64_t>(std::floor(o_outer));
      for (std::int64_t i = -e; i <= e; ++i)
        for (std::int64_t j = -e; j <= e; ++j) {
          const LatticePoint p{i, j};
          if (p.norm() > o_inner && p.norm() <= o_outer) interior.push_back(p);
        }
      std::vector<std::vector<LatticePoint>> classes(2);
      for (const auto& p : cwalk::outer_shell(interior)) {
        if (p.norm() > o_outer) classes[0].push_back(p);
        else if (!(p.is_origin() && o_kind == "conditioned")) classes[1].push_back(p);
      }
      if (o_kind == "conditioned" && o_inner < 1.0) throw std::invalid_argument("conditioned walk needs inner >= 1");
      const auto sol = cwalk::solve_hitting_exact(k, interior, classes, parse_kind(o_kind));
      emit(g, dump({{"kind", o_kind},
                    {"inner", o_inner},
                    {"outer", o_outer},
                    {"x", {ox, oy}},
                    {"p_outer", sol.at(x0, 0)},
                    {"p_inner", sol.at(x0, 1)},
                    {"sites", interior.size()},
                    {"residual", sol.residual},
                    {"version", cwalk::io::kVersion}}));
      return 0;
    };
  });

  // kochen-stone
  auto* ks = app.add_subcommand("kochen-stone", "second-moment lower bound from marginals and pairwise joints");
  std::string ks_p, ks_j;
  ks->add_option("--p-file", ks_p, "whitespace-separated p_i")->required();
  ks->add_option("--pjoint-file", ks_j, "row-major matrix of P[E_i and E_j]")->required();
  ks->callback([&] {
    action = [&] {
      const auto p = read_numbers(ks_p);
      const auto flat = read_numbers(ks_j);
      if (flat.size() != p.size() * p.size()) throw std::invalid_argument("pjoint must be a square matrix matching p");
      std::vector<std::vector<double>> m(p.size(), std::vector<double>(p.size()));
      for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = 0; j < p.size(); ++j) m[i][j] = flat[i * p.size() + j];
      emit(g, dump({{"bound", cwalk::kochen_stone_bound(p, m)}, {"version", cwalk::io::kVersion}}));
      return 0;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  try {
    return action ? action() : 1;
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const cwalk::ResourceError& e) {
    std::cerr << "resource cap: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
