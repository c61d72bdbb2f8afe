#pragma once

#include <string>
#include <string_view>

#include "cwalk/kernel.hpp"
#include "cwalk/lattice.hpp"

namespace cwalk {

/// Value of an asymptotic formula together with an absolute bound for its
/// O-term. value is clamped to [0, 1].
struct ProbabilityWithError {
  double value = 0.0;
  double error_bound = 0.0;
  std::string formula_id;
};

/// Clamps v to [0, 1]. Throws InconsistentInputError when v lies outside by
/// more than 1e-9.
double clamp_probability(double v, std::string_view what);

/// Probability that the conditioned walk from x ever returns to x:
/// 1 - 1/(2 a(x)).
double prob_return_same_site(const PotentialKernel& kernel, LatticePoint x);

/// Probability that the conditioned walk from x ever visits y:
/// (a(x) + a(y) - a(x - y)) / (2 a(x)).
double prob_hit_other_site(const PotentialKernel& kernel, LatticePoint x, LatticePoint y);

/// Simple random walk from x: probability of hitting y before leaving B(R),
/// 1 - a(x - y)/a(R). Requires x != y and x, y in B(R/2).
ProbabilityWithError srw_hit_before_exit(const PotentialKernel& kernel, LatticePoint x,
                                         LatticePoint y, double R);

/// Conditioned walk from x: probability of leaving B(R) before entering B(r),
///   (1/a(r) - 1/a(x)) / (1/a(r) - 1/a(R)),  1 < r < R, r <= |x| <= R.
ProbabilityWithError cond_exit_before_inner(const PotentialKernel& kernel, LatticePoint x,
                                            double r, double R);

/// Conditioned walk from x: probability of never entering B(r),
/// 1 - a(r)/a(x), 1 <= r <= |x|.
ProbabilityWithError cond_never_hit_disk(const PotentialKernel& kernel, LatticePoint x, double r);

/// Conditioned walk from x: probability of visiting y before leaving
/// B(n ln^2 n),
///   (a(x)a(R) + a(y)a(R) - a(x-y)a(R) - a(x)a(y)) / (a(x)(2a(R) - a(y))).
/// Requires |x| >= n/ln^M0 n and n/ln^M0 n <= |y| <= n. error_bound is
/// relative kExcursion/ln^3 n.
ProbabilityWithError excursion_hit_prob(const PotentialKernel& kernel, LatticePoint x,
                                        LatticePoint y, double n, double m0 = 1.0);

/// Leading term lnln n / ln n of excursion_hit_prob for x on the boundary of
/// B(n ln n); error_bound is relative lnln n / ln n.
ProbabilityWithError excursion_hit_leading(double n);

/// Leading term (2 lnln n + ln b)/ln n for a start z at distance n/b from y.
ProbabilityWithError excursion_hit_leading_near(double n, double b);

struct TwoTargetQuantities {
  double h1 = 0.0, h2 = 0.0, q12 = 0.0, q21 = 0.0, p1 = 0.0, p2 = 0.0;
};

/// Solves h1 = p1 + p2 q21, h2 = p2 + p1 q12 for the first-hit split.
/// Throws SingularInputError when q12 q21 == 1 and InconsistentInputError
/// when an input or a result lies outside [0, 1] by more than 1e-9.
TwoTargetQuantities two_target_split(double h1, double h2, double q12, double q21);

/// Per-excursion escape probability in its leading form
/// lnln n / (ln n + 2 lnln n). This form omits the constant of the kernel
/// asymptotics, so error_bound contains the O(1/n) term plus the gap to
/// psi_exact.
ProbabilityWithError psi_n(double n);

/// 1 - a(n ln n)/a(n ln^2 n) with the real-argument asymptotic kernel; the
/// escape probability from the boundary of B(n ln^2 n) to its resolver
/// accuracy. Requires n >= 16.
ProbabilityWithError psi_exact(double n);

/// Inner and outer radii n ln n and n ln^2 n.
double excursion_inner_radius(double n);
double excursion_outer_radius(double n);

}  // namespace cwalk
