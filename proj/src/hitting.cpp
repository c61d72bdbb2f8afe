#include "cwalk/hitting.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "cwalk/calibration.hpp"
#include "cwalk/errors.hpp"

namespace cwalk {

namespace {

constexpr double kClampTolerance = 1e-9;

void require_not_origin(LatticePoint p, const char* what) {
  if (p.is_origin()) throw std::invalid_argument(std::string(what) + " must not be the origin");
}

ProbabilityWithError make(double value, double error, const char* id) {
  return {clamp_probability(value, id), std::max(error, 0.0), id};
}

double lnln(double n) { return std::log(std::log(n)); }

}  // namespace

double clamp_probability(double v, std::string_view what) {
  if (std::isnan(v) || v < -kClampTolerance || v > 1.0 + kClampTolerance)
    throw InconsistentInputError(std::string(what) + ": probability " + std::to_string(v) +
                                 " outside [0, 1]");
  return std::clamp(v, 0.0, 1.0);
}

double prob_return_same_site(const PotentialKernel& kernel, LatticePoint x) {
  require_not_origin(x, "x");
  return 1.0 - 1.0 / (2.0 * kernel(x));
}

double prob_hit_other_site(const PotentialKernel& kernel, LatticePoint x, LatticePoint y) {
  require_not_origin(x, "x");
  require_not_origin(y, "y");
  if (x == y) throw std::invalid_argument("x == y; use prob_return_same_site");
  const double v = (kernel(x) + kernel(y) - kernel(x - y)) / (2.0 * kernel(x));
  return std::clamp(v, 0.0, 1.0);
}

ProbabilityWithError srw_hit_before_exit(const PotentialKernel& kernel, LatticePoint x,
                                         LatticePoint y, double R) {
  if (x == y) throw std::invalid_argument("x == y");
  if (!(R >= 2.0) || 2.0 * x.norm() > R || 2.0 * y.norm() > R)
    throw std::invalid_argument("x and y must lie in B(R/2), R >= 2");
  const double aR = asymptotic_a(R);
  const double axy = kernel(x - y);
  const double shift = calibration::kSrwHit * std::max(y.norm(), 1.0) / R;
  const double err = axy / (aR - shift) - axy / aR;
  return make(1.0 - axy / aR, err, "srw_hit_before_exit");
}

ProbabilityWithError cond_exit_before_inner(const PotentialKernel& kernel, LatticePoint x,
                                            double r, double R) {
  const double nx = x.norm();
  if (!(1.0 < r && r < R && r <= nx && nx <= R)) throw std::invalid_argument("need 1 < r <= |x| <= R, r < R");
  const double ax = kernel(x);
  auto value = [&](double ar, double aR) { return (1.0 / ar - 1.0 / ax) / (1.0 / ar - 1.0 / aR); };
  const double ar = asymptotic_a(r);
  const double aR = asymptotic_a(R);
  const double v = value(ar, aR);
  const double dr = calibration::kExit / r;
  const double dR = calibration::kExit / R;
  double err = 0.0;
  for (double sr : {-1.0, 1.0})
    for (double sR : {-1.0, 1.0}) {
      const double w = value(ar + sr * dr, aR + sR * dR);
      if (std::isfinite(w)) err = std::max(err, std::abs(w - v));
    }
  return make(std::clamp(v, 0.0, 1.0), err, "cond_exit_before_inner");
}

ProbabilityWithError cond_never_hit_disk(const PotentialKernel& kernel, LatticePoint x, double r) {
  if (!(r >= 1.0) || x.norm() < r) throw std::invalid_argument("need 1 <= r <= |x|");
  const double ax = kernel(x);
  const double v = 1.0 - asymptotic_a(r) / ax;
  return make(std::clamp(v, 0.0, 1.0), calibration::kEscape / (r * ax), "cond_never_hit_disk");
}

ProbabilityWithError excursion_hit_prob(const PotentialKernel& kernel, LatticePoint x,
                                        LatticePoint y, double n, double m0) {
  if (!(n >= 16.0)) throw std::invalid_argument("n must be >= 16");
  if (!(m0 > 0.0)) throw std::invalid_argument("M0 must be positive");
  const double ln = std::log(n);
  const double inner = n / std::pow(ln, m0);
  if (x.norm() < inner) throw std::invalid_argument("|x| must be >= n / ln^M0 n");
  if (y.norm() < inner || y.norm() > n)
    throw std::invalid_argument("y must lie in B(n) minus B(n / ln^M0 n)");
  const double R = excursion_outer_radius(n);
  if (x.norm() > R) throw std::invalid_argument("|x| must not exceed n ln^2 n");
  const double aR = asymptotic_a(R);
  const double ax = kernel(x);
  const double ay = kernel(y);
  const double num = ax * aR + ay * aR - kernel(x - y) * aR - ax * ay;
  const double den = ax * (2.0 * aR - ay);
  const double v = x == y ? 1.0 : num / den;
  const double clamped = std::clamp(v, 0.0, 1.0);
  return make(clamped, clamped * calibration::kExcursion / (ln * ln * ln), "excursion_hit_prob");
}

ProbabilityWithError excursion_hit_leading(double n) {
  if (!(n >= 16.0)) throw std::invalid_argument("n must be >= 16");
  const double v = lnln(n) / std::log(n);
  return make(v, v * v, "excursion_hit_leading");
}

ProbabilityWithError excursion_hit_leading_near(double n, double b) {
  if (!(n >= 16.0)) throw std::invalid_argument("n must be >= 16");
  if (!(b >= 1.0)) throw std::invalid_argument("b must be >= 1");
  const double v = (2.0 * lnln(n) + std::log(b)) / std::log(n);
  return make(std::min(v, 1.0), v * lnln(n) / std::log(n), "excursion_hit_leading_near");
}

TwoTargetQuantities two_target_split(double h1, double h2, double q12, double q21) {
  TwoTargetQuantities t;
  t.h1 = clamp_probability(h1, "h1");
  t.h2 = clamp_probability(h2, "h2");
  t.q12 = clamp_probability(q12, "q12");
  t.q21 = clamp_probability(q21, "q21");
  const double det = 1.0 - t.q12 * t.q21;
  if (det == 0.0) throw SingularInputError("q12 * q21 == 1");
  t.p1 = clamp_probability((t.h1 - t.h2 * t.q21) / det, "p1");
  t.p2 = clamp_probability((t.h2 - t.h1 * t.q12) / det, "p2");
  return t;
}

double excursion_inner_radius(double n) { return n * std::log(n); }

double excursion_outer_radius(double n) {
  const double l = std::log(n);
  return n * l * l;
}

ProbabilityWithError psi_exact(double n) {
  if (!(n >= 16.0)) throw std::invalid_argument("n must be >= 16");
  const double r = excursion_inner_radius(n);
  const double aR = asymptotic_a(excursion_outer_radius(n));
  const double v = 1.0 - asymptotic_a(r) / aR;
  return make(v, calibration::kEscape / (r * aR), "psi_exact");
}

ProbabilityWithError psi_n(double n) {
  if (!(n >= 16.0)) throw std::invalid_argument("n must be >= 16");
  const double v = lnln(n) / (std::log(n) + 2.0 * lnln(n));
  const auto exact = psi_exact(n);
  return make(v, v / n + std::abs(exact.value - v) + exact.error_bound, "psi_n");
}

}  // namespace cwalk
