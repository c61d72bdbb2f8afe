#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <numbers>
#include <vector>

#include "cwalk/lattice.hpp"

namespace cwalk {

inline constexpr double kEulerGamma = std::numbers::egamma;
/// Constant term of the potential-kernel asymptotics, (2*gamma + 3 ln 2) / pi.
inline constexpr double kKappa =
    (2.0 * std::numbers::egamma + 3.0 * std::numbers::ln2) / std::numbers::pi;
/// kKappa expressed in units of (2/pi) ln 2: (2*gamma + 3 ln 2) / (2 ln 2).
inline constexpr double kGammaStar =
    (2.0 * std::numbers::egamma + 3.0 * std::numbers::ln2) / (2.0 * std::numbers::ln2);

/// (2/pi) ln r + kappa for a real radius r >= 1.
double asymptotic_a(double r);

/// asymptotic_a with the next two angular corrections,
///   - cos(4 phi) / (6 pi r^2) - (3/20 cos(4 phi) + 5/24 cos(8 phi)) / (pi r^4).
/// Residual is O(r^-6). p must not be the origin.
double refined_asymptotic_a(LatticePoint p);

struct KernelValue {
  double value = 0.0;
  double error_bound = 0.0;  // 0 for tabulated sites
  bool exact = true;         // false when answered by the expansion
};

struct KernelBuildOptions {
  std::size_t memory_cap_bytes = std::size_t{2} << 30;
};

/// Potential kernel a(x) of the planar simple random walk.
///
/// Values are tabulated on the octant 0 <= y <= x <= floor(max_radius) and
/// extended to Z^2 by the dihedral symmetries. Each entry comes from the
/// one-dimensional Fourier representation
///   a(x, y) = (2/pi) Int_0^pi (1 - e^{-|y| t} cos(x s)) / sinh t  ds,
///   cosh t = 2 - cos s,
/// evaluated with composite 20-point Gauss-Legendre panels. Every quadrature
/// term is itself discrete-harmonic off the axis, so the table is harmonic to
/// rounding. Sites outside the table use refined_asymptotic_a and carry an
/// error bound.
///
/// Immutable after construction; safe for concurrent reads.
class PotentialKernel {
 public:
  /// Throws std::invalid_argument when max_radius < 2 and ResourceError when
  /// the table would exceed options.memory_cap_bytes.
  static PotentialKernel build(double max_radius, const KernelBuildOptions& options = {});

  /// Rows "x,y,a" for the tabulated octant, 17 significant digits.
  void write_csv(std::ostream& out) const;
  /// Inverse of write_csv. The octant must be complete.
  static PotentialKernel read_csv(std::istream& in);

  double max_radius() const { return max_radius_; }
  std::int64_t extent() const { return extent_; }
  bool tabulated(LatticePoint p) const;

  double operator()(LatticePoint p) const {
    const std::int64_t ax = p.x < 0 ? -p.x : p.x;
    const std::int64_t ay = p.y < 0 ? -p.y : p.y;
    const std::int64_t hi = ax > ay ? ax : ay;
    if (hi <= extent_) {
      const std::int64_t lo = ax > ay ? ay : ax;
      return table_[static_cast<std::size_t>(hi * (hi + 1) / 2 + lo)];
    }
    return refined_asymptotic_a(p);
  }

  KernelValue query(LatticePoint p) const;

  /// max |a(x) - asymptotic_a(|x|)| * |x|^2 over tabulated 10 <= |x| <= max_radius.
  double asymptotic_constant() const { return asymptotic_constant_; }
  /// Constant C in the |x|^-6 error bound of the refined expansion, measured
  /// on the outer half of the table (floored at 1).
  double expansion_constant() const { return expansion_constant_; }

  static constexpr double gamma() { return kEulerGamma; }
  static constexpr double kappa() { return kKappa; }
  static constexpr double gamma_star() { return kGammaStar; }

 private:
  PotentialKernel(double max_radius, std::int64_t extent, std::vector<double> table);
  void measure_constants();

  double max_radius_ = 0.0;
  std::int64_t extent_ = 0;
  std::vector<double> table_;
  double asymptotic_constant_ = 0.0;
  double expansion_constant_ = 1.0;
};

/// Returns the kernel from $CWALK_KERNEL_CACHE/kernel_<extent>.csv when the
/// variable is set and the file exists, otherwise builds it (and writes the
/// cache file if the directory is set).
PotentialKernel load_or_build_kernel(double max_radius);

}  // namespace cwalk
