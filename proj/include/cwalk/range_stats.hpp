#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "cwalk/lattice.hpp"
#include "cwalk/walk.hpp"

namespace cwalk {

/// Finite target set with a label. Duplicates are removed.
struct SiteSet {
  SiteIndex sites;
  std::string label;

  SiteSet() = default;
  SiteSet(std::span<const LatticePoint> points, std::string name)
      : sites(points), label(std::move(name)) {}
  std::size_t size() const { return sites.size(); }
};

struct RangeFractions {
  double visited = 0.0;
  double vacant = 1.0;
};

/// R = |A ∩ range| / |A| and V = 1 - R. Throws on empty A.
RangeFractions visited_fraction(const SiteSet& a,
                                const std::unordered_set<LatticePoint, LatticePointHash>& range);

/// Same from a tracker that watched A.
RangeFractions visited_fraction(const VisitTracker& tracker);

/// max over y in A of |A ∩ B(y, n / ln^M0 n)|, divided by |A|. Sites are
/// bucketed on a grid of side n / ln^M0 n so only neighbouring cells are
/// scanned; the count itself is exact.
double ell_a(const SiteSet& a, double n, double m0);

/// exp(-k lnln n / ln n).
double survival_curve_mu(std::int64_t k, double n);

/// Vacant fraction after the initial piece (k = 0) and each later excursion.
struct CoverageCurve {
  std::vector<std::int64_t> ks;
  std::vector<double> fractions;

  bool nonincreasing() const;
  /// Rows "k,V".
  void write_csv(std::ostream& out) const;
};

/// Least k with V^(k) <= s, or nothing. Requires 0 < s <= 1.
std::optional<std::int64_t> phi_s(const CoverageCurve& curve, double s);

struct CovarianceProbe {
  std::size_t pairs = 0;
  double max_covariance = 0.0;
  double max_standard_error = 0.0;  // MC error of the pair attaining the max
  double mean_covariance = 0.0;
};

/// Covariance of vacant indicators over pairs of A at distance at least
/// n / ln^M0 n. vacant[c][i] is 1 when site i of A is unvisited in chain c.
/// At most max_sites evenly spaced sites of A enter the pairing. Needs at
/// least 100 chains.
CovarianceProbe pairwise_covariance_probe(const SiteSet& a,
                                          const std::vector<std::vector<std::uint8_t>>& vacant,
                                          double n, double m0, std::size_t max_sites = 256);

}  // namespace cwalk
