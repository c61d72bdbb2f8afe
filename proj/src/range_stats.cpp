#include "cwalk/range_stats.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

#include "cwalk/io.hpp"

namespace cwalk {

namespace {
void require_nonempty(const SiteSet& a) {
  if (a.size() == 0) throw std::invalid_argument("target set is empty");
}
}  // namespace

RangeFractions visited_fraction(const SiteSet& a,
                                const std::unordered_set<LatticePoint, LatticePointHash>& range) {
  require_nonempty(a);
  std::size_t hit = 0;
  for (const auto& p : a.sites.sites()) hit += range.count(p);
  const double r = static_cast<double>(hit) / static_cast<double>(a.size());
  return {r, 1.0 - r};
}

RangeFractions visited_fraction(const VisitTracker& tracker) {
  if (tracker.sites().empty()) throw std::invalid_argument("target set is empty");
  const double r = static_cast<double>(tracker.count()) / static_cast<double>(tracker.sites().size());
  return {r, 1.0 - r};
}

double ell_a(const SiteSet& a, double n, double m0) {
  require_nonempty(a);
  if (!(n >= 16.0) || !(m0 > 0.0)) throw std::invalid_argument("need n >= 16 and M0 > 0");
  const double rho = n / std::pow(std::log(n), m0);
  const double rho2 = rho * rho;
  const double cell = std::max(rho, 1.0);
  auto key = [&](LatticePoint p) {
    return LatticePoint{static_cast<std::int64_t>(std::floor(static_cast<double>(p.x) / cell)),
                        static_cast<std::int64_t>(std::floor(static_cast<double>(p.y) / cell))};
  };
  std::unordered_map<LatticePoint, std::vector<LatticePoint>, LatticePointHash> grid;
  for (const auto& p : a.sites.sites()) grid[key(p)].push_back(p);
  std::size_t best = 0;
  for (const auto& y : a.sites.sites()) {
    const auto c = key(y);
    std::size_t count = 0;
    for (std::int64_t dx = -1; dx <= 1; ++dx)
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        const auto it = grid.find({c.x + dx, c.y + dy});
        if (it == grid.end()) continue;
        for (const auto& z : it->second)
          if ((z - y).norm2_real() <= rho2) ++count;
      }
    best = std::max(best, count);
  }
  return static_cast<double>(best) / static_cast<double>(a.size());
}

double survival_curve_mu(std::int64_t k, double n) {
  if (k < 0 || !(n >= 16.0)) throw std::invalid_argument("need k >= 0 and n >= 16");
  return std::exp(-static_cast<double>(k) * std::log(std::log(n)) / std::log(n));
}

bool CoverageCurve::nonincreasing() const {
  for (std::size_t i = 1; i < fractions.size(); ++i)
    if (fractions[i] > fractions[i - 1]) return false;
  return true;
}

void CoverageCurve::write_csv(std::ostream& out) const {
  out << "k,V\n";
  for (std::size_t i = 0; i < ks.size(); ++i) out << ks[i] << ',' << io::format_double(fractions[i]) << '\n';
}

std::optional<std::int64_t> phi_s(const CoverageCurve& curve, double s) {
  if (!(s > 0.0 && s <= 1.0)) throw std::invalid_argument("s must lie in (0, 1]");
  for (std::size_t i = 0; i < curve.fractions.size(); ++i)
    if (curve.fractions[i] <= s) return curve.ks[i];
  return std::nullopt;
}

CovarianceProbe pairwise_covariance_probe(const SiteSet& a,
                                          const std::vector<std::vector<std::uint8_t>>& vacant,
                                          double n, double m0, std::size_t max_sites) {
  require_nonempty(a);
  if (vacant.size() < 100) throw std::invalid_argument("covariance probe needs >= 100 chains");
  for (const auto& row : vacant)
    if (row.size() != a.size()) throw std::invalid_argument("indicator row does not match |A|");
  if (!(n >= 16.0) || !(m0 > 0.0) || max_sites == 0)
    throw std::invalid_argument("need n >= 16, M0 > 0, max_sites > 0");
  const double rho = n / std::pow(std::log(n), m0);
  std::vector<std::size_t> pick;
  const std::size_t stride = std::max<std::size_t>(1, (a.size() + max_sites - 1) / max_sites);
  for (std::size_t i = 0; i < a.size(); i += stride) pick.push_back(i);

  const double m = static_cast<double>(vacant.size());
  std::vector<double> mu(pick.size(), 0.0);
  for (std::size_t j = 0; j < pick.size(); ++j) {
    for (const auto& row : vacant) mu[j] += row[pick[j]];
    mu[j] /= m;
  }
  CovarianceProbe probe;
  probe.max_covariance = -1.0;
  double total = 0.0;
  const auto& sites = a.sites.sites();
  for (std::size_t i = 0; i < pick.size(); ++i)
    for (std::size_t j = i + 1; j < pick.size(); ++j) {
      if ((sites[pick[i]] - sites[pick[j]]).norm() < rho) continue;
      double both = 0.0, sq = 0.0;
      for (const auto& row : vacant) {
        const double t = (row[pick[i]] - mu[i]) * (row[pick[j]] - mu[j]);
        both += t;
        sq += t * t;
      }
      const double cov = both / (m - 1.0);
      const double var_t = std::max(sq / m - (both / m) * (both / m), 0.0);
      ++probe.pairs;
      total += cov;
      if (cov > probe.max_covariance) {
        probe.max_covariance = cov;
        probe.max_standard_error = std::sqrt(var_t / m);
      }
    }
  if (probe.pairs == 0) probe.max_covariance = 0.0;
  probe.mean_covariance = probe.pairs ? total / static_cast<double>(probe.pairs) : 0.0;
  return probe;
}

}  // namespace cwalk
