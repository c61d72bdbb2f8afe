#include "cwalk/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cwalk::stats {

double dkw_epsilon(std::size_t m, double alpha) {
  if (m == 0) throw std::invalid_argument("dkw_epsilon needs samples");
  return std::sqrt(std::log(2.0 / alpha) / (2.0 * static_cast<double>(m)));
}

KsResult ks_uniform(std::span<const double> samples) {
  if (samples.empty()) throw std::invalid_argument("ks_uniform needs samples");
  std::vector<double> v(samples.begin(), samples.end());
  std::sort(v.begin(), v.end());
  const double m = static_cast<double>(v.size());
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double f = std::clamp(v[i], 0.0, 1.0);
    d = std::max({d, static_cast<double>(i + 1) / m - f, f - static_cast<double>(i) / m});
  }
  return {d, dkw_epsilon(v.size()), v.size()};
}

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample needs samples");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double t = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= t) ++i;
    while (j < y.size() && y[j] <= t) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / static_cast<double>(x.size()) -
                             static_cast<double>(j) / static_cast<double>(y.size())));
  }
  return d;
}

std::map<std::int64_t, double> empirical_pmf(std::span<const std::int64_t> samples) {
  if (samples.empty()) throw std::invalid_argument("empirical_pmf needs samples");
  std::map<std::int64_t, double> pmf;
  for (auto k : samples) pmf[k] += 1.0;
  for (auto& [k, v] : pmf) v /= static_cast<double>(samples.size());
  return pmf;
}

double geometric_pmf(std::int64_t k, double p) {
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("geometric parameter outside (0, 1]");
  if (k < 1) return 0.0;
  return std::pow(1.0 - p, static_cast<double>(k - 1)) * p;
}

double tv_to_geometric(std::span<const std::int64_t> samples, double p) {
  const auto pmf = empirical_pmf(samples);
  double sum = 0.0, covered = 0.0;
  for (const auto& [k, f] : pmf) {
    const double g = geometric_pmf(k, p);
    sum += std::abs(f - g);
    covered += g;
  }
  sum += 1.0 - covered;  // geometric mass on values never observed
  return 0.5 * sum;
}

double tv_distance(std::span<const std::int64_t> a, std::span<const std::int64_t> b) {
  const auto pa = empirical_pmf(a);
  auto pb = empirical_pmf(b);
  double sum = 0.0;
  for (const auto& [k, f] : pa) {
    const auto it = pb.find(k);
    const double g = it == pb.end() ? 0.0 : it->second;
    sum += std::abs(f - g);
    if (it != pb.end()) pb.erase(it);
  }
  for (const auto& [k, g] : pb) sum += g;
  return 0.5 * sum;
}

MeanEstimate mean_estimate(std::span<const double> samples) {
  if (samples.empty()) throw std::invalid_argument("mean_estimate needs samples");
  const double m = static_cast<double>(samples.size());
  double mean = 0.0;
  for (double v : samples) mean += v;
  mean /= m;
  double ss = 0.0;
  for (double v : samples) ss += (v - mean) * (v - mean);
  const double var = samples.size() > 1 ? ss / (m - 1.0) : 0.0;
  return {mean, std::sqrt(var / m), samples.size()};
}

MeanEstimate proportion(std::size_t successes, std::size_t trials) {
  if (trials == 0 || successes > trials) throw std::invalid_argument("invalid proportion");
  const double p = static_cast<double>(successes) / static_cast<double>(trials);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(trials)), trials};
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of nothing");
  std::sort(values.begin(), values.end());
  const std::size_t h = values.size() / 2;
  return values.size() % 2 ? values[h] : 0.5 * (values[h - 1] + values[h]);
}

}  // namespace cwalk::stats
