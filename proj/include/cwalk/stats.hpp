#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

namespace cwalk::stats {

struct KsResult {
  double statistic = 0.0;
  /// DKW half-width sqrt(ln(2/alpha) / (2m)) at alpha = 0.05.
  double dkw_epsilon = 0.0;
  std::size_t samples = 0;
};

/// Kolmogorov-Smirnov distance of the empirical CDF to Uniform[0, 1].
KsResult ks_uniform(std::span<const double> samples);

/// Two-sample KS distance sup |F1 - F2|.
double ks_two_sample(std::span<const double> a, std::span<const double> b);

double dkw_epsilon(std::size_t m, double alpha = 0.05);

/// Empirical probability mass function of integer samples.
std::map<std::int64_t, double> empirical_pmf(std::span<const std::int64_t> samples);

/// Geometric law on {1, 2, ...}: P[k] = (1 - p)^(k - 1) p.
double geometric_pmf(std::int64_t k, double p);

/// Total variation distance between an empirical pmf and Geometric(p) on
/// {1, 2, ...}, tail mass included.
double tv_to_geometric(std::span<const std::int64_t> samples, double p);

/// Total variation distance between two empirical pmfs.
double tv_distance(std::span<const std::int64_t> a, std::span<const std::int64_t> b);

struct MeanEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t samples = 0;
};

MeanEstimate mean_estimate(std::span<const double> samples);

/// Bernoulli frequency with its binomial standard error.
MeanEstimate proportion(std::size_t successes, std::size_t trials);

double median(std::vector<double> values);

}  // namespace cwalk::stats
