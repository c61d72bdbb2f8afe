#include <cmath>
#include <stdexcept>

#include "cwalk/simd.hpp"

namespace cwalk::simd {

double dot_and_rotate_scalar(std::span<const double> w, std::span<double> re,
                             std::span<double> im, std::span<const double> cr,
                             std::span<const double> sr) {
  const std::size_t n = w.size();
  double acc[kLaneBlock] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < n; i += kLaneBlock) {
    for (std::size_t l = 0; l < kLaneBlock; ++l) {
      const std::size_t k = i + l;
      acc[l] = std::fma(w[k], re[k], acc[l]);
      const double t = im[k] * sr[k];
      const double u = im[k] * cr[k];
      const double r = re[k];
      re[k] = std::fma(r, cr[k], -t);
      im[k] = std::fma(r, sr[k], u);
    }
  }
  return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

}  // namespace cwalk::simd
