#include "cwalk/simd.hpp"

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>

namespace cwalk::simd {

__attribute__((target("avx2,fma"))) double dot_and_rotate_avx2(
    std::span<const double> w, std::span<double> re, std::span<double> im,
    std::span<const double> cr, std::span<const double> sr) {
  const std::size_t n = w.size();
  __m256d acc = _mm256_setzero_pd();
  for (std::size_t i = 0; i < n; i += kLaneBlock) {
    const __m256d vw = _mm256_loadu_pd(w.data() + i);
    const __m256d vre = _mm256_loadu_pd(re.data() + i);
    const __m256d vim = _mm256_loadu_pd(im.data() + i);
    const __m256d vcr = _mm256_loadu_pd(cr.data() + i);
    const __m256d vsr = _mm256_loadu_pd(sr.data() + i);
    acc = _mm256_fmadd_pd(vw, vre, acc);
    const __m256d t = _mm256_mul_pd(vim, vsr);
    const __m256d u = _mm256_mul_pd(vim, vcr);
    _mm256_storeu_pd(re.data() + i, _mm256_fmsub_pd(vre, vcr, t));
    _mm256_storeu_pd(im.data() + i, _mm256_fmadd_pd(vre, vsr, u));
  }
  alignas(32) double lanes[kLaneBlock];
  _mm256_store_pd(lanes, acc);
  return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

}  // namespace cwalk::simd
#endif

#if defined(__aarch64__)
#include <arm_neon.h>

namespace cwalk::simd {

double dot_and_rotate_neon(std::span<const double> w, std::span<double> re,
                           std::span<double> im, std::span<const double> cr,
                           std::span<const double> sr) {
  const std::size_t n = w.size();
  // Two 2-lane accumulators hold lanes {0,1} and {2,3}.
  float64x2_t acc_lo = vdupq_n_f64(0.0);
  float64x2_t acc_hi = vdupq_n_f64(0.0);
  for (std::size_t i = 0; i < n; i += kLaneBlock) {
    for (std::size_t h = 0; h < 2; ++h) {
      const std::size_t k = i + 2 * h;
      const float64x2_t vw = vld1q_f64(w.data() + k);
      const float64x2_t vre = vld1q_f64(re.data() + k);
      const float64x2_t vim = vld1q_f64(im.data() + k);
      const float64x2_t vcr = vld1q_f64(cr.data() + k);
      const float64x2_t vsr = vld1q_f64(sr.data() + k);
      if (h == 0) {
        acc_lo = vfmaq_f64(acc_lo, vw, vre);
      } else {
        acc_hi = vfmaq_f64(acc_hi, vw, vre);
      }
      const float64x2_t t = vmulq_f64(vim, vsr);
      const float64x2_t u = vmulq_f64(vim, vcr);
      vst1q_f64(re.data() + k, vfmaq_f64(vnegq_f64(t), vre, vcr));
      vst1q_f64(im.data() + k, vfmaq_f64(u, vre, vsr));
    }
  }
  double lanes[kLaneBlock];
  vst1q_f64(lanes, acc_lo);
  vst1q_f64(lanes + 2, acc_hi);
  return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

}  // namespace cwalk::simd
#endif
