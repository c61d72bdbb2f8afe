#include <cstdlib>
#include <stdexcept>
#include <string>

#include "cwalk/simd.hpp"

namespace cwalk::simd {
namespace {

void check_shapes(std::span<const double> w, std::span<double> re, std::span<double> im,
                  std::span<const double> cr, std::span<const double> sr) {
  const std::size_t n = w.size();
  if (re.size() != n || im.size() != n || cr.size() != n || sr.size() != n)
    throw std::invalid_argument("dot_and_rotate: span lengths differ");
  if (n % kLaneBlock != 0)
    throw std::invalid_argument("dot_and_rotate: length must be a multiple of 4");
}

Isa best_supported() {
  if (isa_supported(Isa::kAvx2)) return Isa::kAvx2;
  if (isa_supported(Isa::kNeon)) return Isa::kNeon;
  return Isa::kScalar;
}

Isa select_isa() {
  if (const char* env = std::getenv("CWALK_SIMD")) {
    const std::string v(env);
    Isa want = Isa::kScalar;
    if (v == "avx2") want = Isa::kAvx2;
    else if (v == "neon") want = Isa::kNeon;
    return isa_supported(want) ? want : Isa::kScalar;
  }
  return best_supported();
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar: return "scalar";
    case Isa::kAvx2: return "avx2";
    case Isa::kNeon: return "neon";
  }
  return "unknown";
}

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
#if defined(__x86_64__) || defined(__i386__)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::kNeon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa active_isa() {
  static const Isa isa = select_isa();
  return isa;
}

double dot_and_rotate(Isa isa, std::span<const double> w, std::span<double> re,
                      std::span<double> im, std::span<const double> cr,
                      std::span<const double> sr) {
  check_shapes(w, re, im, cr, sr);
  if (!isa_supported(isa))
    throw std::invalid_argument("SIMD variant not supported on this CPU: " +
                                std::string(isa_name(isa)));
  switch (isa) {
#if defined(__x86_64__) || defined(__i386__)
    case Isa::kAvx2: return dot_and_rotate_avx2(w, re, im, cr, sr);
#endif
#if defined(__aarch64__)
    case Isa::kNeon: return dot_and_rotate_neon(w, re, im, cr, sr);
#endif
    default: return dot_and_rotate_scalar(w, re, im, cr, sr);
  }
}

double dot_and_rotate(std::span<const double> w, std::span<double> re, std::span<double> im,
                      std::span<const double> cr, std::span<const double> sr) {
  return dot_and_rotate(active_isa(), w, re, im, cr, sr);
}

}  // namespace cwalk::simd
