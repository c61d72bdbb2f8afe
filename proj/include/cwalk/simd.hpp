#pragma once

#include <cstddef>
#include <span>
#include <string_view>

// Data-parallel inner loop of the potential-kernel quadrature.
//
// Each quadrature node k carries a weight w[k] and a unit phasor
// (re[k], im[k]) = (cos j*theta_k, sin j*theta_k). One call accumulates
// sum_k w[k]*re[k] and then advances every phasor by its own rotation
// (cr[k], sr[k]) = (cos theta_k, sin theta_k).
//
// All variants use four interleaved accumulators (lane k % 4), fused
// multiply-adds in the same places and the same final reduction order, so
// every ISA produces bit-identical results. Spans must have equal length,
// a multiple of kLaneBlock.

namespace cwalk::simd {

inline constexpr std::size_t kLaneBlock = 4;

enum class Isa { kScalar, kAvx2, kNeon };

std::string_view isa_name(Isa isa);
bool isa_supported(Isa isa);

/// ISA used by dot_and_rotate. Chosen once: CWALK_SIMD=scalar|avx2|neon
/// forces a variant (falling back to scalar if unsupported), otherwise the
/// best supported one.
Isa active_isa();

double dot_and_rotate_scalar(std::span<const double> w, std::span<double> re,
                             std::span<double> im, std::span<const double> cr,
                             std::span<const double> sr);

#if defined(__x86_64__) || defined(__i386__)
double dot_and_rotate_avx2(std::span<const double> w, std::span<double> re,
                           std::span<double> im, std::span<const double> cr,
                           std::span<const double> sr);
#endif

#if defined(__aarch64__)
double dot_and_rotate_neon(std::span<const double> w, std::span<double> re,
                           std::span<double> im, std::span<const double> cr,
                           std::span<const double> sr);
#endif

/// Runtime-dispatched entry point.
double dot_and_rotate(std::span<const double> w, std::span<double> re, std::span<double> im,
                      std::span<const double> cr, std::span<const double> sr);

/// Dispatch to an explicit variant; throws std::invalid_argument when the
/// variant is not available on this machine.
double dot_and_rotate(Isa isa, std::span<const double> w, std::span<double> re,
                      std::span<double> im, std::span<const double> cr,
                      std::span<const double> sr);

}  // namespace cwalk::simd
