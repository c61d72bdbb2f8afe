#pragma once

// Constants for error terms whose size is only known up to O(.). Each one is
// measured by tools/calibrate against the exact finite-domain solver and
// frozen here with headroom. Most are shifts of a kernel value at a real
// radius: the walk stops on a discrete circle, not at exactly |x| = r.

namespace cwalk::calibration {

/// SRW hit-before-exit: a(R) shifted by up to kSrwHit * max(|y|, 1) / R.
inline constexpr double kSrwHit = 0.5;  // measured 0.23

/// Conditioned annulus exit: a(r), a(R) shifted by up to kExit/r, kExit/R.
inline constexpr double kExit = 0.5;  // measured 0.23

/// Never-return resolver: a(r) shifted by up to kEscape / r.
inline constexpr double kEscape = 0.5;  // measured 0.26

/// Excursion hit formula: relative error <= kExcursion / ln^3 n.
inline constexpr double kExcursion = 6.0;  // measured 2.6 at n = 16

/// Excursion-count coupling: P[N != N_hat] <= kCouple * lnln n / (n ln n) / psi.
inline constexpr double kCouple = 1.0;  // not solver-measurable; direct mode shows N == N_hat

}  // namespace cwalk::calibration
