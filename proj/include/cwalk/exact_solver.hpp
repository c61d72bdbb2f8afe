#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "cwalk/kernel.hpp"
#include "cwalk/lattice.hpp"
#include "cwalk/walk.hpp"

namespace cwalk {

/// Sites whose nearest neighbours leave `interior`, sorted.
std::vector<LatticePoint> outer_shell(std::span<const LatticePoint> interior);

/// u(x) = E_x[f(X_tau)] on the interior, tau the first exit from it.
struct DirichletSolution {
  SiteIndex interior;
  std::vector<double> values;  // aligned with interior.sites()
  double residual = 0.0;       // max-norm residual of the linear system

  double at(LatticePoint p) const;
};

struct ExactSolverOptions {
  std::size_t max_sites = 100'000;
  double residual_tolerance = 1e-12;
};

/// Solves the Dirichlet problem for the chosen walk on a finite interior.
/// boundary_value is called for every neighbour of the interior that lies
/// outside it (the origin is skipped for the conditioned walk, which never
/// steps there). Throws ResourceError above max_sites, std::invalid_argument
/// for an empty interior or a conditioned walk through the origin, and
/// NumericError when the residual stays above tolerance after refinement.
DirichletSolution solve_dirichlet(const PotentialKernel& kernel,
                                  std::span<const LatticePoint> interior, WalkKind kind,
                                  const std::function<double(LatticePoint)>& boundary_value,
                                  const ExactSolverOptions& options = {});

/// Probability of absorption in each class, per interior site.
struct HittingSolution {
  SiteIndex interior;
  std::vector<std::vector<double>> probabilities;  // [class][site]
  double residual = 0.0;

  double at(LatticePoint p, std::size_t cls) const;
};

/// Every outside neighbour of the interior must belong to exactly one
/// absorbing class (std::invalid_argument otherwise); classes must be
/// nonempty.
HittingSolution solve_hitting_exact(const PotentialKernel& kernel,
                                    std::span<const LatticePoint> interior,
                                    const std::vector<std::vector<LatticePoint>>& absorbing,
                                    WalkKind kind, const ExactSolverOptions& options = {});

}  // namespace cwalk
