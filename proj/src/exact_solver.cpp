#include "cwalk/exact_solver.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cwalk/errors.hpp"

namespace cwalk {

std::vector<LatticePoint> outer_shell(std::span<const LatticePoint> interior) {
  const SiteIndex in(interior);
  std::vector<LatticePoint> shell;
  for (const auto& p : in.sites())
    for (const auto& q : p.neighbours())
      if (!in.contains(q)) shell.push_back(q);
  std::sort(shell.begin(), shell.end());
  shell.erase(std::unique(shell.begin(), shell.end()), shell.end());
  return shell;
}

double DirichletSolution::at(LatticePoint p) const {
  const auto i = interior.index_of(p);
  if (i < 0) throw std::invalid_argument("site outside the solved interior");
  return values[static_cast<std::size_t>(i)];
}

double HittingSolution::at(LatticePoint p, std::size_t cls) const {
  const auto i = interior.index_of(p);
  if (i < 0) throw std::invalid_argument("site outside the solved interior");
  return probabilities.at(cls)[static_cast<std::size_t>(i)];
}

namespace {

using SparseMatrix = Eigen::SparseMatrix<double>;

struct System {
  SparseMatrix matrix;
  // Outside neighbours and the transition weight into them, per interior row.
  std::vector<std::vector<std::pair<LatticePoint, double>>> exits;
};

System assemble(const PotentialKernel& kernel, const SiteIndex& in, WalkKind kind) {
  const auto n = static_cast<Eigen::Index>(in.size());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(in.size() * 5);
  System sys;
  sys.exits.resize(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    const auto p = in.sites()[i];
    const auto row = static_cast<Eigen::Index>(i);
    trip.emplace_back(row, row, 1.0);
    std::array<double, 4> w{0.25, 0.25, 0.25, 0.25};
    if (kind == WalkKind::kConditioned) {
      if (p.is_origin()) throw std::invalid_argument("conditioned walk domain contains the origin");
      w = conditioned_step(kernel, p).weights;
    }
    const auto nb = p.neighbours();
    for (std::size_t k = 0; k < 4; ++k) {
      if (w[k] == 0.0) continue;
      const auto j = in.index_of(nb[k]);
      if (j >= 0)
        trip.emplace_back(row, static_cast<Eigen::Index>(j), -w[k]);
      else
        sys.exits[i].emplace_back(nb[k], w[k]);
    }
  }
  sys.matrix.resize(n, n);
  sys.matrix.setFromTriplets(trip.begin(), trip.end());
  sys.matrix.makeCompressed();
  return sys;
}

Eigen::MatrixXd solve_refined(const SparseMatrix& m, const Eigen::MatrixXd& rhs, double tolerance,
                              double& residual) {
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(m);
  lu.factorize(m);
  if (lu.info() != Eigen::Success) throw NumericError("sparse LU factorization failed");
  Eigen::MatrixXd x = lu.solve(rhs);
  for (int pass = 0; pass < 3; ++pass) {
    const Eigen::MatrixXd r = rhs - m * x;
    residual = r.cwiseAbs().maxCoeff();
    if (residual <= tolerance) return x;
    x += lu.solve(r);
  }
  residual = (rhs - m * x).cwiseAbs().maxCoeff();
  if (!(residual <= tolerance)) throw NumericError("exact solve did not reach the residual tolerance");
  return x;
}

SiteIndex checked_interior(std::span<const LatticePoint> interior, const ExactSolverOptions& o) {
  if (interior.empty()) throw std::invalid_argument("empty interior");
  if (interior.size() > o.max_sites) throw ResourceError("exact solver domain exceeds the site limit");
  return SiteIndex(interior);
}

}  // namespace

DirichletSolution solve_dirichlet(const PotentialKernel& kernel,
                                  std::span<const LatticePoint> interior, WalkKind kind,
                                  const std::function<double(LatticePoint)>& boundary_value,
                                  const ExactSolverOptions& options) {
  DirichletSolution sol;
  sol.interior = checked_interior(interior, options);
  const auto sys = assemble(kernel, sol.interior, kind);
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(sol.interior.size()), 1);
  for (std::size_t i = 0; i < sys.exits.size(); ++i)
    for (const auto& [q, w] : sys.exits[i]) rhs(static_cast<Eigen::Index>(i), 0) += w * boundary_value(q);
  const Eigen::MatrixXd x = solve_refined(sys.matrix, rhs, options.residual_tolerance, sol.residual);
  sol.values.assign(x.data(), x.data() + x.rows());
  return sol;
}

HittingSolution solve_hitting_exact(const PotentialKernel& kernel,
                                    std::span<const LatticePoint> interior,
                                    const std::vector<std::vector<LatticePoint>>& absorbing,
                                    WalkKind kind, const ExactSolverOptions& options) {
  HittingSolution sol;
  sol.interior = checked_interior(interior, options);
  if (absorbing.empty()) throw std::invalid_argument("no absorbing classes");
  std::vector<SiteIndex> classes;
  for (const auto& c : absorbing) {
    if (c.empty()) throw std::invalid_argument("empty absorbing class");
    classes.emplace_back(c);
  }
  const auto sys = assemble(kernel, sol.interior, kind);
  const auto rows = static_cast<Eigen::Index>(sol.interior.size());
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(rows, static_cast<Eigen::Index>(classes.size()));
  for (std::size_t i = 0; i < sys.exits.size(); ++i)
    for (const auto& [q, w] : sys.exits[i]) {
      int owner = -1;
      for (std::size_t c = 0; c < classes.size(); ++c)
        if (classes[c].contains(q)) {
          if (owner >= 0) throw std::invalid_argument("absorbing classes overlap");
          owner = static_cast<int>(c);
        }
      if (owner < 0) throw std::invalid_argument("domain is not closed by the absorbing classes");
      rhs(static_cast<Eigen::Index>(i), owner) += w;
    }
  const Eigen::MatrixXd x = solve_refined(sys.matrix, rhs, options.residual_tolerance, sol.residual);
  sol.probabilities.resize(classes.size());
  for (std::size_t c = 0; c < classes.size(); ++c) {
    const auto col = x.col(static_cast<Eigen::Index>(c));
    sol.probabilities[c].assign(col.data(), col.data() + rows);
  }
  return sol;
}

}  // namespace cwalk
