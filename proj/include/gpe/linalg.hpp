#pragma once

#include "gpe/types.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include <memory>
#include <optional>

namespace gpe {

struct SolverSettings {
  /// Systems with more unknowns than this use preconditioned Krylov methods.
  Index direct_max_dofs = 20000;
  double tol_base = 1e-10;
  double c_tol = 1e-2;

  /// Per-level linear tolerance min(tol_base, c_tol * h^2).
  double tolerance_for(double h) const;
  void validate() const;
};

/// Factorised (or preconditioned) SPD operator for repeated solves.
class SpdSolver {
public:
  explicit SpdSolver(SparseMatrix a, const SolverSettings &settings = {});

  /// Returns x with ||Ax - b|| <= tol ||b||; the residual is recomputed from
  /// the stored operator. Throws SolverError on indefiniteness or when the
  /// iteration cap (10 n) is exhausted.
  Vector solve(const Vector &b, double tol) const;
  /// Best-effort variant: never throws on a missed tolerance, reports the
  /// recomputed relative residual in `achieved` instead.
  Vector solve(const Vector &b, double tol, double &achieved) const;

  bool is_direct() const noexcept { return static_cast<bool>(cholesky_); }
  const SparseMatrix &matrix() const noexcept { return a_; }
  /// Krylov iterations used by the most recent solve (0 for direct).
  int last_iterations() const noexcept { return last_iterations_; }

private:
  SparseMatrix a_;
  std::unique_ptr<Eigen::SimplicialLLT<SparseMatrix>> cholesky_;
  std::unique_ptr<Eigen::IncompleteCholesky<double>> preconditioner_;
  mutable int last_iterations_ = 0;
};

Vector solve_spd(const SparseMatrix &a, const Vector &b, double tol,
                 const SolverSettings &settings = {});

/// Symmetric block system
///
///   [ A   c ] [ u      ]   [ rhs_top    ]
///   [ c^T 0 ] [ lambda ] = [ rhs_bottom ]
struct SaddleSystem {
  SparseMatrix block;
  Vector constraint;
  Vector rhs_top;
  double rhs_bottom = 0.0;
  /// SPD approximation of `block` used to precondition the Krylov solve.
  /// Falls back to `block` itself when empty.
  std::optional<SparseMatrix> spd_approximation;

  Index size() const { return static_cast<Index>(block.rows()); }
};

struct SaddleSolution {
  Vector u;
  double lambda = 0.0;
  /// Relative residual of the full block system, recomputed after the solve.
  double residual = 0.0;
  int iterations = 0;
  bool direct = true;
};

/// ||r|| / ||rhs|| of the block system for a candidate solution.
double saddle_residual(const SaddleSystem &sys, const Vector &u, double lambda);

/// Direct sparse LU of the bordered matrix up to settings.direct_max_dofs,
/// otherwise MINRES with the block-diagonal preconditioner
/// diag(IC(spd_approximation), c^T IC^{-1} c).
SaddleSolution solve_saddle(const SaddleSystem &sys, double tol,
                            const SolverSettings &settings = {});

} // namespace gpe
