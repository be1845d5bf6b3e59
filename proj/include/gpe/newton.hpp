#pragma once

#include "gpe/coarse_solver.hpp"

namespace gpe {

struct NewtonStepReport {
  int level = 0;
  /// Relative residual of the block system, recomputed after the solve.
  double solver_residual = 0.0;
  /// |(u', u'')_M - 1/2 - (u', u')_M / 2|.
  double constraint_gap = 0.0;
  double lambda_before = 0.0;
  double lambda_after = 0.0;
  /// Rayleigh quotient of u'', reported next to the multiplier lambda''.
  double rayleigh_after = 0.0;
  /// ||u''||_0; the step does not renormalise.
  double norm_after = 0.0;
  double tolerance = 0.0;
  int iterations = 0;
  bool direct = true;
};

struct NewtonResult {
  EigenPair pair;
  NewtonStepReport report;
};

/// Components of the discrete operator G(λ, u): the PDE row scaled like
/// scf_residual() and the normalisation row (1 - (u, u)_M) / 2.
struct NewtonResidual {
  double pde = 0.0;
  double constraint = 0.0;
  double norm = 0.0;
};

/// Linearised mixed system at (λ', u'):
///   A = K + M_W + 3ζ N(u') - λ' M,  c = -M u',
///   rhs_top = 2ζ ∫u'^3 φ - λ' M u',  rhs_bottom = -1/2 - (u', u')_M / 2.
/// Its solution (u'', λ'') is one Newton step for G.
SaddleSystem newton_system(const LevelOperators &ops, const EigenPair &prev);

/// One Newton iteration on the level of `ops`. `prev` must already live on
/// that level (prolongated by the caller). The multiplier of the solve is
/// returned as the new eigenvalue and u'' is not renormalised.
NewtonResult newton_iteration(const EigenPair &prev, const LevelOperators &ops,
                              double tol, const SolverSettings &settings = {});

NewtonResidual newton_residual(const EigenPair &pair, const LevelOperators &ops);

} // namespace gpe
