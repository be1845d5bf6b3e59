#pragma once

#include "gpe/assembly.hpp"
#include "gpe/linalg.hpp"

#include <optional>
#include <vector>

namespace gpe {

/// Eigenvalue estimate and eigenfunction on one level.
struct EigenPair {
  double lambda = 0.0;
  NodalFunction u;
};

struct ScfConfig {
  /// Weight of the new linear eigenvector in the mixing step, in (0, 1].
  double damping = 0.7;
  double residual_tol = 1e-10;
  int max_iters = 500;

  /// 0.7 for zeta <= 10, 0.1 above (0.3 still oscillates at zeta = 100).
  static ScfConfig defaults_for(double zeta);
  void validate() const;
};

struct ScfRecord {
  int iteration = 0;
  double lambda = 0.0;
  double residual = 0.0;
  double energy = 0.0;
};

struct ScfResult {
  EigenPair pair;
  double residual = 0.0;
  std::vector<ScfRecord> history;
};

/// Raised when the SCF loop hits max_iters. Keeps the last iterate so the
/// caller can restart, e.g. with stronger damping.
class ScfError : public SolverError {
public:
  ScfError(const std::string &what, double residual, EigenPair last)
      : SolverError(what, residual), last_(std::move(last)) {}
  const EigenPair &last() const noexcept { return last_; }

private:
  EigenPair last_;
};

/// (u, u)_M for a reduced coefficient vector.
double mass_norm_squared(const LevelOperators &ops, const Vector &u);
/// ∫ u dΩ.
double integral(const LevelOperators &ops, const Vector &u);

/// (Ku, u) + (M_W u, u) + ζ ∫u^4 divided by (u, u)_M.
double rayleigh_quotient(const LevelOperators &ops, const Vector &u);

/// ||(K + M_W + ζ N(u) - λ M) u|| / ||M u||: the discrete residual of the
/// nonlinear eigenproblem, scaled to be independent of the mesh size.
double scf_residual(const LevelOperators &ops, double lambda, const Vector &u);

/// Normalised interpolant of prod_i sin(π (x_i - a_i) / L_i).
NodalFunction initial_guess(const LevelOperators &ops);

/// One damped SCF step: the smallest eigenpair of K + M_W + ζ N(u_cur) by
/// inverse iteration (shift 0), mixed with u_cur and renormalised. The
/// inverse iteration stops once its eigen-residual is below eigen_tol.
EigenPair scf_step(const LevelOperators &ops, const EigenPair &current,
                   double damping, const SolverSettings &settings = {},
                   double eigen_tol = 1e-12);

/// Full nonlinear solve on one level, from `start` (normalised first) or
/// from initial_guess().
ScfResult solve_coarse(const LevelOperators &ops, const ScfConfig &config,
                       const SolverSettings &settings = {},
                       const std::optional<EigenPair> &start = std::nullopt);

} // namespace gpe
