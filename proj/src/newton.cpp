#include "gpe/newton.hpp"

#include <cmath>
#include <string>

namespace gpe {

SaddleSystem newton_system(const LevelOperators &ops, const EigenPair &prev) {
  const Vector u = ops.to_reduced(prev.u);
  const double zeta = ops.params.zeta;
  const Vector mu = ops.mass * u;

  SaddleSystem sys;
  SparseMatrix spd = ops.stiffness + ops.potential_mass;
  if (zeta != 0.0)
    spd += ops.nonlinear_mass(u, 3.0 * zeta);
  sys.block = spd - prev.lambda * ops.mass;
  sys.spd_approximation = std::move(spd);
  sys.constraint = -mu;
  sys.rhs_top = -prev.lambda * mu;
  if (zeta != 0.0)
    sys.rhs_top += ops.cubic_vector(u);
  sys.rhs_bottom = -0.5 - 0.5 * u.dot(mu);
  return sys;
}

NewtonResult newton_iteration(const EigenPair &prev, const LevelOperators &ops,
                              double tol, const SolverSettings &settings) {
  if (prev.u.level != ops.grid().level())
    throw ArgumentError("Newton step expects the previous pair prolongated to "
                        "level " + std::to_string(ops.grid().level()));
  const SaddleSystem sys = newton_system(ops, prev);
  const SaddleSolution sol = solve_saddle(sys, tol, settings);

  const Vector u_prev = ops.to_reduced(prev.u);
  const Vector mu_prev = ops.mass * u_prev;
  NewtonResult out;
  out.pair = {sol.lambda, ops.to_nodal(sol.u)};

  auto &report = out.report;
  report.level = ops.grid().level();
  report.solver_residual = sol.residual;
  report.constraint_gap =
      std::abs(mu_prev.dot(sol.u) - 0.5 - 0.5 * u_prev.dot(mu_prev));
  report.lambda_before = prev.lambda;
  report.lambda_after = sol.lambda;
  report.rayleigh_after = rayleigh_quotient(ops, sol.u);
  report.norm_after = std::sqrt(mass_norm_squared(ops, sol.u));
  report.tolerance = tol;
  report.iterations = sol.iterations;
  report.direct = sol.direct;

  if (report.constraint_gap > 10.0 * tol)
    throw SolverError("Newton step violates the normalisation row (gap " +
                          std::to_string(report.constraint_gap) +
                          "); the coarse approximation is too poor",
                      report.constraint_gap);
  return out;
}

NewtonResidual newton_residual(const EigenPair &pair, const LevelOperators &ops) {
  const Vector u = ops.to_reduced(pair.u);
  NewtonResidual r;
  r.pde = scf_residual(ops, pair.lambda, u);
  r.constraint = 0.5 * (1.0 - mass_norm_squared(ops, u));
  r.norm = std::hypot(r.pde, r.constraint);
  return r;
}

} // namespace gpe
