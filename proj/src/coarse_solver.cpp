#include "gpe/coarse_solver.hpp"

#include "gpe/diagnostics.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <string>

namespace gpe {

namespace {

constexpr int inverse_iteration_cap = 1000;

Vector normalized(const LevelOperators &ops, const Vector &u) {
  const double n2 = mass_norm_squared(ops, u);
  if (!(n2 > 0.0))
    throw SolverError("cannot normalise a zero function", 0.0);
  return u / std::sqrt(n2);
}

// Steps without any real gain before inverse iteration is considered to
// have reached its round-off floor. Slow contraction (close eigenvalues)
// still gains every step and must not trigger this.
constexpr int stagnation_window = 8;
constexpr double stagnation_gain = 1e-3;
// Same idea for the outer loop, which contracts more slowly when damped.
constexpr int scf_stall_window = 25;

std::string format_residual(double r) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", r);
  return buf;
}

// Smallest eigenpair of (H, M) by inverse iteration from `start`. Returns
// once the eigen-residual is below residual_tol or stops improving; the SCF
// loop judges the result.
Vector smallest_eigenvector(const LevelOperators &ops, const SparseMatrix &h,
                            const Vector &start, double residual_tol,
                            const SolverSettings &settings) {
  const SpdSolver solver(h, settings);
  Vector v = normalized(ops, start);
  // The eigen-residual inherits the linear residual scaled by the eigenvalue.
  const double mu_start = v.dot(h * v);
  const double linear_tol =
      std::max(std::min(settings.tol_base, 0.1 * residual_tol / mu_start), 1e-15);
  double achieved = 0.0;
  Vector best = v;
  double best_residual = std::numeric_limits<double>::infinity();
  int since_gain = 0;
  for (int it = 0; it < inverse_iteration_cap; ++it) {
    Vector w = solver.solve(ops.mass * v, linear_tol, achieved);
    w = normalized(ops, w);
    const Vector mw = ops.mass * w;
    const double mu = w.dot(h * w);
    const double residual = (h * w - mu * mw).norm() / mw.norm();
    if (residual < (1.0 - stagnation_gain) * best_residual)
      since_gain = 0;
    else
      ++since_gain;
    if (residual < best_residual) {
      best_residual = residual;
      best = w;
    }
    v = std::move(w);
    if (residual <= residual_tol || since_gain >= stagnation_window)
      return best;
  }
  throw SolverError("inverse iteration did not converge in " +
                        std::to_string(inverse_iteration_cap) + " steps",
                    best_residual);
}

void align_sign(const LevelOperators &ops, Vector &u) {
  if (integral(ops, u) < 0.0)
    u = -u;
}

} // namespace

ScfConfig ScfConfig::defaults_for(double zeta) {
  ScfConfig config;
  config.damping = zeta > 10.0 ? 0.1 : 0.7;
  return config;
}

void ScfConfig::validate() const {
  if (!(damping > 0.0 && damping <= 1.0))
    throw ArgumentError("damping must lie in (0, 1]");
  if (!(residual_tol > 0.0))
    throw ArgumentError("residual_tol must be > 0");
  if (max_iters < 1)
    throw ArgumentError("max_iters must be >= 1");
}

double mass_norm_squared(const LevelOperators &ops, const Vector &u) {
  return u.dot(ops.mass * u);
}

double integral(const LevelOperators &ops, const Vector &u) {
  return ops.basis_integrals.dot(u);
}

double rayleigh_quotient(const LevelOperators &ops, const Vector &u) {
  double numerator = u.dot(ops.stiffness * u) + u.dot(ops.potential_mass * u);
  if (ops.params.zeta != 0.0)
    numerator += ops.params.zeta * ops.quartic_integral(u);
  return numerator / mass_norm_squared(ops, u);
}

double scf_residual(const LevelOperators &ops, double lambda,
                    const Vector &u) {
  const Vector mu = ops.mass * u;
  Vector r = ops.stiffness * u + ops.potential_mass * u - lambda * mu;
  if (ops.params.zeta != 0.0)
    r += 0.5 * ops.cubic_vector(u);
  return r.norm() / mu.norm();
}

NodalFunction initial_guess(const LevelOperators &ops) {
  const auto &mesh = ops.grid();
  const auto &box = mesh.domain();
  Vector u(ops.size());
  for (Index k = 0; k < ops.size(); ++k) {
    const auto x = mesh.vertex(ops.dofs.vertex(k));
    double value = 1.0;
    for (int i = 0; i < mesh.dim(); ++i)
      value *= std::sin(std::numbers::pi * (x[i] - box.lower[i]) /
                        (box.upper[i] - box.lower[i]));
    u[k] = value;
  }
  return ops.to_nodal(normalized(ops, u));
}

EigenPair scf_step(const LevelOperators &ops, const EigenPair &current,
                   double damping, const SolverSettings &settings,
                   double eigen_tol) {
  const Vector u = normalized(ops, ops.to_reduced(current.u));
  const SparseMatrix h = ops.hamiltonian(u);
  Vector v = smallest_eigenvector(ops, h, u, eigen_tol, settings);
  if (v.dot(ops.mass * u) < 0.0)
    v = -v;
  Vector next = normalized(ops, (1.0 - damping) * u + damping * v);
  align_sign(ops, next);
  return {rayleigh_quotient(ops, next), ops.to_nodal(next)};
}

ScfResult solve_coarse(const LevelOperators &ops, const ScfConfig &config,
                       const SolverSettings &settings,
                       const std::optional<EigenPair> &start) {
  config.validate();
  ScfResult result;
  Vector u = start ? normalized(ops, ops.to_reduced(start->u))
                   : ops.to_reduced(initial_guess(ops));
  align_sign(ops, u);
  EigenPair pair{rayleigh_quotient(ops, u), ops.to_nodal(u)};
  double residual = scf_residual(ops, pair.lambda, u);
  result.history.push_back({0, pair.lambda, residual, energy(ops, u)});

  double best = residual;
  int since_gain = 0;
  for (int it = 1; residual > config.residual_tol; ++it) {
    if (it > config.max_iters)
      throw ScfError("SCF did not converge in " +
                         std::to_string(config.max_iters) +
                         " iterations (residual " + format_residual(residual) +
                         ")",
                     residual, pair);
    if (since_gain >= scf_stall_window)
      throw ScfError("SCF stalled at residual " + format_residual(best) +
                         " above residual_tol " +
                         format_residual(config.residual_tol) +
                         "; the tolerance is below the round-off floor of "
                         "this mesh",
                     residual, pair);
    // Inner accuracy follows the outer residual; tight only near the end.
    const double eigen_tol = std::max(std::min(1e-12, 0.1 * config.residual_tol),
                                      1e-3 * residual);
    pair = scf_step(ops, pair, config.damping, settings, eigen_tol);
    u = ops.to_reduced(pair.u);
    residual = scf_residual(ops, pair.lambda, u);
    result.history.push_back({it, pair.lambda, residual, energy(ops, u)});
    since_gain = residual < 0.9 * best ? 0 : since_gain + 1;
    best = std::min(best, residual);
  }
  result.pair = std::move(pair);
  result.residual = residual;
  return result;
}

} // namespace gpe
