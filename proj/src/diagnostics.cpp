#include "gpe/diagnostics.hpp"

#include "gpe/quadrature.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

namespace gpe {

double energy(const LevelOperators &ops, const Vector &u) {
  double e = 0.5 * u.dot(ops.stiffness * u) + 0.5 * u.dot(ops.potential_mass * u);
  if (ops.params.zeta != 0.0)
    e += 0.25 * ops.params.zeta * ops.quartic_integral(u);
  return e;
}

double energy(const LevelOperators &ops, const NodalFunction &u) {
  return energy(ops, ops.to_reduced(u));
}

double energy(std::shared_ptr<const SimplexMesh> mesh, const NodalFunction &u,
              const ProblemParams &params) {
  const auto ops = assemble_level(std::move(mesh), params);
  return energy(ops, u);
}

double lambda_energy_defect(const LevelOperators &ops, const EigenPair &pair) {
  const Vector u = ops.to_reduced(pair.u);
  const double quartic =
      ops.params.zeta != 0.0 ? ops.quartic_integral(u) : 0.0;
  return pair.lambda - 2.0 * energy(ops, u) - 0.5 * ops.params.zeta * quartic;
}

std::optional<double> observed_order(double coarse_error, double fine_error,
                                     double beta) {
  if (!(coarse_error > 0.0) || !(fine_error > 0.0))
    return std::nullopt;
  return std::log(coarse_error / fine_error) / std::log(beta);
}

namespace {

std::optional<double> slope(std::span<const ErrorRecord> errors,
                            double ErrorRecord::*field, double beta) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto &e : errors) {
    if (!(e.*field > 0.0))
      return std::nullopt;
    xs.push_back(e.level * std::log(beta));
    ys.push_back(-std::log(e.*field));
  }
  if (xs.size() < 2)
    return std::nullopt;
  const Eigen::Map<const Eigen::VectorXd> x(xs.data(), static_cast<Eigen::Index>(xs.size()));
  const Eigen::Map<const Eigen::VectorXd> y(ys.data(), static_cast<Eigen::Index>(ys.size()));
  const Eigen::VectorXd xc = x.array() - x.mean();
  return xc.dot(y.array().matrix() - Eigen::VectorXd::Constant(y.size(), y.mean())) /
         xc.squaredNorm();
}

double h1_norm(const LevelOperators &ops, const Vector &e) {
  return std::sqrt(std::max(e.dot(ops.stiffness * e), 0.0));
}

double l2_norm(const LevelOperators &ops, const Vector &e) {
  return std::sqrt(std::max(e.dot(ops.mass * e), 0.0));
}

} // namespace

FittedOrders fitted_orders(std::span<const ErrorRecord> errors, double beta) {
  return {slope(errors, &ErrorRecord::err_lambda, beta),
          slope(errors, &ErrorRecord::err_h1, beta),
          slope(errors, &ErrorRecord::err_l2, beta)};
}

void fill_orders(std::vector<ErrorRecord> &errors, double beta) {
  for (std::size_t k = 0; k < errors.size(); ++k) {
    auto &e = errors[k];
    if (k == 0) {
      e.order_lambda = e.order_h1 = e.order_l2 = std::nullopt;
      continue;
    }
    const auto &prev = errors[k - 1];
    e.order_lambda = observed_order(prev.err_lambda, e.err_lambda, beta);
    e.order_h1 = observed_order(prev.err_h1, e.err_h1, beta);
    e.order_l2 = observed_order(prev.err_l2, e.err_l2, beta);
  }
}

std::vector<ErrorRecord> error_vs_reference(const MultigridRun &run,
                                            const EigenPair &reference,
                                            const LevelOperators &reference_ops) {
  const auto &hierarchy = *run.hierarchy;
  const auto ref_pos = static_cast<std::size_t>(reference.u.level - 1);
  if (reference.u.level < 1 || ref_pos >= hierarchy.size() ||
      &hierarchy.mesh(ref_pos) != reference_ops.mesh.get())
    throw ArgumentError("reference does not live on a level of the run's "
                        "hierarchy");
  const Vector ref_u = reference_ops.to_reduced(reference.u);

  std::vector<ErrorRecord> errors;
  for (const auto &level : run.levels) {
    if (level.level > reference.u.level)
      throw ArgumentError("reference level is coarser than run level " +
                          std::to_string(level.level));
    const auto pos = static_cast<std::size_t>(level.level - 1);
    const NodalFunction fine = prolongate_to(hierarchy, level.pair.u, pos, ref_pos);
    const Vector e = reference_ops.dofs.reduce(fine.values) - ref_u;
    ErrorRecord rec;
    rec.level = level.level;
    rec.elements = level.elements;
    rec.dofs = level.dofs;
    rec.err_lambda = std::abs(level.pair.lambda - reference.lambda);
    rec.err_h1 = h1_norm(reference_ops, e);
    rec.err_l2 = l2_norm(reference_ops, e);
    errors.push_back(rec);
  }
  fill_orders(errors);
  return errors;
}

std::vector<ErrorRecord> compare_runs(const MultigridRun &run,
                                      const MultigridRun &baseline) {
  if (run.hierarchy != baseline.hierarchy)
    throw ArgumentError("runs must share one hierarchy to be compared");
  const std::size_t n = std::min(run.levels.size(), baseline.levels.size());
  std::vector<ErrorRecord> gaps;
  for (std::size_t k = 0; k < n; ++k) {
    const auto &ops = *run.operators[k];
    const Vector e = ops.to_reduced(run.levels[k].pair.u) -
                     ops.to_reduced(baseline.levels[k].pair.u);
    ErrorRecord rec;
    rec.level = run.levels[k].level;
    rec.elements = run.levels[k].elements;
    rec.dofs = run.levels[k].dofs;
    rec.err_lambda = std::abs(run.levels[k].pair.lambda -
                              baseline.levels[k].pair.lambda);
    rec.err_h1 = h1_norm(ops, e);
    rec.err_l2 = l2_norm(ops, e);
    gaps.push_back(rec);
  }
  return gaps;
}

namespace {

template <int Dim>
void exact_errors(const LevelOperators &ops, const Vector &full,
                  const ExactSolution &exact, double &h1_sq, double &l2_sq) {
  const auto &mesh = ops.grid();
  const auto quad = degree4_rule<double>(Dim);
  Eigen::Matrix<double, Dim, 1> x;
  Eigen::Matrix<double, Dim, 1> grad;
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    const auto cell = mesh.cell(c);
    Eigen::Matrix<double, Dim, Dim + 1> pts;
    Eigen::Matrix<double, Dim + 1, 1> vals;
    for (int a = 0; a <= Dim; ++a) {
      pts.col(a) = mesh.vertex(cell(a));
      vals[a] = full[cell(a)];
    }
    Eigen::Matrix<double, Dim, Dim> jac;
    for (int k = 0; k < Dim; ++k)
      jac.col(k) = pts.col(k + 1) - pts.col(0);
    double fact = 1.0;
    for (int k = 2; k <= Dim; ++k)
      fact *= k;
    const double volume = std::abs(jac.determinant()) / fact;
    // ∇u_h = J^{-T} (u_1 - u_0, ..., u_d - u_0).
    const Eigen::Matrix<double, Dim, 1> diffs =
        vals.template tail<Dim>().array() - vals[0];
    const Eigen::Matrix<double, Dim, 1> grad_h =
        jac.transpose().partialPivLu().solve(diffs);
    for (Eigen::Index q = 0; q < quad.size(); ++q) {
      const Eigen::Matrix<double, Dim + 1, 1> bary = quad.points.col(q);
      x.noalias() = pts * bary;
      const double u = exact.value(std::span<const double>(x.data(), Dim));
      exact.gradient(std::span<const double>(x.data(), Dim),
                     std::span<double>(grad.data(), Dim));
      const double w = quad.weights[q] * volume;
      l2_sq += w * std::pow(u - vals.dot(bary), 2);
      h1_sq += w * (grad - grad_h).squaredNorm();
    }
  }
}

} // namespace

ErrorRecord error_vs_exact(const LevelOperators &ops, const EigenPair &pair,
                           const ExactSolution &exact) {
  const Vector full = ops.dofs.expand(ops.to_reduced(pair.u));
  double h1_sq = 0.0;
  double l2_sq = 0.0;
  switch (ops.grid().dim()) {
  case 1:
    exact_errors<1>(ops, full, exact, h1_sq, l2_sq);
    break;
  case 2:
    exact_errors<2>(ops, full, exact, h1_sq, l2_sq);
    break;
  case 3:
    exact_errors<3>(ops, full, exact, h1_sq, l2_sq);
    break;
  default:
    throw ArgumentError("unsupported dimension");
  }
  ErrorRecord rec;
  rec.level = ops.grid().level();
  rec.elements = ops.grid().num_cells();
  rec.dofs = ops.size();
  rec.err_lambda = std::abs(pair.lambda - exact.lambda);
  rec.err_h1 = std::sqrt(h1_sq);
  rec.err_l2 = std::sqrt(l2_sq);
  return rec;
}

ExactSolution laplace_ground_state(const BoxDomain &box) {
  box.validate();
  using std::numbers::pi;
  ExactSolution s;
  double amplitude = 1.0;
  s.lambda = 0.0;
  for (int i = 0; i < box.dim; ++i) {
    const double len = box.upper[i] - box.lower[i];
    s.lambda += pi * pi / (len * len);
    amplitude *= std::sqrt(2.0 / len);
  }
  s.value = [box, amplitude](std::span<const double> x) {
    double v = amplitude;
    for (int i = 0; i < box.dim; ++i)
      v *= std::sin(pi * (x[static_cast<std::size_t>(i)] - box.lower[i]) /
                    (box.upper[i] - box.lower[i]));
    return v;
  };
  s.gradient = [box, amplitude](std::span<const double> x, std::span<double> g) {
    for (int i = 0; i < box.dim; ++i) {
      double v = amplitude;
      for (int j = 0; j < box.dim; ++j) {
        const double len = box.upper[j] - box.lower[j];
        const double arg =
            pi * (x[static_cast<std::size_t>(j)] - box.lower[j]) / len;
        v *= j == i ? pi / len * std::cos(arg) : std::sin(arg);
      }
      g[static_cast<std::size_t>(i)] = v;
    }
  };
  return s;
}

} // namespace gpe
