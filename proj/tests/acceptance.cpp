// Acceptance checks: one [PASS]/[FAIL] line per criterion, exit code 1 if any
// fails. Tolerances are fixed here and not configurable.
#include "gpe/diagnostics.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace gpe;

namespace {

// Pinned tolerances.
constexpr double order_lambda_lo = 1.75, order_lambda_hi = 2.25;
constexpr double order_h1_lo = 0.85, order_h1_hi = 1.15;
constexpr double order_l2_lo = 1.75, order_l2_hi = 2.25;
constexpr double gap_fraction = 0.5;
constexpr double fixed_point_factor = 10.0;
constexpr double contraction_spread = 10.0;
constexpr double total_over_finest = 2.5;
constexpr double per_dof_growth = 3.0;
constexpr double nestedness_tol = 1e-11;
constexpr double symmetry_tol = 1e-14;
constexpr double drift_order_min = 1.75;
constexpr double constraint_factor = 10.0;
constexpr double lambda_energy_tol = 1e-9;
constexpr double energy_slack = 1e-13;
constexpr double reference_tol = 1e-11;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string &what) {
    if (!ok) {
      pass = false;
      detail << " FAILED(" << what << ")";
    }
  }
};

std::string fmt(double v, const char *spec = "%.3g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

bool within(std::optional<double> v, double lo, double hi) {
  return v && *v >= lo && *v <= hi;
}

std::string show(std::optional<double> v) { return v ? fmt(*v, "%.3f") : "n/a"; }

ProblemParams problem(int dim, double zeta, std::vector<double> gammas) {
  ProblemParams p;
  p.domain = BoxDomain::unit(dim);
  p.zeta = zeta;
  p.potential.gammas = Eigen::Map<const Eigen::VectorXd>(
      gammas.data(), static_cast<Eigen::Index>(gammas.size()));
  return p;
}

ProblemParams example1() { return problem(3, 1.0, {1, 1, 1}); }
ProblemParams example2() { return problem(3, 100.0, {1, 2, 4}); }

RunSettings settings_for(double zeta) {
  return {ScfConfig::defaults_for(zeta), SolverSettings{}};
}

double asymmetry(const SparseMatrix &a) {
  const double n = a.norm();
  return n > 0.0 ? (a - SparseMatrix(a.transpose())).norm() / n : 0.0;
}

double relative_difference(const SparseMatrix &a, const SparseMatrix &b) {
  return (a - b).norm() / b.norm();
}

SparseMatrix reduced_prolongation(const SparseMatrix &p, const DofMap &fine,
                                  const DofMap &coarse) {
  std::vector<Triplet> t;
  for (Eigen::Index k = 0; k < p.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(p, k); it; ++it) {
      const Index r = fine.dof(static_cast<Index>(it.row()));
      const Index c = coarse.dof(static_cast<Index>(it.col()));
      if (r >= 0 && c >= 0)
        t.emplace_back(r, c, it.value());
    }
  SparseMatrix out(fine.size(), coarse.size());
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

std::string orders_text(const FittedOrders &o) {
  return "lambda " + show(o.lambda) + ", H1 " + show(o.h1) + ", L2 " + show(o.l2);
}

bool orders_ok(const FittedOrders &o) {
  return within(o.lambda, order_lambda_lo, order_lambda_hi) &&
         within(o.h1, order_h1_lo, order_h1_hi) && within(o.l2, order_l2_lo, order_l2_hi);
}

// Shared by criteria 6 and 8: Example 1 multigrid over four desk levels.
const MultigridRun &example1_run() {
  static const MultigridRun run = run_multigrid(example1(), 4, 4, settings_for(1.0));
  return run;
}

void c1(Outcome &o) {
  const auto h = build_hierarchy(BoxDomain::unit(3), 8, 5);
  const Index expected[] = {3072, 24576, 196608, 1572864, 12582912};
  o.detail << "counts";
  for (std::size_t k = 0; k < h.size(); ++k) {
    o.detail << ' ' << h.mesh(k).num_cells();
    o.require(h.mesh(k).num_cells() == expected[k], "level " + std::to_string(k + 1));
  }
  const auto desk = build_hierarchy(BoxDomain::unit(3), 4, 5);
  o.require(desk.mesh(0).num_cells() == 384, "desk coarse mesh");
  for (std::size_t k = 1; k < desk.size(); ++k)
    o.require(desk.mesh(k).num_cells() == 8 * desk.mesh(k - 1).num_cells(), "desk growth");
  o.detail << "; desk " << desk.mesh(0).num_cells() << " x8 per level to "
           << desk.finest().num_cells();
}

void c2(Outcome &o) {
  for (int dim : {1, 2}) {
    const auto p = problem(dim, 0.0, std::vector<double>(static_cast<std::size_t>(dim), 0.0));
    const auto exact = laplace_ground_state(p.domain);
    const int levels = dim == 1 ? 5 : 4;
    const auto run = run_direct_all_levels(p, 4, levels, settings_for(0.0));
    std::vector<ErrorRecord> errors;
    bool above = true;
    bool decreasing = true;
    for (std::size_t k = 0; k < run.levels.size(); ++k) {
      const auto &pair = run.levels[k].pair;
      errors.push_back(error_vs_exact(*run.operators[k], pair, exact));
      above = above && pair.lambda > exact.lambda;
      if (k > 0)
        decreasing = decreasing && pair.lambda < run.levels[k - 1].pair.lambda;
    }
    fill_orders(errors);
    o.detail << (dim == 1 ? "interval" : "; square") << " pair orders";
    for (std::size_t k = 1; k < errors.size(); ++k) {
      const FittedOrders pair_orders{errors[k].order_lambda, errors[k].order_h1,
                                     errors[k].order_l2};
      o.detail << " [" << orders_text(pair_orders) << "]";
      o.require(orders_ok(pair_orders),
                "dim " + std::to_string(dim) + " level " + std::to_string(k + 1));
    }
    o.require(above && decreasing, "dim " + std::to_string(dim) + " lambda not from above");
  }
}

struct Example1Comparison {
  std::vector<ErrorRecord> errors;
  std::vector<ErrorRecord> direct_errors;
  std::vector<ErrorRecord> gaps;
};

// Criteria 3 and 4: multigrid and direct on three desk levels, reference on
// the fourth.
const Example1Comparison &example1_comparison() {
  static const Example1Comparison cmp = [] {
    const auto p = example1();
    const auto h = std::make_shared<const LevelHierarchy>(build_hierarchy(p.domain, 4, 4));
    const auto s = settings_for(p.zeta);
    const auto mg = run_multigrid(p, h, 3, s);
    const auto direct = run_direct_all_levels(p, h, 3, s);
    const auto ref_ops = assemble_level(h->mesh_ptr(3), p);
    const auto &last = direct.levels.back().pair;
    auto scf = s.scf;
    scf.residual_tol = reference_tol;
    const auto ref = solve_coarse(ref_ops, scf, s.solver,
                                  EigenPair{last.lambda, prolongate(h->prolongation(2), last.u)});
    return Example1Comparison{error_vs_reference(mg, ref.pair, ref_ops),
                              error_vs_reference(direct, ref.pair, ref_ops),
                              compare_runs(mg, direct)};
  }();
  return cmp;
}

void c3(Outcome &o) {
  const auto &errors = example1_comparison().errors;
  const auto fitted = fitted_orders(errors);
  o.detail << "fitted over levels 1-3 (gated): " << orders_text(fitted)
           << "; pair orders (reported)";
  for (std::size_t k = 1; k < errors.size(); ++k)
    o.detail << " [" << show(errors[k].order_lambda) << ", " << show(errors[k].order_h1)
             << ", " << show(errors[k].order_l2) << "]";
  o.require(orders_ok(fitted), "fitted orders");
  for (std::size_t k = 1; k < errors.size(); ++k)
    o.require(errors[k].err_h1 < errors[k - 1].err_h1, "H1 error not decreasing");
}

void c4(Outcome &o) {
  const auto &cmp = example1_comparison();
  for (std::size_t k = 1; k < cmp.gaps.size(); ++k) {
    const double gap = cmp.gaps[k].err_h1;
    const double disc = cmp.direct_errors[k].err_h1;
    o.detail << (k > 1 ? "; " : "") << "level " << k + 1 << " gap " << fmt(gap)
             << " vs discretisation " << fmt(disc);
    o.require(gap <= gap_fraction * disc, "level " + std::to_string(k + 1));
  }
}

void c5(Outcome &o) {
  const auto p = example1();
  const auto mesh = std::make_shared<const SimplexMesh>(build_initial_mesh(p.domain, 4));
  const auto ops = assemble_level(mesh, p);
  ScfConfig scf;
  scf.residual_tol = 1e-11;
  const auto converged = solve_coarse(ops, scf).pair;
  const double tol = SolverSettings{}.tolerance_for(mesh->h_max());
  const auto fixed = newton_iteration(converged, ops, tol);
  const double r_fixed = newton_residual(fixed.pair, ops).norm;
  o.detail << "fixed point residual " << fmt(r_fixed) << " (tol " << fmt(tol) << ")";
  o.require(r_fixed <= fixed_point_factor * tol, "fixed point");

  const Vector u = ops.to_reduced(converged.u);
  Vector w(ops.size());
  for (Index k = 0; k < w.size(); ++k)
    w[k] = 0.05 * std::sin(2.1 * static_cast<double>(k) + 0.4);
  EigenPair pair{converged.lambda + 0.5, ops.to_nodal(u + w)};
  std::vector<double> r{newton_residual(pair, ops).norm};
  for (int k = 0; k < 2; ++k) {
    pair = newton_iteration(pair, ops, 1e-13).pair;
    r.push_back(newton_residual(pair, ops).norm);
  }
  const double c1 = r[1] / (r[0] * r[0]);
  const double c2 = r[2] / (r[1] * r[1]);
  o.detail << "; residuals " << fmt(r[0]) << " -> " << fmt(r[1]) << " -> " << fmt(r[2])
           << ", C " << fmt(c1) << " and " << fmt(c2);
  o.require(r[1] < r[0] && r[2] < r[1], "residual not decreasing");
  o.require(std::max(c1, c2) / std::min(c1, c2) <= contraction_spread, "C unstable");
}

void c6(Outcome &o) {
  const auto &run = example1_run();
  const auto &fin = run.levels.back();
  const auto &prev = run.levels[run.levels.size() - 2];
  const double total = run.total_seconds();
  const double per_dof_fin = fin.seconds / static_cast<double>(fin.dofs);
  const double per_dof_prev = prev.seconds / static_cast<double>(prev.dofs);
  o.detail << "total " << fmt(total) << " s, finest " << fmt(fin.seconds) << " s, per-DOF "
           << fmt(per_dof_prev) << " -> " << fmt(per_dof_fin) << " s";
  o.require(total <= total_over_finest * fin.seconds, "total over finest");
  o.require(per_dof_fin <= per_dof_growth * per_dof_prev, "per-DOF growth");
}

void c7(Outcome &o) {
  const auto p = example1();
  const auto h = build_hierarchy(p.domain, 2, 4);
  double nested = 0.0;
  double asym = 0.0;
  for (std::size_t k = 0; k + 1 < h.size(); ++k) {
    const auto coarse = assemble_level(h.mesh_ptr(k), p);
    const auto fine = assemble_level(h.mesh_ptr(k + 1), p);
    const SparseMatrix pr = reduced_prolongation(h.prolongation(k).map, fine.dofs, coarse.dofs);
    nested = std::max({nested,
                       relative_difference(pr.transpose() * fine.stiffness * pr, coarse.stiffness),
                       relative_difference(pr.transpose() * fine.mass * pr, coarse.mass)});
    const Vector u = Vector::Constant(fine.size(), 1.0);
    for (const SparseMatrix &m : {fine.stiffness, fine.mass, fine.potential_mass,
                                  fine.nonlinear_mass(u, 3.0), fine.hamiltonian(u)})
      asym = std::max(asym, asymmetry(m));
  }
  o.detail << "nestedness " << fmt(nested) << ", asymmetry " << fmt(asym);
  o.require(nested <= nestedness_tol, "nestedness");

  const auto &run = example1_run();
  for (std::size_t k = 1; k < run.levels.size(); ++k) {
    const auto sys = newton_system(*run.operators[k],
                                   EigenPair{run.levels[k - 1].pair.lambda,
                                             prolongate(run.hierarchy->prolongation(k - 1),
                                                        run.levels[k - 1].pair.u)});
    asym = std::max(asym, asymmetry(sys.block));
  }
  o.require(asym <= symmetry_tol, "symmetry");

  std::vector<ErrorRecord> drift;
  bool decreasing = true;
  double worst_gap = 0.0;
  for (std::size_t k = 1; k < run.levels.size(); ++k) {
    const auto &lv = run.levels[k];
    ErrorRecord rec;
    rec.level = lv.level;
    rec.err_lambda = rec.err_h1 = rec.err_l2 = lv.norm_drift;
    drift.push_back(rec);
    if (k > 1)
      decreasing = decreasing && lv.norm_drift < run.levels[k - 1].norm_drift;
    worst_gap = std::max(worst_gap, lv.newton->constraint_gap / lv.newton->tolerance);
  }
  const auto drift_order = fitted_orders(drift).l2;
  o.detail << "; norm drift";
  for (const auto &d : drift)
    o.detail << ' ' << fmt(d.err_l2);
  o.detail << " (order " << show(drift_order) << ")";
  o.require(decreasing && drift_order && *drift_order >= drift_order_min, "norm drift");
  o.detail << "; constraint gap/tol " << fmt(worst_gap);
  o.require(worst_gap <= constraint_factor, "constraint gap");

  // Converged pairs: the coarse solve of every run and each direct level.
  const auto direct = run_direct_all_levels(example1(), 4, 3, settings_for(1.0));
  double defect = std::abs(lambda_energy_defect(*run.operators[0], run.levels[0].pair)) /
                  run.levels[0].pair.lambda;
  for (std::size_t k = 0; k < direct.levels.size(); ++k)
    defect = std::max(defect, std::abs(lambda_energy_defect(*direct.operators[k],
                                                            direct.levels[k].pair)) /
                                  direct.levels[k].pair.lambda);
  o.detail << "; lambda-energy defect " << fmt(defect);
  o.require(defect <= lambda_energy_tol, "lambda-energy identity");
}

void c8(Outcome &o) {
  const auto run = run_multigrid(example2(), 4, 4, settings_for(100.0));
  const auto &base = example1_run();
  o.detail << "lambda";
  for (std::size_t k = 0; k < run.levels.size(); ++k) {
    o.detail << ' ' << fmt(run.levels[k].pair.lambda, "%.2f") << " (vs "
             << fmt(base.levels[k].pair.lambda, "%.2f") << ")";
    o.require(run.levels[k].pair.lambda > base.levels[k].pair.lambda,
              "level " + std::to_string(k + 1));
  }
  const auto &hist = run.coarse_history;
  double worst_rise = 0.0;
  for (std::size_t k = hist.size() / 2 + 1; k < hist.size(); ++k)
    worst_rise = std::max(worst_rise, (hist[k].energy - hist[k - 1].energy) /
                                          std::abs(hist[k - 1].energy));
  o.detail << "; " << hist.size() - 1 << " SCF iterations, largest relative energy rise "
           << fmt(worst_rise) << " in the final half";
  o.require(worst_rise <= energy_slack, "energy increased");
}

} // namespace

int main() {
  const std::pair<const char *, std::function<void(Outcome &)>> criteria[] = {
      {"C1 element counts", c1},
      {"C2 linear convergence orders", c2},
      {"C3 Example 1 orders", c3},
      {"C4 scheme vs direct gap", c4},
      {"C5 Newton fixed point and contraction", c5},
      {"C6 linear complexity", c6},
      {"C7 structural invariants", c7},
      {"C8 Example 2 robustness", c8},
  };
  int failures = 0;
  for (const auto &[name, check] : criteria) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      check(o);
    } catch (const std::exception &e) {
      o.pass = false;
      o.detail << " exception: " << e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] %s (%.1f s): %s\n", o.pass ? "PASS" : "FAIL", name, secs,
                o.detail.str().c_str());
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
