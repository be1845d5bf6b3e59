#pragma once

#include "gpe/driver.hpp"

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace gpe {

/// ∫ (|∇u|^2 / 2 + W u^2 / 2 + ζ u^4 / 4) for a reduced coefficient vector.
double energy(const LevelOperators &ops, const Vector &u);
double energy(const LevelOperators &ops, const NodalFunction &u);
/// Same, assembling the level operators on the fly.
double energy(std::shared_ptr<const SimplexMesh> mesh, const NodalFunction &u,
              const ProblemParams &params);

/// λ - 2E(u) - (ζ/2) ∫u^4; zero at every normalised eigenpair.
double lambda_energy_defect(const LevelOperators &ops, const EigenPair &pair);

struct ErrorRecord {
  int level = 0;
  Index elements = 0;
  Index dofs = 0;
  double err_lambda = 0.0;
  /// H1 seminorm (stiffness energy norm) of the error.
  double err_h1 = 0.0;
  double err_l2 = 0.0;
  std::optional<double> order_lambda;
  std::optional<double> order_h1;
  std::optional<double> order_l2;
};

/// log(coarse / fine) / log(beta); absent unless both errors are positive.
std::optional<double> observed_order(double coarse_error, double fine_error,
                                     double beta = 2.0);

/// Least-squares slope of -log(error) against level * log(beta) over all
/// records: the order observed across the whole sequence.
struct FittedOrders {
  std::optional<double> lambda;
  std::optional<double> h1;
  std::optional<double> l2;
};
FittedOrders fitted_orders(std::span<const ErrorRecord> errors,
                           double beta = 2.0);

/// Fills the consecutive-level orders of a record sequence in place.
void fill_orders(std::vector<ErrorRecord> &errors, double beta = 2.0);

/// Errors of every solved level against a pair on a finer (or equal) level
/// of the same hierarchy, measured on the reference mesh after exact nested
/// prolongation.
std::vector<ErrorRecord> error_vs_reference(const MultigridRun &run,
                                            const EigenPair &reference,
                                            const LevelOperators &reference_ops);

/// Level-by-level distance between two runs on the same hierarchy (for
/// instance multigrid against the direct scheme). Orders are not filled.
std::vector<ErrorRecord> compare_runs(const MultigridRun &run,
                                      const MultigridRun &baseline);

/// Errors against a known solution u(x) with gradient ∇u(x) and eigenvalue,
/// integrated cell by cell with the degree-4 rule.
struct ExactSolution {
  double lambda = 0.0;
  std::function<double(std::span<const double>)> value;
  std::function<void(std::span<const double>, std::span<double>)> gradient;
};
ErrorRecord error_vs_exact(const LevelOperators &ops, const EigenPair &pair,
                           const ExactSolution &exact);

/// Ground state of -Δu = λu on the box: λ = π^2 Σ 1/L_i^2 and the
/// normalised product of sines.
ExactSolution laplace_ground_state(const BoxDomain &box);

} // namespace gpe
