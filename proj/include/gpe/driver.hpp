#pragma once

#include "gpe/newton.hpp"

#include <memory>
#include <optional>
#include <vector>

namespace gpe {

struct RunSettings {
  ScfConfig scf;
  SolverSettings solver;
};

/// Summary of the nonlinear solve used on a level.
struct CoarseSolveRecord {
  int iterations = 0;
  double residual = 0.0;
};

struct LevelRecord {
  int level = 0;
  Index elements = 0;
  Index dofs = 0;
  double h = 0.0;
  EigenPair pair;
  std::optional<NewtonStepReport> newton;
  std::optional<CoarseSolveRecord> coarse;
  /// ||G(λ, u)|| on this level.
  NewtonResidual residual;
  /// | ||u||_0 - 1 |.
  double norm_drift = 0.0;
  /// Wall time of the level's work (prolongation, assembly, solve).
  double seconds = 0.0;
};

struct MultigridRun {
  ProblemParams params;
  /// May hold more levels than were solved (e.g. a reference level).
  std::shared_ptr<const LevelHierarchy> hierarchy;
  std::vector<LevelRecord> levels;
  /// Per-level operators, kept for diagnostics.
  std::vector<std::shared_ptr<const LevelOperators>> operators;
  /// SCF trajectory on level 1 (the full trajectory of every level for the
  /// direct scheme is not kept).
  std::vector<ScfRecord> coarse_history;
  double hierarchy_seconds = 0.0;

  double total_seconds() const;
};

/// Coarse nonlinear solve on level 1, then one Newton iteration per finer
/// level, for the first n_levels levels of the hierarchy.
MultigridRun run_multigrid(const ProblemParams &params,
                           std::shared_ptr<const LevelHierarchy> hierarchy,
                           int n_levels, const RunSettings &settings);

MultigridRun run_multigrid(const ProblemParams &params, int cells_per_axis,
                           int n_levels, const RunSettings &settings);

/// Independent nonlinear solve on every level, each warm-started from the
/// prolongated solution of the previous level. Serves as the reference
/// (λ_h, u_h) for the multigrid scheme.
MultigridRun run_direct_all_levels(
    const ProblemParams &params,
    std::shared_ptr<const LevelHierarchy> hierarchy, int n_levels,
    const RunSettings &settings);

MultigridRun run_direct_all_levels(const ProblemParams &params,
                                   int cells_per_axis, int n_levels,
                                   const RunSettings &settings);

} // namespace gpe
