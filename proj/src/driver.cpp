#include "gpe/driver.hpp"

#include <chrono>
#include <cmath>
#include <string>

namespace gpe {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void check_request(const ProblemParams &params, const LevelHierarchy &h,
                   int n_levels, const RunSettings &settings) {
  params.validate();
  settings.scf.validate();
  settings.solver.validate();
  if (n_levels < 1 || static_cast<std::size_t>(n_levels) > h.size())
    throw ArgumentError("requested " + std::to_string(n_levels) +
                        " levels from a hierarchy of " +
                        std::to_string(h.size()));
  if (h.mesh(0).dim() != params.domain.dim)
    throw ArgumentError("hierarchy and problem dimensions differ");
}

LevelRecord describe(const LevelOperators &ops, EigenPair pair) {
  LevelRecord rec;
  rec.level = ops.grid().level();
  rec.elements = ops.grid().num_cells();
  rec.dofs = ops.size();
  rec.h = ops.grid().h_max();
  rec.residual = newton_residual(pair, ops);
  rec.norm_drift =
      std::abs(std::sqrt(mass_norm_squared(ops, ops.to_reduced(pair.u))) - 1.0);
  rec.pair = std::move(pair);
  return rec;
}

// Attaches the level number to solver failures.
template <typename Fn> auto at_level(int level, Fn &&fn) {
  try {
    return fn();
  } catch (const ScfError &e) {
    throw ScfError("level " + std::to_string(level) + ": " + e.what(),
                   e.residual(), e.last());
  } catch (const SolverError &e) {
    throw SolverError("level " + std::to_string(level) + ": " + e.what(),
                      e.residual());
  }
}

std::shared_ptr<const LevelHierarchy>
timed_hierarchy(const ProblemParams &params, int cells_per_axis, int n_levels,
                double &seconds) {
  const auto start = Clock::now();
  auto h = std::make_shared<const LevelHierarchy>(
      build_hierarchy(params.domain, cells_per_axis, n_levels));
  seconds = seconds_since(start);
  return h;
}

} // namespace

double MultigridRun::total_seconds() const {
  double total = 0.0;
  for (const auto &l : levels)
    total += l.seconds;
  return total;
}

MultigridRun run_multigrid(const ProblemParams &params,
                           std::shared_ptr<const LevelHierarchy> hierarchy,
                           int n_levels, const RunSettings &settings) {
  check_request(params, *hierarchy, n_levels, settings);
  MultigridRun run;
  run.params = params;
  run.hierarchy = hierarchy;

  auto start = Clock::now();
  auto ops = std::make_shared<const LevelOperators>(
      assemble_level(hierarchy->mesh_ptr(0), params));
  auto coarse = at_level(1, [&] {
    return solve_coarse(*ops, settings.scf, settings.solver);
  });
  double elapsed = seconds_since(start);
  run.coarse_history = coarse.history;
  LevelRecord first = describe(*ops, coarse.pair);
  first.coarse = CoarseSolveRecord{
      static_cast<int>(coarse.history.size()) - 1, coarse.residual};
  first.seconds = elapsed;
  run.levels.push_back(std::move(first));
  run.operators.push_back(ops);

  for (int k = 1; k < n_levels; ++k) {
    const auto pos = static_cast<std::size_t>(k);
    start = Clock::now();
    const EigenPair &prev = run.levels.back().pair;
    EigenPair prolongated{prev.lambda,
                          prolongate(hierarchy->prolongation(pos - 1), prev.u)};
    ops = std::make_shared<const LevelOperators>(
        assemble_level(hierarchy->mesh_ptr(pos), params));
    const double tol = settings.solver.tolerance_for(ops->grid().h_max());
    auto step = at_level(k + 1, [&] {
      return newton_iteration(prolongated, *ops, tol, settings.solver);
    });
    elapsed = seconds_since(start);
    LevelRecord rec = describe(*ops, std::move(step.pair));
    rec.newton = step.report;
    rec.seconds = elapsed;
    run.levels.push_back(std::move(rec));
    run.operators.push_back(ops);
  }
  return run;
}

MultigridRun run_multigrid(const ProblemParams &params, int cells_per_axis,
                           int n_levels, const RunSettings &settings) {
  params.validate();
  double seconds = 0.0;
  auto h = timed_hierarchy(params, cells_per_axis, n_levels, seconds);
  auto run = run_multigrid(params, h, n_levels, settings);
  run.hierarchy_seconds = seconds;
  return run;
}

MultigridRun run_direct_all_levels(
    const ProblemParams &params,
    std::shared_ptr<const LevelHierarchy> hierarchy, int n_levels,
    const RunSettings &settings) {
  check_request(params, *hierarchy, n_levels, settings);
  MultigridRun run;
  run.params = params;
  run.hierarchy = hierarchy;

  for (int k = 0; k < n_levels; ++k) {
    const auto pos = static_cast<std::size_t>(k);
    const auto start = Clock::now();
    std::optional<EigenPair> guess;
    if (k > 0) {
      const EigenPair &prev = run.levels.back().pair;
      guess = EigenPair{prev.lambda,
                        prolongate(hierarchy->prolongation(pos - 1), prev.u)};
    }
    auto ops = std::make_shared<const LevelOperators>(
        assemble_level(hierarchy->mesh_ptr(pos), params));
    auto result = at_level(k + 1, [&] {
      return solve_coarse(*ops, settings.scf, settings.solver, guess);
    });
    const double elapsed = seconds_since(start);
    if (k == 0)
      run.coarse_history = result.history;
    LevelRecord rec = describe(*ops, std::move(result.pair));
    rec.coarse = CoarseSolveRecord{
        static_cast<int>(result.history.size()) - 1, result.residual};
    rec.seconds = elapsed;
    run.levels.push_back(std::move(rec));
    run.operators.push_back(std::move(ops));
  }
  return run;
}

MultigridRun run_direct_all_levels(const ProblemParams &params,
                                   int cells_per_axis, int n_levels,
                                   const RunSettings &settings) {
  params.validate();
  double seconds = 0.0;
  auto h = timed_hierarchy(params, cells_per_axis, n_levels, seconds);
  auto run = run_direct_all_levels(params, h, n_levels, settings);
  run.hierarchy_seconds = seconds;
  return run;
}

} // namespace gpe
