#include "support.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace gpe;

TEST(CoarseSolver, InitialGuessIsNormalisedAndPositive) {
  const auto ops = test::operators(test::problem(3, 1.0), 4);
  const Vector u = ops.to_reduced(initial_guess(ops));
  EXPECT_NEAR(mass_norm_squared(ops, u), 1.0, 1e-14);
  EXPECT_GT(u.minCoeff(), 0.0);
}

TEST(CoarseSolver, LinearStepMatchesDenseEigensolver) {
  // ζ = 0 with damping 1: one step is the linear ground state.
  for (int dim : {1, 2}) {
    const auto ops = test::operators(test::problem(dim, 0.0), dim == 1 ? 16 : 6);
    const auto oracle = test::dense_smallest(ops.stiffness + ops.potential_mass, ops.mass);
    const EigenPair start{0.0, initial_guess(ops)};
    const auto step = scf_step(ops, start, 1.0);
    const Vector u = ops.to_reduced(step.u);
    EXPECT_NEAR(step.lambda, oracle.value, 1e-10 * oracle.value);
    EXPECT_LT((u - oracle.vector).norm() / oracle.vector.norm(), 1e-9);
  }
}

TEST(CoarseSolver, LinearProblemNeedsFewIterations) {
  // Undamped, each outer step is inverse iteration to 1e-3 of the current
  // residual, so convergence takes a handful of steps.
  const auto ops = test::operators(test::problem(2, 0.0), 6);
  ScfConfig cfg;
  cfg.damping = 1.0;
  const auto result = solve_coarse(ops, cfg);
  EXPECT_LE(result.history.size(), 8u);
  EXPECT_LE(result.residual, cfg.residual_tol);
}

TEST(CoarseSolver, ConvergedPairSatisfiesIdentities) {
  const auto ops = test::operators(test::problem(3, 1.0), 4);
  const auto result = solve_coarse(ops, ScfConfig{});
  const Vector u = ops.to_reduced(result.pair.u);
  EXPECT_LE(result.residual, 1e-10);
  EXPECT_NEAR(scf_residual(ops, result.pair.lambda, u), result.residual, 1e-15);
  EXPECT_NEAR(mass_norm_squared(ops, u), 1.0, 1e-13);
  EXPECT_NEAR(result.pair.lambda, rayleigh_quotient(ops, u), 1e-12);
  EXPECT_NEAR(lambda_energy_defect(ops, result.pair), 0.0, 1e-9);
  EXPECT_GT(integral(ops, u), 0.0);
  EXPECT_EQ(result.history.front().iteration, 0);
  EXPECT_EQ(result.history.back().residual, result.residual);
}

TEST(CoarseSolver, LinearEigenvalueDecreasesTowardsTheLimit) {
  // Conforming P1: discrete λ_h ≥ dπ^2 and monotone under refinement.
  const auto p = test::problem(2, 0.0, {0.0, 0.0});
  const auto h = build_hierarchy(p.domain, 2, 4);
  double previous = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < h.size(); ++k) {
    const auto ops = assemble_level(h.mesh_ptr(k), p);
    const double lambda = solve_coarse(ops, ScfConfig{}).pair.lambda;
    EXPECT_GT(lambda, 2.0 * std::numbers::pi * std::numbers::pi);
    EXPECT_LT(lambda, previous);
    previous = lambda;
  }
}

TEST(CoarseSolver, StrongInteractionEnergySettles) {
  // Example 2 coefficients on the coarsest desk mesh with default damping.
  const auto p = test::problem(3, 100.0, {1.0, 2.0, 4.0});
  const auto ops = test::operators(p, 4);
  const auto cfg = ScfConfig::defaults_for(p.zeta);
  const auto result = solve_coarse(ops, cfg);
  EXPECT_LE(result.residual, cfg.residual_tol);
  const auto &hist = result.history;
  for (std::size_t k = hist.size() / 2 + 1; k < hist.size(); ++k)
    EXPECT_LE(hist[k].energy, hist[k - 1].energy * (1.0 + 1e-13)) << "iteration " << k;
  EXPECT_NEAR(lambda_energy_defect(ops, result.pair), 0.0, 1e-9 * result.pair.lambda);
}

TEST(CoarseSolver, MaxItersReportsLastIterate) {
  const auto ops = test::operators(test::problem(3, 1.0), 3);
  ScfConfig cfg;
  cfg.max_iters = 2;
  try {
    solve_coarse(ops, cfg);
    FAIL() << "expected ScfError";
  } catch (const ScfError &e) {
    EXPECT_GT(e.residual(), cfg.residual_tol);
    EXPECT_EQ(e.last().u.values.size(), ops.grid().num_vertices());
    EXPECT_GT(e.last().lambda, 0.0);
  }
}

TEST(CoarseSolver, WarmStartIsUsed) {
  const auto ops = test::operators(test::problem(2, 1.0), 6);
  const auto cold = solve_coarse(ops, ScfConfig{});
  const auto warm = solve_coarse(ops, ScfConfig{}, {}, cold.pair);
  EXPECT_EQ(warm.history.size(), 1u);
  EXPECT_NEAR(warm.pair.lambda, cold.pair.lambda, 1e-12);
}

TEST(CoarseSolver, ConfigValidation) {
  ScfConfig cfg;
  cfg.damping = 0.0;
  EXPECT_THROW(cfg.validate(), ArgumentError);
  cfg = ScfConfig{};
  cfg.residual_tol = -1.0;
  EXPECT_THROW(cfg.validate(), ArgumentError);
  EXPECT_DOUBLE_EQ(ScfConfig::defaults_for(1.0).damping, 0.7);
  EXPECT_DOUBLE_EQ(ScfConfig::defaults_for(100.0).damping, 0.1);
}
