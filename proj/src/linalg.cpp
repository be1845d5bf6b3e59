#include "gpe/linalg.hpp"

#include <Eigen/SparseLU>

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

namespace gpe {

namespace {

std::string format_residual(double r) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", r);
  return buf;
}

std::unique_ptr<Eigen::IncompleteCholesky<double>>
make_incomplete_cholesky(const SparseMatrix &a) {
  auto ic = std::make_unique<Eigen::IncompleteCholesky<double>>();
  ic->compute(a);
  if (ic->info() != Eigen::Success)
    throw SolverError("incomplete Cholesky preconditioner failed", 0.0);
  return ic;
}

double relative(double residual, double scale) {
  return scale > 0.0 ? residual / scale : residual;
}

// Preconditioned conjugate gradients; stops on the recursively updated
// residual and leaves the final check to the caller.
int pcg(const SparseMatrix &a, const Eigen::IncompleteCholesky<double> &ic,
        const Vector &b, Vector &x, double tol, int max_iters) {
  const double b_norm = b.norm();
  Vector r = b - a * x;
  Vector z = ic.solve(r);
  Vector p = z;
  double rz = r.dot(z);
  for (int it = 0; it < max_iters; ++it) {
    if (r.norm() <= tol * b_norm)
      return it;
    const Vector ap = a * p;
    const double curvature = p.dot(ap);
    if (!(curvature > 0.0))
      throw SolverError("matrix is not positive definite (CG curvature " +
                            format_residual(curvature) + ")",
                        relative(r.norm(), b_norm));
    const double alpha = rz / curvature;
    x += alpha * p;
    r -= alpha * ap;
    z = ic.solve(r);
    const double rz_next = r.dot(z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
  }
  return max_iters;
}

struct BlockPreconditioner {
  const Eigen::IncompleteCholesky<double> &ic;
  double schur;

  Vector apply(const Vector &r) const {
    const Index n = static_cast<Index>(r.size()) - 1;
    Vector z(r.size());
    z.head(n) = ic.solve(r.head(n));
    z[n] = r[n] / schur;
    return z;
  }
};

Vector apply_saddle(const SaddleSystem &sys, const Vector &x) {
  const Index n = sys.size();
  Vector y(n + 1);
  y.head(n) = sys.block * x.head(n) + x[n] * sys.constraint;
  y[n] = sys.constraint.dot(x.head(n));
  return y;
}

Vector saddle_rhs(const SaddleSystem &sys) {
  const Index n = sys.size();
  Vector b(n + 1);
  b.head(n) = sys.rhs_top;
  b[n] = sys.rhs_bottom;
  return b;
}

// Preconditioned MINRES (Paige and Saunders). The loop stops once the true
// residual, recomputed whenever the recurrence estimate reaches the target,
// satisfies the tolerance.
int minres(const SaddleSystem &sys, const BlockPreconditioner &prec,
           const Vector &b, Vector &x, double tol, int max_iters) {
  const double b_norm = b.norm();
  Vector r1 = b - apply_saddle(sys, x);
  if (r1.norm() <= tol * b_norm)
    return 0;
  Vector y = prec.apply(r1);
  double beta1 = r1.dot(y);
  if (!(beta1 > 0.0))
    throw SolverError("MINRES preconditioner is not positive definite",
                      relative(r1.norm(), b_norm));
  beta1 = std::sqrt(beta1);

  Vector r2 = r1;
  Vector w = Vector::Zero(x.size());
  Vector w1 = w;
  Vector w2 = w;
  double old_beta = 0.0;
  double beta = beta1;
  double dbar = 0.0;
  double epsilon = 0.0;
  double phibar = beta1;
  double cs = -1.0;
  double sn = 0.0;
  // Target for the preconditioned-norm estimate; tightened when the true
  // residual lags behind it.
  double estimate_target = tol * beta1 * (b_norm > 0.0 ? 1.0 : 0.0);
  const double eps = std::numeric_limits<double>::epsilon();

  for (int it = 1; it <= max_iters; ++it) {
    const Vector v = y / beta;
    y = apply_saddle(sys, v);
    if (it >= 2)
      y -= (beta / old_beta) * r1;
    const double alpha = v.dot(y);
    y -= (alpha / beta) * r2;
    r1 = r2;
    r2 = y;
    y = prec.apply(r2);
    old_beta = beta;
    const double beta_sq = r2.dot(y);
    if (beta_sq < 0.0)
      throw SolverError("MINRES preconditioner is not positive definite",
                        phibar / beta1);
    beta = std::sqrt(beta_sq);

    const double old_epsilon = epsilon;
    const double delta = cs * dbar + sn * alpha;
    const double gbar = sn * dbar - cs * alpha;
    epsilon = sn * beta;
    dbar = -cs * beta;
    const double gamma = std::max(std::hypot(gbar, beta), eps);
    cs = gbar / gamma;
    sn = beta / gamma;
    const double phi = cs * phibar;
    phibar = sn * phibar;

    w1 = w2;
    w2 = w;
    w = (v - old_epsilon * w1 - delta * w2) / gamma;
    x += phi * w;

    if (phibar <= estimate_target || beta <= eps * beta1) {
      const double true_res = (b - apply_saddle(sys, x)).norm();
      if (true_res <= tol * b_norm)
        return it;
      if (beta <= eps * beta1)
        throw SolverError("MINRES breakdown (Krylov space exhausted)",
                          relative(true_res, b_norm));
      estimate_target =
          phibar * std::min(0.5, 0.9 * tol * b_norm / true_res);
    }
  }
  return max_iters + 1;
}

} // namespace

double SolverSettings::tolerance_for(double h) const {
  return std::min(tol_base, c_tol * h * h);
}

void SolverSettings::validate() const {
  if (direct_max_dofs < 0)
    throw ArgumentError("direct_max_dofs must be >= 0");
  if (!(tol_base > 0.0) || !(tol_base < 1.0))
    throw ArgumentError("tol_base must lie in (0, 1)");
  if (!(c_tol > 0.0))
    throw ArgumentError("c_tol must be > 0");
}

SpdSolver::SpdSolver(SparseMatrix a, const SolverSettings &settings)
    : a_(std::move(a)) {
  if (a_.rows() != a_.cols())
    throw ArgumentError("SPD solver needs a square matrix");
  if (a_.rows() <= settings.direct_max_dofs) {
    cholesky_ = std::make_unique<Eigen::SimplicialLLT<SparseMatrix>>(a_);
    if (cholesky_->info() != Eigen::Success)
      throw SolverError("Cholesky factorisation failed: matrix is not "
                        "positive definite",
                        std::numeric_limits<double>::infinity());
  } else {
    preconditioner_ = make_incomplete_cholesky(a_);
  }
}

Vector SpdSolver::solve(const Vector &b, double tol) const {
  double residual = 0.0;
  Vector x = solve(b, tol, residual);
  if (!(residual <= tol))
    throw SolverError("SPD solve did not reach tolerance " +
                          format_residual(tol) + " (residual " +
                          format_residual(residual) + ")",
                      residual);
  return x;
}

Vector SpdSolver::solve(const Vector &b, double tol, double &achieved) const {
  if (!(tol > 0.0))
    throw ArgumentError("solver tolerance must be positive");
  if (b.size() != a_.rows())
    throw ArgumentError("right-hand side has the wrong length");
  last_iterations_ = 0;
  achieved = 0.0;
  const double b_norm = b.norm();
  if (b_norm == 0.0)
    return Vector::Zero(b.size());

  Vector x;
  if (cholesky_) {
    x = cholesky_->solve(b);
    // One step of refinement when round-off leaves the direct solve short.
    const Vector r = b - a_ * x;
    if (r.norm() > tol * b_norm)
      x += cholesky_->solve(r);
  } else {
    x = Vector::Zero(b.size());
    const int cap = 10 * static_cast<int>(a_.rows());
    last_iterations_ = pcg(a_, *preconditioner_, b, x, tol, cap);
  }
  achieved = (b - a_ * x).norm() / b_norm;
  return x;
}

Vector solve_spd(const SparseMatrix &a, const Vector &b, double tol,
                 const SolverSettings &settings) {
  return SpdSolver(a, settings).solve(b, tol);
}

double saddle_residual(const SaddleSystem &sys, const Vector &u,
                       double lambda) {
  const Index n = sys.size();
  Vector x(n + 1);
  x.head(n) = u;
  x[n] = lambda;
  const Vector b = saddle_rhs(sys);
  const double r = (b - apply_saddle(sys, x)).norm();
  return relative(r, b.norm());
}

SaddleSolution solve_saddle(const SaddleSystem &sys, double tol,
                            const SolverSettings &settings) {
  const Index n = sys.size();
  if (sys.block.cols() != n || sys.constraint.size() != n ||
      sys.rhs_top.size() != n)
    throw ArgumentError("inconsistent saddle system dimensions");
  if (!(tol > 0.0))
    throw ArgumentError("solver tolerance must be positive");

  const Vector b = saddle_rhs(sys);
  SaddleSolution out;
  Vector x = Vector::Zero(n + 1);
  if (b.norm() == 0.0) {
    out.u = Vector::Zero(n);
    return out;
  }

  if (n + 1 <= settings.direct_max_dofs) {
    std::vector<Triplet> triplets;
    triplets.reserve(static_cast<std::size_t>(sys.block.nonZeros() + 2 * n));
    for (int col = 0; col < sys.block.outerSize(); ++col)
      for (SparseMatrix::InnerIterator it(sys.block, col); it; ++it)
        triplets.emplace_back(static_cast<int>(it.row()), col, it.value());
    for (Index i = 0; i < n; ++i) {
      if (sys.constraint[i] == 0.0)
        continue;
      triplets.emplace_back(i, n, sys.constraint[i]);
      triplets.emplace_back(n, i, sys.constraint[i]);
    }
    SparseMatrix bordered(n + 1, n + 1);
    bordered.setFromTriplets(triplets.begin(), triplets.end());
    Eigen::SparseLU<SparseMatrix> lu;
    lu.compute(bordered);
    if (lu.info() != Eigen::Success)
      throw SolverError("saddle factorisation is singular; the initial "
                        "eigenpair is probably too far from the ground "
                        "state (tighten the coarse solve)",
                        std::numeric_limits<double>::infinity());
    x = lu.solve(b);
    for (int refine = 0; refine < 2; ++refine) {
      const Vector r = b - apply_saddle(sys, x);
      if (r.norm() <= tol * b.norm())
        break;
      x += lu.solve(r);
    }
    out.direct = true;
  } else {
    const SparseMatrix &spd =
        sys.spd_approximation ? *sys.spd_approximation : sys.block;
    const auto ic = make_incomplete_cholesky(spd);
    const double schur = sys.constraint.dot(ic->solve(sys.constraint));
    if (!(schur > 0.0))
      throw SolverError("degenerate constraint in saddle preconditioner", 1.0);
    const BlockPreconditioner prec{*ic, schur};
    const int cap = 10 * static_cast<int>(n + 1);
    out.iterations = minres(sys, prec, b, x, tol, cap);
    out.direct = false;
    if (out.iterations > cap)
      throw SolverError("MINRES did not converge within " +
                            std::to_string(cap) + " iterations",
                        (b - apply_saddle(sys, x)).norm() / b.norm());
  }
  out.u = x.head(n);
  out.lambda = x[n];
  out.residual = saddle_residual(sys, out.u, out.lambda);
  if (!std::isfinite(out.residual) || out.residual > tol)
    throw SolverError("saddle solve residual " +
                          format_residual(out.residual) +
                          " exceeds tolerance " + format_residual(tol) +
                          "; the initial eigenpair is probably too far from "
                          "the ground state",
                      out.residual);
  return out;
}

} // namespace gpe
