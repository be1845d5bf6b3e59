#pragma once

#include "gpe/diagnostics.hpp"

#include <Eigen/Dense>

#include <memory>

namespace gpe::test {

inline ProblemParams problem(int dim, double zeta, std::vector<double> gammas = {}) {
  ProblemParams p;
  p.domain = BoxDomain::unit(dim);
  p.zeta = zeta;
  if (gammas.empty())
    gammas.assign(static_cast<std::size_t>(dim), 1.0);
  p.potential.gammas =
      Eigen::Map<const Eigen::VectorXd>(gammas.data(), static_cast<Eigen::Index>(gammas.size()));
  return p;
}

inline std::shared_ptr<const SimplexMesh> mesh_ptr(int dim, int cells) {
  return std::make_shared<const SimplexMesh>(build_initial_mesh(BoxDomain::unit(dim), cells));
}

inline LevelOperators operators(const ProblemParams &p, int cells) {
  return assemble_level(std::make_shared<const SimplexMesh>(
                            build_initial_mesh(p.domain, cells)),
                        p);
}

/// Smallest generalized eigenpair (H, M) by a dense solver, M-normalised
/// and sign-aligned to a positive integral.
struct DenseEigen {
  double value;
  Vector vector;
};

inline DenseEigen dense_smallest(const SparseMatrix &h, const SparseMatrix &m) {
  const Eigen::MatrixXd hd(h);
  const Eigen::MatrixXd md(m);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(hd, md);
  Vector v = es.eigenvectors().col(0);
  v /= std::sqrt(v.dot(md * v));
  if (v.sum() < 0.0)
    v = -v;
  return {es.eigenvalues()[0], v};
}

/// Dense LU solve of the bordered matrix [A c; c^T 0].
inline Vector dense_saddle(const SaddleSystem &sys) {
  const Index n = sys.size();
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n + 1, n + 1);
  k.topLeftCorner(n, n) = Eigen::MatrixXd(sys.block);
  k.topRightCorner(n, 1) = sys.constraint;
  k.bottomLeftCorner(1, n) = sys.constraint.transpose();
  Vector b(n + 1);
  b.head(n) = sys.rhs_top;
  b[n] = sys.rhs_bottom;
  return k.fullPivLu().solve(b);
}

inline double relative_difference(const SparseMatrix &a, const SparseMatrix &b) {
  return (a - b).norm() / b.norm();
}

inline double asymmetry(const SparseMatrix &a) {
  const SparseMatrix t = a.transpose();
  return (a - t).norm() / a.norm();
}

} // namespace gpe::test
