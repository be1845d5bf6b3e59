#pragma once

#include "gpe/mesh.hpp"

#include <functional>
#include <memory>
#include <span>

namespace gpe {

/// Harmonic trap W(x) = sum_i gamma_i x_i^2.
struct Potential {
  Eigen::VectorXd gammas;

  double operator()(std::span<const double> x) const;
  void validate(int dim) const;
};

/// Coefficients of -Δu + W u + ζ|u|^2 u = λ u on a box with u = 0 on the
/// boundary and unit L2 norm.
struct ProblemParams {
  Potential potential;
  double zeta = 1.0;
  BoxDomain domain = BoxDomain::unit(3);

  void validate() const;
};

/// Numbering of the unknowns of a level: either every vertex or only the
/// interior ones (homogeneous Dirichlet elimination).
class DofMap {
public:
  static DofMap interior(const SimplexMesh &mesh);
  static DofMap all(const SimplexMesh &mesh);

  Index size() const noexcept { return static_cast<Index>(to_vertex_.size()); }
  Index num_vertices() const noexcept {
    return static_cast<Index>(to_dof_.size());
  }

  /// -1 for an eliminated vertex.
  Index dof(Index vertex) const { return to_dof_[static_cast<std::size_t>(vertex)]; }
  Index vertex(Index dof) const { return to_vertex_[static_cast<std::size_t>(dof)]; }

  Vector reduce(const Vector &full) const;
  /// Eliminated vertices get exact zeros.
  Vector expand(const Vector &reduced) const;
  SparseMatrix reduce(const SparseMatrix &full) const;

private:
  std::vector<Index> to_dof_;
  std::vector<Index> to_vertex_;
};

/// Weight evaluated at a quadrature point: cell index, physical coordinates,
/// barycentric coordinates.
using PointWeight = std::function<double(Index, std::span<const double>,
                                         std::span<const double>)>;

PointWeight constant_weight(double value);
PointWeight potential_weight(const Potential &potential);
/// scale * u(x)^2 for a P1 function given by its vertex values.
PointWeight nodal_square_weight(const SimplexMesh &mesh, const Vector &values,
                                double scale);

/// (∇φ_i, ∇φ_j) over the given unknowns.
SparseMatrix assemble_stiffness(const SimplexMesh &mesh, const DofMap &dofs);
/// (φ_i, φ_j).
SparseMatrix assemble_mass(const SimplexMesh &mesh, const DofMap &dofs);
/// (weight φ_i, φ_j), integrated with the degree-4 rule.
SparseMatrix assemble_weighted_mass(const SimplexMesh &mesh,
                                    const DofMap &dofs,
                                    const PointWeight &weight);
/// Entries 2ζ ∫ u^3 φ_i.
Vector assemble_cubic_vector(const SimplexMesh &mesh, const DofMap &dofs,
                             const NodalFunction &u, double zeta);

/// Removes boundary rows and columns.
SparseMatrix eliminate_dirichlet(const SparseMatrix &full,
                                 const SimplexMesh &mesh);
Vector eliminate_dirichlet(const Vector &full, const SimplexMesh &mesh);

/// The u-independent operators of one level over the interior unknowns.
struct LevelOperators {
  std::shared_ptr<const SimplexMesh> mesh;
  ProblemParams params;
  DofMap dofs;
  SparseMatrix stiffness;
  SparseMatrix mass;
  SparseMatrix potential_mass;
  /// ∫ φ_i for every unknown.
  Vector basis_integrals;

  const SimplexMesh &grid() const { return *mesh; }
  Index size() const { return dofs.size(); }

  /// scale * (u^2 φ_i, φ_j) for a reduced coefficient vector u.
  SparseMatrix nonlinear_mass(const Vector &u, double scale) const;
  /// 2ζ ∫ u^3 φ_i for a reduced coefficient vector u.
  Vector cubic_vector(const Vector &u) const;
  /// ∫ u^4.
  double quartic_integral(const Vector &u) const;

  /// K + M_W + ζ N(u): the operator a(u; ., .) linearised as in SCF.
  SparseMatrix hamiltonian(const Vector &u) const;

  NodalFunction to_nodal(const Vector &reduced) const;
  Vector to_reduced(const NodalFunction &u) const;
};

LevelOperators assemble_level(std::shared_ptr<const SimplexMesh> mesh,
                              const ProblemParams &params);

} // namespace gpe
