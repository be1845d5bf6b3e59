#include "gpe/assembly.hpp"

#include "gpe/quadrature.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <string>

namespace gpe {

namespace {

template <int Dim> struct ElementGeometry {
  using Points = Eigen::Matrix<double, Dim, Dim + 1>;
  using Gradients = Eigen::Matrix<double, Dim + 1, Dim>;

  Points points;
  Gradients gradients; // row a = ∇λ_a
  double volume = 0.0;
};

constexpr double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

template <int Dim>
ElementGeometry<Dim> element_geometry(const SimplexMesh &mesh, Index c) {
  ElementGeometry<Dim> g;
  const auto cell = mesh.cell(c);
  for (int a = 0; a <= Dim; ++a)
    g.points.col(a) = mesh.vertex(cell(a));
  Eigen::Matrix<double, Dim, Dim> jac;
  for (int k = 0; k < Dim; ++k)
    jac.col(k) = g.points.col(k + 1) - g.points.col(0);
  const double det = jac.determinant();
  const double scale = std::pow((g.points.col(1) - g.points.col(0)).norm(), Dim);
  if (!(std::abs(det) > 1e-12 * scale))
    throw ArgumentError("degenerate cell " + std::to_string(c) +
                        " (zero volume)");
  g.volume = std::abs(det) / factorial(Dim);
  const Eigen::Matrix<double, Dim, Dim> inv = jac.inverse();
  g.gradients.template bottomRows<Dim>() = inv;
  g.gradients.row(0) = -inv.colwise().sum();
  return g;
}

template <int Dim> const SimplexQuadrature<double> &rule() {
  static const SimplexQuadrature<double> r = degree4_rule<double>(Dim);
  return r;
}

template <int Dim, typename Local>
SparseMatrix assemble_matrix(const SimplexMesh &mesh, const DofMap &dofs,
                             Local &&local) {
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(mesh.num_cells()) * (Dim + 1) *
                   (Dim + 1));
  Eigen::Matrix<double, Dim + 1, Dim + 1> block;
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    const auto geometry = element_geometry<Dim>(mesh, c);
    local(c, geometry, block);
    const auto cell = mesh.cell(c);
    for (int a = 0; a <= Dim; ++a) {
      const Index i = dofs.dof(cell(a));
      if (i < 0)
        continue;
      for (int b = 0; b <= Dim; ++b) {
        const Index j = dofs.dof(cell(b));
        if (j >= 0)
          triplets.emplace_back(i, j, block(a, b));
      }
    }
  }
  SparseMatrix result(dofs.size(), dofs.size());
  result.setFromTriplets(triplets.begin(), triplets.end());
  return result;
}

template <int Dim>
SparseMatrix stiffness_impl(const SimplexMesh &mesh, const DofMap &dofs) {
  return assemble_matrix<Dim>(
      mesh, dofs, [](Index, const ElementGeometry<Dim> &g, auto &block) {
        block.noalias() = g.volume * g.gradients * g.gradients.transpose();
      });
}

template <int Dim>
SparseMatrix weighted_mass_impl(const SimplexMesh &mesh, const DofMap &dofs,
                                const PointWeight &weight) {
  const auto &quad = rule<Dim>();
  return assemble_matrix<Dim>(
      mesh, dofs, [&](Index c, const ElementGeometry<Dim> &g, auto &block) {
        block.setZero();
        Eigen::Matrix<double, Dim, 1> x;
        Eigen::Matrix<double, Dim + 1, 1> bary;
        for (Eigen::Index q = 0; q < quad.size(); ++q) {
          bary = quad.points.col(q);
          x.noalias() = g.points * bary;
          const double w =
              quad.weights[q] * weight(c, std::span<const double>(x.data(), Dim),
                                       std::span<const double>(bary.data(), Dim + 1));
          block.noalias() += w * bary * bary.transpose();
        }
        block *= g.volume;
      });
}

// Exact P1 mass matrix: |T| (1 + δ_ab) / ((d + 1)(d + 2)).
template <int Dim>
SparseMatrix mass_impl(const SimplexMesh &mesh, const DofMap &dofs) {
  return assemble_matrix<Dim>(
      mesh, dofs, [](Index, const ElementGeometry<Dim> &g, auto &block) {
        const double off = g.volume / ((Dim + 1) * (Dim + 2));
        block.setConstant(off);
        block.diagonal().array() += off;
      });
}

template <int Dim>
Vector cubic_impl(const SimplexMesh &mesh, const DofMap &dofs,
                  const Vector &values, double zeta) {
  const auto &quad = rule<Dim>();
  Vector result = Vector::Zero(dofs.size());
  Eigen::Matrix<double, Dim + 1, 1> local_u;
  Eigen::Matrix<double, Dim + 1, 1> local;
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    const auto cell = mesh.cell(c);
    for (int a = 0; a <= Dim; ++a)
      local_u[a] = values[cell(a)];
    if (local_u.isZero(0.0))
      continue;
    const auto g = element_geometry<Dim>(mesh, c);
    local.setZero();
    for (Eigen::Index q = 0; q < quad.size(); ++q) {
      const auto bary = quad.points.col(q);
      const double u = local_u.dot(bary);
      local.noalias() += quad.weights[q] * u * u * u * bary;
    }
    local *= 2.0 * zeta * g.volume;
    for (int a = 0; a <= Dim; ++a) {
      const Index i = dofs.dof(cell(a));
      if (i >= 0)
        result[i] += local[a];
    }
  }
  return result;
}

template <template <int> class Fn, typename... Args>
auto dispatch(int dim, Args &&...args) {
  switch (dim) {
  case 1:
    return Fn<1>::run(std::forward<Args>(args)...);
  case 2:
    return Fn<2>::run(std::forward<Args>(args)...);
  case 3:
    return Fn<3>::run(std::forward<Args>(args)...);
  default:
    throw ArgumentError("unsupported dimension " + std::to_string(dim));
  }
}

template <int Dim> struct Stiffness {
  static SparseMatrix run(const SimplexMesh &m, const DofMap &d) {
    return stiffness_impl<Dim>(m, d);
  }
};
template <int Dim> struct Mass {
  static SparseMatrix run(const SimplexMesh &m, const DofMap &d) {
    return mass_impl<Dim>(m, d);
  }
};
template <int Dim> struct WeightedMass {
  static SparseMatrix run(const SimplexMesh &m, const DofMap &d,
                          const PointWeight &w) {
    return weighted_mass_impl<Dim>(m, d, w);
  }
};
template <int Dim> struct Cubic {
  static Vector run(const SimplexMesh &m, const DofMap &d, const Vector &u,
                    double zeta) {
    return cubic_impl<Dim>(m, d, u, zeta);
  }
};

void check_dofs(const SimplexMesh &mesh, const DofMap &dofs) {
  if (dofs.num_vertices() != mesh.num_vertices())
    throw ArgumentError("dof map does not belong to this mesh");
}

} // namespace

double Potential::operator()(std::span<const double> x) const {
  double w = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    w += gammas[static_cast<Eigen::Index>(i)] * x[i] * x[i];
  return w;
}

void Potential::validate(int dim) const {
  if (gammas.size() != dim)
    throw ArgumentError("potential needs " + std::to_string(dim) +
                        " coefficients, got " + std::to_string(gammas.size()));
  // Zero coefficients are accepted for the linear test problems.
  for (Eigen::Index i = 0; i < gammas.size(); ++i)
    if (!(gammas[i] >= 0.0) || !std::isfinite(gammas[i]))
      throw ArgumentError("potential coefficients must be finite and >= 0");
}

void ProblemParams::validate() const {
  domain.validate();
  potential.validate(domain.dim);
  if (!(zeta >= 0.0) || !std::isfinite(zeta))
    throw ArgumentError("zeta must be finite and >= 0");
}

DofMap DofMap::interior(const SimplexMesh &mesh) {
  DofMap map;
  map.to_dof_.assign(static_cast<std::size_t>(mesh.num_vertices()), -1);
  map.to_vertex_.reserve(
      static_cast<std::size_t>(mesh.num_vertices() - mesh.num_boundary_vertices()));
  for (Index v = 0; v < mesh.num_vertices(); ++v)
    if (!mesh.is_boundary(v)) {
      map.to_dof_[static_cast<std::size_t>(v)] =
          static_cast<Index>(map.to_vertex_.size());
      map.to_vertex_.push_back(v);
    }
  return map;
}

DofMap DofMap::all(const SimplexMesh &mesh) {
  DofMap map;
  map.to_dof_.resize(static_cast<std::size_t>(mesh.num_vertices()));
  for (Index v = 0; v < mesh.num_vertices(); ++v)
    map.to_dof_[static_cast<std::size_t>(v)] = v;
  map.to_vertex_ = map.to_dof_;
  return map;
}

Vector DofMap::reduce(const Vector &full) const {
  if (full.size() != num_vertices())
    throw ArgumentError("vector length does not match the vertex count");
  Vector r(size());
  for (Index k = 0; k < size(); ++k)
    r[k] = full[vertex(k)];
  return r;
}

Vector DofMap::expand(const Vector &reduced) const {
  if (reduced.size() != size())
    throw ArgumentError("vector length does not match the dof count");
  Vector full = Vector::Zero(num_vertices());
  for (Index k = 0; k < size(); ++k)
    full[vertex(k)] = reduced[k];
  return full;
}

SparseMatrix DofMap::reduce(const SparseMatrix &full) const {
  if (full.rows() != num_vertices() || full.cols() != num_vertices())
    throw ArgumentError("matrix shape does not match the vertex count");
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(full.nonZeros()));
  for (int col = 0; col < full.outerSize(); ++col) {
    const Index j = dof(col);
    if (j < 0)
      continue;
    for (SparseMatrix::InnerIterator it(full, col); it; ++it) {
      const Index i = dof(static_cast<Index>(it.row()));
      if (i >= 0)
        triplets.emplace_back(i, j, it.value());
    }
  }
  SparseMatrix r(size(), size());
  r.setFromTriplets(triplets.begin(), triplets.end());
  return r;
}

PointWeight constant_weight(double value) {
  return [value](Index, std::span<const double>, std::span<const double>) {
    return value;
  };
}

PointWeight potential_weight(const Potential &potential) {
  return [potential](Index, std::span<const double> x, std::span<const double>) {
    return potential(x);
  };
}

PointWeight nodal_square_weight(const SimplexMesh &mesh, const Vector &values,
                                double scale) {
  if (values.size() != mesh.num_vertices())
    throw ArgumentError("nodal weight does not match the mesh");
  return [&mesh, &values, scale](Index c, std::span<const double>,
                                 std::span<const double> bary) {
    const auto cell = mesh.cell(c);
    double u = 0.0;
    for (std::size_t a = 0; a < bary.size(); ++a)
      u += bary[a] * values[cell(static_cast<Eigen::Index>(a))];
    return scale * u * u;
  };
}

SparseMatrix assemble_stiffness(const SimplexMesh &mesh, const DofMap &dofs) {
  check_dofs(mesh, dofs);
  return dispatch<Stiffness>(mesh.dim(), mesh, dofs);
}

SparseMatrix assemble_mass(const SimplexMesh &mesh, const DofMap &dofs) {
  check_dofs(mesh, dofs);
  return dispatch<Mass>(mesh.dim(), mesh, dofs);
}

SparseMatrix assemble_weighted_mass(const SimplexMesh &mesh,
                                    const DofMap &dofs,
                                    const PointWeight &weight) {
  check_dofs(mesh, dofs);
  return dispatch<WeightedMass>(mesh.dim(), mesh, dofs, weight);
}

Vector assemble_cubic_vector(const SimplexMesh &mesh, const DofMap &dofs,
                             const NodalFunction &u, double zeta) {
  check_dofs(mesh, dofs);
  if (u.level != mesh.level() || u.values.size() != mesh.num_vertices())
    throw ArgumentError("function on level " + std::to_string(u.level) +
                        " used with mesh level " + std::to_string(mesh.level()));
  if (zeta == 0.0)
    return Vector::Zero(dofs.size());
  return dispatch<Cubic>(mesh.dim(), mesh, dofs, u.values, zeta);
}

SparseMatrix eliminate_dirichlet(const SparseMatrix &full,
                                 const SimplexMesh &mesh) {
  return DofMap::interior(mesh).reduce(full);
}

Vector eliminate_dirichlet(const Vector &full, const SimplexMesh &mesh) {
  return DofMap::interior(mesh).reduce(full);
}

SparseMatrix LevelOperators::nonlinear_mass(const Vector &u,
                                            double scale) const {
  const Vector full = dofs.expand(u);
  return assemble_weighted_mass(*mesh, dofs,
                                nodal_square_weight(*mesh, full, scale));
}

Vector LevelOperators::cubic_vector(const Vector &u) const {
  return assemble_cubic_vector(*mesh, dofs, to_nodal(u), params.zeta);
}

double LevelOperators::quartic_integral(const Vector &u) const {
  // 2 * 0.5 * ∫ u^3 φ_i, tested against u.
  return assemble_cubic_vector(*mesh, dofs, to_nodal(u), 0.5).dot(u);
}

SparseMatrix LevelOperators::hamiltonian(const Vector &u) const {
  SparseMatrix h = stiffness + potential_mass;
  if (params.zeta != 0.0)
    h += nonlinear_mass(u, params.zeta);
  return h;
}

NodalFunction LevelOperators::to_nodal(const Vector &reduced) const {
  return {mesh->level(), dofs.expand(reduced)};
}

Vector LevelOperators::to_reduced(const NodalFunction &u) const {
  if (u.level != mesh->level())
    throw ArgumentError("function on level " + std::to_string(u.level) +
                        " used with mesh level " + std::to_string(mesh->level()));
  return dofs.reduce(u.values);
}

LevelOperators assemble_level(std::shared_ptr<const SimplexMesh> mesh,
                              const ProblemParams &params) {
  params.validate();
  if (mesh->dim() != params.domain.dim)
    throw ArgumentError("mesh and problem dimensions differ");
  LevelOperators ops;
  ops.params = params;
  ops.dofs = DofMap::interior(*mesh);
  ops.stiffness = assemble_stiffness(*mesh, ops.dofs);
  ops.mass = assemble_mass(*mesh, ops.dofs);
  ops.potential_mass = assemble_weighted_mass(
      *mesh, ops.dofs, potential_weight(params.potential));
  Vector integrals = Vector::Zero(mesh->num_vertices());
  for (Index c = 0; c < mesh->num_cells(); ++c) {
    const double share = cell_volume(*mesh, c) / (mesh->dim() + 1);
    for (int a = 0; a <= mesh->dim(); ++a)
      integrals[mesh->cells()(a, c)] += share;
  }
  ops.basis_integrals = ops.dofs.reduce(integrals);
  ops.mesh = std::move(mesh);
  return ops;
}

} // namespace gpe
