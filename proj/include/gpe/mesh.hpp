#pragma once

#include "gpe/types.hpp"

#include <iosfwd>
#include <memory>
#include <vector>

namespace gpe {

/// Axis-aligned box in 1, 2 or 3 dimensions.
struct BoxDomain {
  int dim = 3;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  /// (0,1)^dim.
  static BoxDomain unit(int dim);

  double volume() const;
  Eigen::VectorXd extent() const { return upper - lower; }

  /// Throws ArgumentError if the dimension or the bounds are invalid.
  void validate() const;
};

/// Conforming simplicial mesh of a box, immutable once built.
///
/// Vertices are stored column-wise (dim x n_vertices), cells column-wise as
/// (dim + 1) vertex indices. Cells keep the vertex order produced by the
/// Kuhn subdivision and by regular refinement; that order is what makes the
/// children of a refinement congruent to their parent, so cells are not
/// reordered to force a positive determinant. Use cell_volume() for the
/// orientation-free measure.
class SimplexMesh {
public:
  SimplexMesh(BoxDomain domain, Coordinates vertices, Connectivity cells,
              int level);

  int dim() const noexcept { return domain_.dim; }
  int level() const noexcept { return level_; }
  const BoxDomain &domain() const noexcept { return domain_; }

  Index num_vertices() const noexcept {
    return static_cast<Index>(vertices_.cols());
  }
  Index num_cells() const noexcept { return static_cast<Index>(cells_.cols()); }

  const Coordinates &vertices() const noexcept { return vertices_; }
  const Connectivity &cells() const noexcept { return cells_; }

  auto vertex(Index v) const { return vertices_.col(v); }
  auto cell(Index c) const { return cells_.col(c); }

  bool is_boundary(Index v) const { return boundary_[static_cast<std::size_t>(v)]; }
  const std::vector<bool> &boundary_flags() const noexcept { return boundary_; }
  Index num_boundary_vertices() const noexcept { return n_boundary_; }

  /// Largest cell diameter (longest edge).
  double h_max() const noexcept { return h_max_; }

private:
  BoxDomain domain_;
  Coordinates vertices_;
  Connectivity cells_;
  std::vector<bool> boundary_;
  Index n_boundary_ = 0;
  int level_ = 1;
  double h_max_ = 0.0;
};

/// Coefficient vector of a P1 function, indexed by all mesh vertices.
/// Boundary entries are zero for functions in the Dirichlet space.
struct NodalFunction {
  int level = 1;
  Vector values;
};

/// Nodal prolongation from one level to the next finer one.
struct Prolongation {
  int coarse_level = 1;
  int fine_level = 2;
  /// n_fine_vertices x n_coarse_vertices.
  SparseMatrix map;
};

/// Meshes of levels 1..n with the prolongations between consecutive ones.
class LevelHierarchy {
public:
  LevelHierarchy() = default;

  std::size_t size() const noexcept { return meshes_.size(); }

  /// Mesh by zero-based position (position k holds level k + 1).
  const SimplexMesh &mesh(std::size_t k) const { return *meshes_.at(k); }
  std::shared_ptr<const SimplexMesh> mesh_ptr(std::size_t k) const {
    return meshes_.at(k);
  }
  const SimplexMesh &finest() const { return *meshes_.back(); }

  /// Prolongation from position k to position k + 1.
  const Prolongation &prolongation(std::size_t k) const {
    return prolongations_.at(k);
  }

  void push_back(std::shared_ptr<const SimplexMesh> mesh);
  void push_back(std::shared_ptr<const SimplexMesh> mesh,
                 Prolongation prolongation);

private:
  std::vector<std::shared_ptr<const SimplexMesh>> meshes_;
  std::vector<Prolongation> prolongations_;
};

/// Uniform mesh with cells_per_axis^dim boxes, each split into dim! Kuhn
/// simplices.
SimplexMesh build_initial_mesh(const BoxDomain &domain, int cells_per_axis);

struct Refinement {
  SimplexMesh mesh;
  Prolongation prolongation;
};

/// Regular (red) refinement into 2^dim children per cell. Coarse vertices
/// keep their indices; edge midpoints are appended in sorted edge order.
Refinement refine_regular(const SimplexMesh &mesh);

LevelHierarchy build_hierarchy(const BoxDomain &domain, int cells_per_axis,
                               int n_levels);

NodalFunction prolongate(const Prolongation &p, const NodalFunction &coarse);

/// Prolongates through consecutive levels of the hierarchy, from position
/// `from` to position `to` (to >= from).
NodalFunction prolongate_to(const LevelHierarchy &hierarchy,
                            const NodalFunction &u, std::size_t from,
                            std::size_t to);

double cell_volume(const SimplexMesh &mesh, Index c);
double cell_diameter(const SimplexMesh &mesh, Index c);
double cell_inradius(const SimplexMesh &mesh, Index c);
double total_volume(const SimplexMesh &mesh);

/// Legacy ASCII VTK unstructured grid.
void write_vtk(std::ostream &out, const SimplexMesh &mesh,
               const NodalFunction *field = nullptr);

} // namespace gpe
