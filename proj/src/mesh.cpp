#include "gpe/mesh.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <limits>
#include <array>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>

namespace gpe {

namespace {

constexpr double boundary_tolerance = 1e-14;

int factorial(int n) { return n <= 1 ? 1 : n * factorial(n - 1); }

std::uint64_t edge_key(Index a, Index b) {
  if (a > b)
    std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

// Columns x_1 - x_0, ..., x_d - x_0 of a cell.
Matrix edge_matrix(const SimplexMesh &mesh, Index c) {
  const int d = mesh.dim();
  const auto cell = mesh.cell(c);
  Matrix e(d, d);
  for (int k = 0; k < d; ++k)
    e.col(k) = mesh.vertex(cell(k + 1)) - mesh.vertex(cell(0));
  return e;
}

// Measure of the simplex spanned by the given points (columns), using the
// Gram determinant so that it works for facets embedded in higher dimension.
double simplex_measure(const Matrix &points) {
  const auto k = points.cols() - 1;
  if (k == 0)
    return 1.0;
  Matrix e(points.rows(), k);
  for (Eigen::Index j = 0; j < k; ++j)
    e.col(j) = points.col(j + 1) - points.col(0);
  const double gram = (e.transpose() * e).determinant();
  return std::sqrt(std::max(gram, 0.0)) / factorial(static_cast<int>(k));
}

// Children of a cell in terms of local vertices 0..d and local edge
// midpoints. Midpoint of local edge (i, j) is encoded as 10 + 4 * i + j.
constexpr int mid(int i, int j) { return 10 + 4 * i + j; }

const std::vector<std::vector<int>> &child_table(int dim) {
  static const std::vector<std::vector<int>> line = {{0, mid(0, 1)},
                                                     {mid(0, 1), 1}};
  static const std::vector<std::vector<int>> triangle = {
      {0, mid(0, 1), mid(0, 2)},
      {mid(0, 1), 1, mid(1, 2)},
      {mid(0, 2), mid(1, 2), 2},
      {mid(0, 1), mid(0, 2), mid(1, 2)}};
  // Bey's ordering: every child of a Kuhn simplex is again a Kuhn simplex
  // with its vertices in path order.
  static const std::vector<std::vector<int>> tetrahedron = {
      {0, mid(0, 1), mid(0, 2), mid(0, 3)},
      {mid(0, 1), 1, mid(1, 2), mid(1, 3)},
      {mid(0, 2), mid(1, 2), 2, mid(2, 3)},
      {mid(0, 3), mid(1, 3), mid(2, 3), 3},
      {mid(0, 1), mid(0, 2), mid(0, 3), mid(1, 3)},
      {mid(0, 1), mid(0, 2), mid(1, 2), mid(1, 3)},
      {mid(0, 2), mid(0, 3), mid(1, 3), mid(2, 3)},
      {mid(0, 2), mid(1, 2), mid(1, 3), mid(2, 3)}};
  switch (dim) {
  case 1:
    return line;
  case 2:
    return triangle;
  default:
    return tetrahedron;
  }
}

} // namespace

BoxDomain BoxDomain::unit(int dim) {
  BoxDomain box;
  box.dim = dim;
  box.lower = Eigen::VectorXd::Zero(std::max(dim, 0));
  box.upper = Eigen::VectorXd::Ones(std::max(dim, 0));
  return box;
}

double BoxDomain::volume() const { return extent().prod(); }

void BoxDomain::validate() const {
  if (dim < 1 || dim > 3)
    throw ArgumentError("box dimension must be 1, 2 or 3, got " +
                        std::to_string(dim));
  if (lower.size() != dim || upper.size() != dim)
    throw ArgumentError("box bounds must have " + std::to_string(dim) +
                        " components");
  for (int i = 0; i < dim; ++i)
    if (!(upper[i] > lower[i]))
      throw ArgumentError("box upper bound must exceed lower bound on axis " +
                          std::to_string(i));
}

SimplexMesh::SimplexMesh(BoxDomain domain, Coordinates vertices,
                         Connectivity cells, int level)
    : domain_(std::move(domain)), vertices_(std::move(vertices)),
      cells_(std::move(cells)), level_(level) {
  domain_.validate();
  const int d = domain_.dim;
  if (vertices_.rows() != d)
    throw ArgumentError("vertex coordinates must have one row per dimension");
  if (cells_.rows() != d + 1)
    throw ArgumentError("cells must have dim + 1 vertices");
  if (cells_.size() > 0 &&
      (cells_.minCoeff() < 0 || cells_.maxCoeff() >= vertices_.cols()))
    throw ArgumentError("cell references a vertex out of range");

  boundary_.assign(static_cast<std::size_t>(vertices_.cols()), false);
  for (Index v = 0; v < num_vertices(); ++v) {
    for (int i = 0; i < d; ++i) {
      const double x = vertices_(i, v);
      if (std::abs(x - domain_.lower[i]) <= boundary_tolerance ||
          std::abs(x - domain_.upper[i]) <= boundary_tolerance) {
        boundary_[static_cast<std::size_t>(v)] = true;
        ++n_boundary_;
        break;
      }
    }
  }

  double h2 = 0.0;
  for (Index c = 0; c < num_cells(); ++c)
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j <= d; ++j)
        h2 = std::max(h2, (vertices_.col(cells_(i, c)) -
                           vertices_.col(cells_(j, c)))
                              .squaredNorm());
  h_max_ = std::sqrt(h2);
}

void LevelHierarchy::push_back(std::shared_ptr<const SimplexMesh> mesh) {
  if (!meshes_.empty())
    throw ArgumentError("finer levels need a prolongation");
  meshes_.push_back(std::move(mesh));
}

void LevelHierarchy::push_back(std::shared_ptr<const SimplexMesh> mesh,
                               Prolongation prolongation) {
  if (meshes_.empty())
    throw ArgumentError("the first level has no prolongation");
  if (prolongation.map.rows() != mesh->num_vertices() ||
      prolongation.map.cols() != meshes_.back()->num_vertices())
    throw ArgumentError("prolongation shape does not match the levels");
  meshes_.push_back(std::move(mesh));
  prolongations_.push_back(std::move(prolongation));
}

SimplexMesh build_initial_mesh(const BoxDomain &domain, int cells_per_axis) {
  domain.validate();
  if (cells_per_axis < 1)
    throw ArgumentError("cells_per_axis must be at least 1");

  const int d = domain.dim;
  const Index n = cells_per_axis;
  const Index np = n + 1;
  Index n_vertices = 1;
  Index n_boxes = 1;
  for (int i = 0; i < d; ++i) {
    n_vertices *= np;
    n_boxes *= n;
  }

  // Lattice vertices in lexicographic order (axis 0 fastest).
  Coordinates vertices(d, n_vertices);
  const Eigen::VectorXd extent = domain.extent();
  for (Index v = 0; v < n_vertices; ++v) {
    Index rest = v;
    for (int i = 0; i < d; ++i) {
      const Index k = rest % np;
      rest /= np;
      // Exact face coordinates at the ends of each axis.
      vertices(i, v) = k == n ? domain.upper[i]
                              : domain.lower[i] + extent[i] * (static_cast<double>(k) / n);
    }
  }

  std::array<Index, 3> stride{1, np, np * np};
  std::vector<int> perm(static_cast<std::size_t>(d));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::vector<int>> perms;
  do {
    perms.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));

  Connectivity cells(d + 1, n_boxes * static_cast<Index>(perms.size()));
  Index c = 0;
  for (Index b = 0; b < n_boxes; ++b) {
    Index rest = b;
    Index base = 0;
    for (int i = 0; i < d; ++i) {
      base += (rest % n) * stride[static_cast<std::size_t>(i)];
      rest /= n;
    }
    for (const auto &p : perms) {
      Index v = base;
      cells(0, c) = v;
      for (int k = 0; k < d; ++k) {
        v += stride[static_cast<std::size_t>(p[static_cast<std::size_t>(k)])];
        cells(k + 1, c) = v;
      }
      ++c;
    }
  }
  return SimplexMesh(domain, std::move(vertices), std::move(cells), 1);
}

Refinement refine_regular(const SimplexMesh &mesh) {
  const int d = mesh.dim();
  const Index n_cells = mesh.num_cells();
  const Index n_coarse = mesh.num_vertices();
  const auto &cells = mesh.cells();

  std::vector<std::uint64_t> edges;
  edges.reserve(static_cast<std::size_t>(n_cells) * (d * (d + 1) / 2));
  for (Index c = 0; c < n_cells; ++c)
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j <= d; ++j)
        edges.push_back(edge_key(cells(i, c), cells(j, c)));
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  const auto n_edges = static_cast<Index>(edges.size());
  const Index n_fine = n_coarse + n_edges;
  if (static_cast<std::int64_t>(n_coarse) + n_edges >
      std::numeric_limits<Index>::max())
    throw ArgumentError("refined mesh exceeds the vertex index range");

  Coordinates vertices(d, n_fine);
  vertices.leftCols(n_coarse) = mesh.vertices();
  std::vector<Triplet> entries;
  entries.reserve(static_cast<std::size_t>(n_coarse + 2 * n_edges));
  for (Index v = 0; v < n_coarse; ++v)
    entries.emplace_back(v, v, 1.0);
  for (Index e = 0; e < n_edges; ++e) {
    const auto key = edges[static_cast<std::size_t>(e)];
    const auto a = static_cast<Index>(key >> 32);
    const auto b = static_cast<Index>(key & 0xffffffffu);
    vertices.col(n_coarse + e) =
        0.5 * (mesh.vertex(a) + mesh.vertex(b));
    entries.emplace_back(n_coarse + e, a, 0.5);
    entries.emplace_back(n_coarse + e, b, 0.5);
  }

  const auto &table = child_table(d);
  const auto n_children = static_cast<Index>(table.size());
  Connectivity fine_cells(d + 1, n_cells * n_children);
  std::array<std::array<Index, 4>, 4> midpoint{};
  for (Index c = 0; c < n_cells; ++c) {
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j <= d; ++j) {
        const auto key = edge_key(cells(i, c), cells(j, c));
        const auto pos = std::lower_bound(edges.begin(), edges.end(), key) -
                         edges.begin();
        midpoint[i][j] = n_coarse + static_cast<Index>(pos);
      }
    for (Index k = 0; k < n_children; ++k) {
      const auto &child = table[static_cast<std::size_t>(k)];
      for (int l = 0; l <= d; ++l) {
        const int code = child[static_cast<std::size_t>(l)];
        fine_cells(l, c * n_children + k) =
            code < 10 ? cells(code, c)
                      : midpoint[(code - 10) / 4][(code - 10) % 4];
      }
    }
  }

  Prolongation p;
  p.coarse_level = mesh.level();
  p.fine_level = mesh.level() + 1;
  p.map.resize(n_fine, n_coarse);
  p.map.setFromTriplets(entries.begin(), entries.end());
  return {SimplexMesh(mesh.domain(), std::move(vertices), std::move(fine_cells),
                      mesh.level() + 1),
          std::move(p)};
}

LevelHierarchy build_hierarchy(const BoxDomain &domain, int cells_per_axis,
                               int n_levels) {
  if (n_levels < 1)
    throw ArgumentError("n_levels must be at least 1");
  LevelHierarchy hierarchy;
  hierarchy.push_back(std::make_shared<const SimplexMesh>(
      build_initial_mesh(domain, cells_per_axis)));
  for (int l = 1; l < n_levels; ++l) {
    auto refined = refine_regular(hierarchy.finest());
    hierarchy.push_back(
        std::make_shared<const SimplexMesh>(std::move(refined.mesh)),
        std::move(refined.prolongation));
  }
  return hierarchy;
}

NodalFunction prolongate(const Prolongation &p, const NodalFunction &coarse) {
  if (coarse.values.size() != p.map.cols())
    throw ArgumentError("prolongation expects " + std::to_string(p.map.cols()) +
                        " coarse values, got " +
                        std::to_string(coarse.values.size()));
  return {p.fine_level, p.map * coarse.values};
}

NodalFunction prolongate_to(const LevelHierarchy &hierarchy,
                            const NodalFunction &u, std::size_t from,
                            std::size_t to) {
  if (to < from || to >= hierarchy.size())
    throw ArgumentError("invalid prolongation range");
  if (u.values.size() != hierarchy.mesh(from).num_vertices())
    throw ArgumentError("function does not live on the source level");
  NodalFunction result = u;
  for (std::size_t k = from; k < to; ++k)
    result = prolongate(hierarchy.prolongation(k), result);
  return result;
}

double cell_volume(const SimplexMesh &mesh, Index c) {
  return std::abs(edge_matrix(mesh, c).determinant()) / factorial(mesh.dim());
}

double cell_diameter(const SimplexMesh &mesh, Index c) {
  const int d = mesh.dim();
  const auto cell = mesh.cell(c);
  double h = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j <= d; ++j)
      h = std::max(h, (mesh.vertex(cell(i)) - mesh.vertex(cell(j))).norm());
  return h;
}

double cell_inradius(const SimplexMesh &mesh, Index c) {
  const int d = mesh.dim();
  const auto cell = mesh.cell(c);
  double facets = 0.0;
  for (int skip = 0; skip <= d; ++skip) {
    Matrix points(d, d);
    for (int k = 0, col = 0; k <= d; ++k)
      if (k != skip)
        points.col(col++) = mesh.vertex(cell(k));
    facets += simplex_measure(points);
  }
  return d * cell_volume(mesh, c) / facets;
}

double total_volume(const SimplexMesh &mesh) {
  double v = 0.0;
  for (Index c = 0; c < mesh.num_cells(); ++c)
    v += cell_volume(mesh, c);
  return v;
}

void write_vtk(std::ostream &out, const SimplexMesh &mesh,
               const NodalFunction *field) {
  const int d = mesh.dim();
  const int cell_type = d == 1 ? 3 : (d == 2 ? 5 : 10);
  out << "# vtk DataFile Version 3.0\n"
      << "gpe mesh level " << mesh.level() << "\n"
      << "ASCII\nDATASET UNSTRUCTURED_GRID\n";
  out.precision(17);
  out << "POINTS " << mesh.num_vertices() << " double\n";
  for (Index v = 0; v < mesh.num_vertices(); ++v) {
    for (int i = 0; i < 3; ++i)
      out << (i < d ? mesh.vertices()(i, v) : 0.0) << (i < 2 ? ' ' : '\n');
  }
  out << "CELLS " << mesh.num_cells() << ' '
      << static_cast<std::int64_t>(mesh.num_cells()) * (d + 2) << '\n';
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    out << d + 1;
    for (int k = 0; k <= d; ++k)
      out << ' ' << mesh.cells()(k, c);
    out << '\n';
  }
  out << "CELL_TYPES " << mesh.num_cells() << '\n';
  for (Index c = 0; c < mesh.num_cells(); ++c)
    out << cell_type << '\n';
  if (field != nullptr) {
    if (field->values.size() != mesh.num_vertices())
      throw ArgumentError("VTK field does not match the mesh");
    out << "POINT_DATA " << mesh.num_vertices() << "\nSCALARS u double 1\n"
        << "LOOKUP_TABLE default\n";
    for (Index v = 0; v < mesh.num_vertices(); ++v)
      out << field->values[v] << '\n';
  }
  if (!out)
    throw IoError("failed to write VTK output");
}

} // namespace gpe
