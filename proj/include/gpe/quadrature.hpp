#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace gpe {

/// Quadrature rule on the reference simplex in barycentric form. Weights sum
/// to one, so the integral over a cell T is |T| * sum_q w_q f(x_q).
template <typename Scalar> struct SimplexQuadrature {
  int dim = 0;
  int degree = 0;
  /// (dim + 1) x n_points barycentric coordinates.
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> points;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> weights;

  Eigen::Index size() const { return weights.size(); }
};

namespace detail {

template <typename Scalar> struct OrbitBuilder {
  int dim;
  std::vector<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>> points;
  std::vector<Scalar> weights;

  // Adds every distinct permutation of the barycentric tuple.
  void add(Eigen::Matrix<Scalar, Eigen::Dynamic, 1> bary, Scalar weight) {
    std::sort(bary.data(), bary.data() + bary.size());
    do {
      points.push_back(bary);
      weights.push_back(weight);
    } while (std::next_permutation(bary.data(), bary.data() + bary.size()));
  }

  SimplexQuadrature<Scalar> build(int degree) const {
    SimplexQuadrature<Scalar> rule;
    rule.dim = dim;
    rule.degree = degree;
    const auto n = static_cast<Eigen::Index>(points.size());
    rule.points.resize(dim + 1, n);
    rule.weights.resize(n);
    for (Eigen::Index q = 0; q < n; ++q) {
      rule.points.col(q) = points[static_cast<std::size_t>(q)];
      rule.weights[q] = weights[static_cast<std::size_t>(q)];
    }
    return rule;
  }
};

} // namespace detail

/// Symmetric rules exact for polynomials of degree 4 (the highest degree that
/// appears for P1 data: u^2 v w). 1D: 3-point Gauss (degree 5). 2D: 6-point
/// Dunavant rule. 3D: 14-point rule of degree 5.
template <typename Scalar = double>
SimplexQuadrature<Scalar> degree4_rule(int dim) {
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  detail::OrbitBuilder<Scalar> builder{dim, {}, {}};
  switch (dim) {
  case 1: {
    const Scalar s = Scalar(0.5) * std::sqrt(Scalar(3) / Scalar(5));
    builder.add((Vec(2) << Scalar(0.5), Scalar(0.5)).finished(),
                Scalar(8) / Scalar(18));
    builder.add((Vec(2) << Scalar(0.5) - s, Scalar(0.5) + s).finished(),
                Scalar(5) / Scalar(18));
    return builder.build(5);
  }
  case 2: {
    const Scalar a = Scalar(0.445948490915964886318329253883);
    const Scalar b = Scalar(0.091576213509770743459571463402);
    builder.add((Vec(3) << a, a, 1 - 2 * a).finished(),
                Scalar(0.223381589678011465944827602725));
    builder.add((Vec(3) << b, b, 1 - 2 * b).finished(),
                Scalar(0.109951743655321867388505730608));
    return builder.build(4);
  }
  case 3: {
    const Scalar a = Scalar(0.0927352503108912264023809863268);
    const Scalar b = Scalar(0.310885919263300609797345733763);
    const Scalar c = Scalar(0.0455037041256496494918805262794);
    const Scalar six = Scalar(6);
    builder.add((Vec(4) << a, a, a, 1 - 3 * a).finished(),
                six * Scalar(0.0122488405193936582572850342477));
    builder.add((Vec(4) << b, b, b, 1 - 3 * b).finished(),
                six * Scalar(0.0187813209530026417998642753888));
    builder.add((Vec(4) << c, c, Scalar(0.5) - c, Scalar(0.5) - c).finished(),
                six * Scalar(0.00709100346284691107301157135337));
    return builder.build(5);
  }
  default:
    throw std::invalid_argument("no simplex rule for dimension " +
                                std::to_string(dim));
  }
}

} // namespace gpe
