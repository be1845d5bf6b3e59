#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace gpe {

using Index = std::int32_t;

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
using Triplet = Eigen::Triplet<double, int>;

/// Vertex coordinates, one column per vertex.
using Coordinates = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic>;
/// Simplex connectivity, one column of (dim + 1) vertex indices per cell.
using Connectivity = Eigen::Matrix<Index, Eigen::Dynamic, Eigen::Dynamic>;

/// Base of every error raised by the library. The category decides the CLI
/// exit code.
class Error : public std::runtime_error {
public:
  enum class Category { config, solver, io, argument };

  Error(Category category, const std::string &what)
      : std::runtime_error(what), category_(category) {}

  Category category() const noexcept { return category_; }

private:
  Category category_;
};

class ConfigError : public Error {
public:
  explicit ConfigError(const std::string &what)
      : Error(Category::config, what) {}
};

class IoError : public Error {
public:
  explicit IoError(const std::string &what) : Error(Category::io, what) {}
};

class ArgumentError : public Error {
public:
  explicit ArgumentError(const std::string &what)
      : Error(Category::argument, what) {}
};

/// Raised when a linear or nonlinear solve fails. Carries the last residual
/// the solver observed.
class SolverError : public Error {
public:
  SolverError(const std::string &what, double residual)
      : Error(Category::solver, what), residual_(residual) {}

  double residual() const noexcept { return residual_; }

private:
  double residual_;
};

} // namespace gpe
