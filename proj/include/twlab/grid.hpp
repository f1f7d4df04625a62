#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <array>
#include <memory>
#include <string>
#include <vector>

#include "twlab/kinetics.hpp"

namespace twlab {

using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Uniform mesh xi_k = -L + k h on [-L, L], h = 2L/(N-1).
class Grid {
 public:
  Grid(double half_length, int points);

  double half_length() const { return half_length_; }
  int points() const { return points_; }
  double spacing() const { return spacing_; }
  double node(int k) const { return -half_length_ + k * spacing_; }
  Vector nodes() const;
  /// Trapezoid quadrature weights.
  const Vector& weights() const { return *weights_; }

  bool operator==(const Grid& other) const {
    return half_length_ == other.half_length_ && points_ == other.points_;
  }

 private:
  double half_length_;
  int points_;
  double spacing_;
  std::shared_ptr<const Vector> weights_;
};

/// An n-component function sampled on a Grid. Storage is component-major:
/// component i occupies values[i*N, (i+1)*N).
struct Field {
  Grid grid;
  int n;
  Vector values;

  Field(const Grid& g, int components);
  Field(const Grid& g, int components, Vector data);

  int points() const { return grid.points(); }
  auto comp(int i) { return values.segment(static_cast<Eigen::Index>(i) * points(), points()); }
  auto comp(int i) const {
    return values.segment(static_cast<Eigen::Index>(i) * points(), points());
  }
  double at(int i, int k) const { return values[static_cast<Eigen::Index>(i) * points() + k]; }
  double& at(int i, int k) { return values[static_cast<Eigen::Index>(i) * points() + k]; }

  bool finite() const { return values.allFinite(); }

  Field& operator+=(const Field& o);
  Field& operator-=(const Field& o);
  Field& operator*=(double s);
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double s, Field a);
Field operator*(Field a, double s);

/// Field whose every component is a function of xi.
template <class Fn>
Field sample(const Grid& grid, int n, Fn&& fn) {
  Field out(grid, n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < grid.points(); ++k) out.at(i, k) = fn(i, grid.node(k));
  return out;
}

/// Central differences inside, one-sided second order at the two ends.
Field diff1(const Field& u);
/// Three-point Laplacian with homogeneous Neumann ghost-point closure.
Field diff2(const Field& u);

/// Trapezoid approximation of sum_i int u_i v_i dxi.
double inner(const Field& u, const Field& v);
double l2_norm(const Field& u);
double h1_norm_sq(const Field& u);

/// (T_gamma u)(xi) = u(xi - gamma), Catmull-Rom interpolation, constant
/// extension outside [-L, L]. Throws for |gamma| >= L.
Field shift(const Field& u, double gamma);

/// Shift by an integer number of cells (exact), constant extension at the ends.
Field shift_cells(const Field& u, int cells);

/// Pointwise model evaluation.
Field apply_reaction(const Model& m, const Field& u);
Field apply_noise(const Model& m, const Field& u);
/// D^2 f(u)[v, v] pointwise.
Field apply_reaction_hess_dir(const Model& m, const Field& u, const Field& v);

/// Sparse N x N matrices matching diff1 / diff2.
SparseMatrix diff1_matrix(const Grid& grid);
SparseMatrix diff2_matrix(const Grid& grid);

/// CSV with header xi,c1,...,cn and 17 significant digits.
void write_field_csv(const std::string& path, const Field& u,
                     const std::string& fingerprint = {});
Field read_field_csv(const std::string& path);

}  // namespace twlab
