#pragma once

#include <complex>
#include <vector>

#include "twlab/grid.hpp"

namespace twlab {

/// Thomas-algorithm solver for a fixed tridiagonal matrix (factor once,
/// solve many times). Rows are given as (lower, diag, upper) with
/// lower[0] and upper[N-1] ignored.
class Tridiagonal {
 public:
  Tridiagonal() = default;
  Tridiagonal(Vector lower, Vector diag, Vector upper);

  /// Solves in place.
  void solve(double* rhs) const;
  /// Two independent solves of equal size, interleaved for throughput.
  static void solve_pair(const Tridiagonal& a, double* x, const Tridiagonal& b, double* y);
  int size() const { return static_cast<int>(diag_inv_.size()); }

 private:
  Vector lower_;  // scaled by the pivot inverse
  Vector upper_mod_;
  Vector diag_inv_;
};

/// (I - tau * rho * D2) with the Neumann closure of diff2.
Tridiagonal implicit_diffusion(const Grid& grid, double rho_tau);

/// All eigenvalues of a dense real matrix (LAPACK dgeev).
std::vector<std::complex<double>> dense_eigenvalues(const Eigen::MatrixXd& a);

struct RitzValue {
  std::complex<double> value;
  double residual;
};

/// Eigenvalues of a sparse matrix closest to a real shift, by Arnoldi on
/// (A - shift I)^{-1} with full reorthogonalisation. Returns Ritz values
/// sorted by distance to the shift together with residual estimates.
std::vector<RitzValue> shift_invert_eigenvalues(const SparseMatrix& a, double shift, int krylov_dim,
                                                unsigned seed = 7);

/// Weighted-adjoint  W^{-1} A^T W  for block fields of n components, W = trapezoid weights.
SparseMatrix weighted_adjoint(const SparseMatrix& a, const Grid& grid, int n);

/// Identity of size m.
SparseMatrix sparse_identity(Eigen::Index m);

}  // namespace twlab
