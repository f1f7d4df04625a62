#include "twlab/linalg.hpp"

#include <dlfcn.h>

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <random>

#include "twlab/error.hpp"

namespace twlab {

Tridiagonal::Tridiagonal(Vector lower, Vector diag, Vector upper)
    : lower_(std::move(lower)), upper_mod_(upper.size()), diag_inv_(diag.size()) {
  const Eigen::Index N = diag.size();
  double denom = diag[0];
  if (denom == 0.0) throw NumericalError("tridiagonal: zero pivot");
  diag_inv_[0] = 1.0 / denom;
  upper_mod_[0] = upper[0] / denom;
  for (Eigen::Index k = 1; k < N; ++k) {
    denom = diag[k] - lower_[k] * upper_mod_[k - 1];
    if (denom == 0.0) throw NumericalError("tridiagonal: zero pivot");
    diag_inv_[k] = 1.0 / denom;
    upper_mod_[k] = k + 1 < N ? upper[k] / denom : 0.0;
  }
  // Pre-scaled sub-diagonal: the forward sweep becomes one fused multiply-add per row.
  for (Eigen::Index k = 1; k < N; ++k) lower_[k] *= diag_inv_[k];
}

void Tridiagonal::solve(double* rhs) const {
  const Eigen::Index N = diag_inv_.size();
  rhs[0] *= diag_inv_[0];
  for (Eigen::Index k = 1; k < N; ++k) rhs[k] = rhs[k] * diag_inv_[k] - lower_[k] * rhs[k - 1];
  for (Eigen::Index k = N - 2; k >= 0; --k) rhs[k] -= upper_mod_[k] * rhs[k + 1];
}

void Tridiagonal::solve_pair(const Tridiagonal& a, double* x, const Tridiagonal& b, double* y) {
  const Eigen::Index N = a.diag_inv_.size();
  if (b.diag_inv_.size() != N) throw ValidationError("tridiagonal: size mismatch in paired solve");
  x[0] *= a.diag_inv_[0];
  y[0] *= b.diag_inv_[0];
  for (Eigen::Index k = 1; k < N; ++k) {
    x[k] = x[k] * a.diag_inv_[k] - a.lower_[k] * x[k - 1];
    y[k] = y[k] * b.diag_inv_[k] - b.lower_[k] * y[k - 1];
  }
  for (Eigen::Index k = N - 2; k >= 0; --k) {
    x[k] -= a.upper_mod_[k] * x[k + 1];
    y[k] -= b.upper_mod_[k] * y[k + 1];
  }
}

Tridiagonal implicit_diffusion(const Grid& grid, double rho_tau) {
  const int N = grid.points();
  const double r = rho_tau / (grid.spacing() * grid.spacing());
  Vector lo = Vector::Constant(N, -r), di = Vector::Constant(N, 1.0 + 2.0 * r), up = Vector::Constant(N, -r);
  up[0] = -2.0 * r;
  lo[N - 1] = -2.0 * r;
  return Tridiagonal(std::move(lo), std::move(di), std::move(up));
}

namespace {

// LAPACKE_dgeev(matrix_layout, jobvl, jobvr, n, a, lda, wr, wi, vl, ldvl, vr, ldvr)
using DgeevFn = int (*)(int, char, char, int, double*, int, double*, double*, double*, int, double*, int);

// OpenBLAS 0.3.x picks its kernels when the library is loaded and some
// auto-detected AVX-512 kernels hang in dgeev on virtualised CPUs. Loading the
// library lazily lets us pin a known-good kernel set first; an explicit
// OPENBLAS_CORETYPE in the environment is left untouched.
DgeevFn load_dgeev() {
  static DgeevFn fn = [] {
#if defined(__x86_64__)
    setenv("OPENBLAS_CORETYPE", "Haswell", 0);
#endif
    for (const char* lib : {"liblapacke.so.3", "liblapacke.so"}) {
      if (void* handle = dlopen(lib, RTLD_NOW | RTLD_LOCAL))
        if (void* sym = dlsym(handle, "LAPACKE_dgeev")) return reinterpret_cast<DgeevFn>(sym);
    }
    return static_cast<DgeevFn>(nullptr);
  }();
  return fn;
}

constexpr int kLapackColMajor = 102;

}  // namespace

std::vector<std::complex<double>> dense_eigenvalues(const Eigen::MatrixXd& a) {
  const int n = static_cast<int>(a.rows());
  std::vector<std::complex<double>> out(n);
  if (DgeevFn dgeev = load_dgeev()) {
    Eigen::MatrixXd work = a;  // overwritten by LAPACK
    std::vector<double> wr(n), wi(n);
    const int info = dgeev(kLapackColMajor, 'N', 'N', n, work.data(), n, wr.data(), wi.data(), nullptr, 1,
                           nullptr, 1);
    if (info != 0) throw NumericalError("dgeev failed with info=" + std::to_string(info));
    for (int i = 0; i < n; ++i) out[i] = {wr[i], wi[i]};
    return out;
  }
  Eigen::EigenSolver<Eigen::MatrixXd> es(a, false);
  if (es.info() != Eigen::Success) throw NumericalError("dense eigensolver did not converge");
  for (int i = 0; i < n; ++i) out[i] = es.eigenvalues()[i];
  return out;
}

std::vector<RitzValue> shift_invert_eigenvalues(const SparseMatrix& a, double shift, int krylov_dim,
                                                unsigned seed) {
  const Eigen::Index n = a.rows();
  const int m = static_cast<int>(std::min<Eigen::Index>(krylov_dim, n));
  SparseMatrix shifted = a - shift * sparse_identity(n);
  Eigen::SparseLU<SparseMatrix> lu;
  lu.compute(shifted);
  if (lu.info() != Eigen::Success) throw NumericalError("shift-invert: factorisation failed");

  Eigen::MatrixXd V(n, m + 1);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m + 1, m);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Vector v0(n);
  for (Eigen::Index i = 0; i < n; ++i) v0[i] = gauss(rng);
  V.col(0) = v0.normalized();
  int built = m;
  for (int j = 0; j < m; ++j) {
    Vector w = lu.solve(V.col(j));
    for (int pass = 0; pass < 2; ++pass) {
      for (int i = 0; i <= j; ++i) {
        const double hij = V.col(i).dot(w);
        H(i, j) += hij;
        w -= hij * V.col(i);
      }
    }
    const double beta = w.norm();
    H(j + 1, j) = beta;
    if (beta < 1e-14) {
      built = j + 1;
      break;
    }
    V.col(j + 1) = w / beta;
  }
  Eigen::MatrixXd Hm = H.topLeftCorner(built, built);
  Eigen::EigenSolver<Eigen::MatrixXd> es(Hm, true);
  const auto mu = es.eigenvalues();
  const auto Y = es.eigenvectors();
  std::vector<RitzValue> out;
  for (int i = 0; i < built; ++i) {
    if (std::abs(mu[i]) < 1e-300) continue;
    const std::complex<double> lambda = shift + 1.0 / mu[i];
    // residual of the inverse problem, mapped back: |h_{m+1,m} y_m| / |mu|^2
    const double res = std::abs(H(built, built - 1) * Y(built - 1, i)) / std::norm(mu[i]);
    out.push_back({lambda, res});
  }
  std::sort(out.begin(), out.end(), [shift](const RitzValue& x, const RitzValue& y) {
    return std::abs(x.value - shift) < std::abs(y.value - shift);
  });
  return out;
}

SparseMatrix weighted_adjoint(const SparseMatrix& a, const Grid& grid, int n) {
  const Eigen::Index N = grid.points();
  Vector w(n * N), winv(n * N);
  for (int i = 0; i < n; ++i) {
    w.segment(i * N, N) = grid.weights();
    winv.segment(i * N, N) = grid.weights().cwiseInverse();
  }
  SparseMatrix at = a.transpose();
  SparseMatrix out = winv.asDiagonal() * at * w.asDiagonal();
  return out;
}

SparseMatrix sparse_identity(Eigen::Index m) {
  SparseMatrix I(m, m);
  I.setIdentity();
  return I;
}

}  // namespace twlab
