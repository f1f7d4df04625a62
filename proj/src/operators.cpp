#include "twlab/operators.hpp"

#include <array>

namespace twlab {

void append_diffusion_advection(Triplets& t, const Grid& grid, std::span<const double> coef, double speed,
                                Eigen::Index offset) {
  const SparseMatrix D1 = diff1_matrix(grid);
  const SparseMatrix D2 = diff2_matrix(grid);
  const Eigen::Index N = grid.points();
  for (std::size_t i = 0; i < coef.size(); ++i) {
    const Eigen::Index base = offset + static_cast<Eigen::Index>(i) * N;
    for (int k = 0; k < D2.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(D2, k); it; ++it)
        t.emplace_back(base + it.row(), base + it.col(), coef[i] * it.value());
    if (speed != 0.0)
      for (int k = 0; k < D1.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(D1, k); it; ++it)
          t.emplace_back(base + it.row(), base + it.col(), speed * it.value());
  }
}

void append_pointwise(Triplets& t, const Field& u, const PointJacobian& jac, double scale,
                      Eigen::Index offset) {
  const int n = u.n;
  const Eigen::Index N = u.points();
  std::array<double, 8> in{};
  std::array<double, 64> J{};
  for (Eigen::Index k = 0; k < N; ++k) {
    for (int i = 0; i < n; ++i) in[i] = u.at(i, static_cast<int>(k));
    jac(std::span<const double>(in.data(), n), std::span<double>(J.data(), n * n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double v = J[i * n + j];
        if (v != 0.0) t.emplace_back(offset + i * N + k, offset + j * N + k, scale * v);
      }
  }
}

void append_diff1_of_pointwise(Triplets& t, const Field& u, const PointJacobian& jac, double scale,
                               Eigen::Index offset) {
  const int n = u.n;
  const Eigen::Index N = u.points();
  const SparseMatrix D1 = diff1_matrix(u.grid);
  std::vector<double> blocks(static_cast<std::size_t>(N) * n * n);
  std::array<double, 8> in{};
  for (Eigen::Index k = 0; k < N; ++k) {
    for (int i = 0; i < n; ++i) in[i] = u.at(i, static_cast<int>(k));
    jac(std::span<const double>(in.data(), n), std::span<double>(blocks.data() + k * n * n, n * n));
  }
  for (int col = 0; col < D1.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(D1, col); it; ++it) {
      const Eigen::Index k = it.row(), l = it.col();
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const double v = blocks[l * n * n + i * n + j];
          if (v != 0.0) t.emplace_back(offset + i * N + k, offset + j * N + l, scale * it.value() * v);
        }
    }
}

void append_column(Triplets& t, const Vector& v, Eigen::Index col, Eigen::Index offset) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (v[i] != 0.0) t.emplace_back(offset + i, col, v[i]);
}

void append_row(Triplets& t, const Vector& v, Eigen::Index row, Eigen::Index offset) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (v[i] != 0.0) t.emplace_back(row, offset + i, v[i]);
}

Vector block_weights(const Grid& grid, int n) {
  const Eigen::Index N = grid.points();
  Vector w(n * N);
  for (int i = 0; i < n; ++i) w.segment(i * N, N) = grid.weights();
  return w;
}

}  // namespace twlab
