#pragma once

#include <Eigen/SparseCore>
#include <span>
#include <vector>

#include "twlab/grid.hpp"
#include "twlab/kinetics.hpp"

namespace twlab {

using Triplets = std::vector<Eigen::Triplet<double>>;

/// Appends  diag(coef_i) D2 + speed D1  acting on each of n component blocks.
void append_diffusion_advection(Triplets& t, const Grid& grid, std::span<const double> coef, double speed,
                                Eigen::Index offset = 0);

/// Appends the pointwise block operator v -> scale * J(u) v.
void append_pointwise(Triplets& t, const Field& u, const PointJacobian& jac, double scale,
                      Eigen::Index offset = 0);

/// Appends v -> scale * D1 [J(u) v] (diff1 applied after the pointwise map).
void append_diff1_of_pointwise(Triplets& t, const Field& u, const PointJacobian& jac, double scale,
                               Eigen::Index offset = 0);

/// Appends a dense column (row index offset + i) at column `col`.
void append_column(Triplets& t, const Vector& v, Eigen::Index col, Eigen::Index offset = 0);
/// Appends a dense row at row `row`.
void append_row(Triplets& t, const Vector& v, Eigen::Index row, Eigen::Index offset = 0);

/// Quadrature weights repeated for each of n components (so that
/// inner(u, v) == u.values.dot(W v)).
Vector block_weights(const Grid& grid, int n);

}  // namespace twlab
