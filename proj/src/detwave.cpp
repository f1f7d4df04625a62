#include "twlab/detwave.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "twlab/error.hpp"
#include "twlab/linalg.hpp"
#include "twlab/operators.hpp"

namespace twlab {

Field wave_residual(const Model& model, const Field& profile, double speed) {
  Field r = diff2(profile);
  for (int i = 0; i < model.n; ++i) r.comp(i) *= model.rho[i];
  r += speed * diff1(profile);
  r += apply_reaction(model, profile);
  return r;
}

SparseMatrix assemble_linearization(const Model& model, const Field& profile, double speed) {
  const Eigen::Index m = static_cast<Eigen::Index>(model.n) * profile.points();
  Triplets t;
  append_diffusion_advection(t, profile.grid, model.rho, speed);
  append_pointwise(t, profile, model.reaction_jac, 1.0);
  SparseMatrix L(m, m);
  L.setFromTriplets(t.begin(), t.end());
  return L;
}

SparseMatrix assemble_adjoint(const Model& model, const Field& profile, double speed) {
  return weighted_adjoint(assemble_linearization(model, profile, speed), profile.grid, model.n);
}

namespace {

bool is_pulse(const Model& model) {
  for (int i = 0; i < model.n; ++i)
    if (model.u_minus[i] != model.u_plus[i]) return false;
  return true;
}

// Relaxes a localized excitation into a pulse by direct simulation; the front
// is held near `front_target` by integer-cell recentring.
WaveSeed relax_pulse(const Model& model, const Grid& grid) {
  const double L = grid.half_length();
  const double h = grid.spacing();
  const double front_target = L / 3.0;
  const double dt = 0.05;
  const double t_relax = 600.0;
  const int steps = static_cast<int>(t_relax / dt);

  Field u(grid, model.n);
  for (int i = 0; i < model.n; ++i) u.comp(i).setConstant(model.u_plus[i]);
  for (int k = 0; k < grid.points(); ++k) {
    const double x = grid.node(k);
    const double bump = 0.25 * (1.0 + std::tanh(x - (front_target - 10.0))) * (1.0 - std::tanh(x - front_target));
    u.at(0, k) += bump;
  }
  std::vector<Tridiagonal> solvers;
  for (int i = 0; i < model.n; ++i) solvers.push_back(implicit_diffusion(grid, model.rho[i] * dt));

  auto front_position = [&](const Field& f) {
    const double level = 0.5 * (f.comp(0).maxCoeff() + model.u_plus[0]);
    for (int k = grid.points() - 2; k >= 0; --k)
      if (f.at(0, k) >= level && f.at(0, k + 1) < level) return grid.node(k);
    return front_target;
  };

  long shifted_cells = 0;
  long shifted_at_half = 0;
  for (int s = 0; s < steps; ++s) {
    Field rhs = u + dt * apply_reaction(model, u);
    for (int i = 0; i < model.n; ++i) solvers[i].solve(rhs.values.data() + static_cast<std::ptrdiff_t>(i) * grid.points());
    u = std::move(rhs);
    if (!u.finite()) throw NumericalError("pulse relaxation blew up");
    const int m = static_cast<int>(std::floor((front_position(u) - front_target) / h));
    if (m > 0) {
      u = shift_cells(u, -m);
      shifted_cells += m;
    }
    if (s == steps / 2) shifted_at_half = shifted_cells;
  }
  const double speed = (shifted_cells - shifted_at_half) * h / (t_relax / 2.0);
  return {std::move(u), speed};
}

}  // namespace

WaveSeed seed_wave(const Model& model, const Grid& grid) {
  if (is_pulse(model)) return relax_pulse(model, grid);
  // tanh front between u_- and u_+, deliberately not the exact Nagumo shape
  Field u(grid, model.n);
  for (int i = 0; i < model.n; ++i)
    for (int k = 0; k < grid.points(); ++k) {
      const double s = 0.5 * (1.0 - std::tanh(grid.node(k) / 2.5));
      u.at(i, k) = model.u_plus[i] + s * (model.u_minus[i] - model.u_plus[i]);
    }
  return {std::move(u), 0.3};
}

WaveSolution solve_wave(const Model& model, const Grid& grid, const Field& init_profile, double init_speed,
                        const NewtonOptions& opts) {
  if (!(init_profile.grid == grid) || init_profile.n != model.n)
    throw ValidationError("solve_wave: initial profile does not match model/grid");
  const Eigen::Index m = static_cast<Eigen::Index>(model.n) * grid.points();
  const Vector W = block_weights(grid, model.n);
  const Field ref_slope = diff1(init_profile);
  const Vector phase_row = W.cwiseProduct(ref_slope.values);

  Field phi = init_profile;
  double c = init_speed;

  auto merit = [&](const Field& p, double speed, Field* res_out, double* phase_out) {
    Field r = wave_residual(model, p, speed);
    const double ph = inner(p - init_profile, ref_slope);
    const double val = inner(r, r) + ph * ph;
    if (res_out) *res_out = std::move(r);
    if (phase_out) *phase_out = ph;
    return val;
  };

  Field r(grid, model.n);
  double phase = 0.0;
  double f2 = merit(phi, c, &r, &phase);
  int it = 0;
  for (; it <= opts.max_iters; ++it) {
    if (!std::isfinite(f2)) throw NumericalError("solve_wave: residual is not finite");
    if (std::sqrt(f2) <= opts.tol) break;
    if (it == opts.max_iters) {
      std::ostringstream os;
      os << "solve_wave: no convergence after " << opts.max_iters << " iterations, residual " << std::sqrt(f2);
      throw NumericalError(os.str());
    }
    Triplets t;
    append_diffusion_advection(t, grid, model.rho, c);
    append_pointwise(t, phi, model.reaction_jac, 1.0);
    append_column(t, diff1(phi).values, m);
    append_row(t, phase_row, m);
    SparseMatrix J(m + 1, m + 1);
    J.setFromTriplets(t.begin(), t.end());
    Eigen::SparseLU<SparseMatrix> lu;
    lu.compute(J);
    if (lu.info() != Eigen::Success)
      throw NumericalError("solve_wave: singular bordered Jacobian; refine the grid or change parameters");
    Vector rhs(m + 1);
    rhs.head(m) = -r.values;
    rhs[m] = -phase;
    const Vector dz = lu.solve(rhs);
    if (!dz.allFinite())
      throw NumericalError("solve_wave: singular bordered Jacobian; refine the grid or change parameters");

    double step = 1.0;
    for (;;) {
      Field trial = phi;
      trial.values += step * dz.head(m);
      const double c_trial = c + step * dz[m];
      Field r_trial(grid, model.n);
      double ph_trial = 0.0;
      const double f2_trial = merit(trial, c_trial, &r_trial, &ph_trial);
      if (std::isfinite(f2_trial) && f2_trial < f2) {
        phi = std::move(trial);
        c = c_trial;
        r = std::move(r_trial);
        phase = ph_trial;
        f2 = f2_trial;
        break;
      }
      step *= 0.5;
      if (step < opts.min_step) {
        std::ostringstream os;
        os << "solve_wave: line search failed, residual " << std::sqrt(f2);
        throw NumericalError(os.str());
      }
    }
  }
  return {std::move(phi), c, std::sqrt(f2), it};
}

namespace {

// Inverse iteration towards the eigenvalue of `a` nearest zero.
Vector kernel_vector(const SparseMatrix& a, Vector start, double tol, double accept, const char* what) {
  Eigen::SparseLU<SparseMatrix> lu;
  lu.compute(a);
  double reg = 0.0;
  if (lu.info() != Eigen::Success) {
    reg = 1e-12 * std::max(1.0, a.cwiseAbs().sum() / a.rows());
    lu.compute(a - reg * sparse_identity(a.rows()));
    if (lu.info() != Eigen::Success) throw NumericalError(std::string(what) + ": factorisation failed");
  }
  Vector x = start.normalized();
  double prev = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 30; ++it) {
    Vector y = lu.solve(x);
    if (!y.allFinite()) throw NumericalError(std::string(what) + ": inverse iteration produced non-finite values");
    x = y.normalized();
    const double res = (a * x).norm();
    if (res <= tol) return x;
    if (res > 0.5 * prev && it > 3) break;  // stagnation
    prev = res;
  }
  // Stagnation means x is the eigenvector of the eigenvalue nearest zero; on a
  // truncated domain that eigenvalue is small but not round-off small.
  const double res = (a * x).norm();
  if (res <= accept) return x;
  std::ostringstream os;
  os << what << ": inverse iteration stagnated at residual " << res;
  throw NumericalError(os.str());
}

}  // namespace

AdjointEigenfunction adjoint_eigenfunction(const Model& model, const WaveSolution& wave) {
  const Grid& grid = wave.profile.grid;
  const SparseMatrix L = assemble_linearization(model, wave.profile, wave.speed);
  const SparseMatrix Ls = weighted_adjoint(L, grid, model.n);
  const Field slope = diff1(wave.profile);
  const double scale = std::max(1.0, L.cwiseAbs().sum() / L.rows());

  Field psi(grid, model.n, kernel_vector(Ls, slope.values, 1e-13 * scale, 1e-6 * scale, "adjoint eigenfunction"));
  const double pairing = inner(slope, psi);
  if (std::abs(pairing) < 1e-8 * l2_norm(slope) * l2_norm(psi))
    throw NumericalError("adjoint eigenfunction: <Phi0', psi> vanishes, cannot normalise");
  psi *= 1.0 / pairing;

  Field mode(grid, model.n, kernel_vector(L, slope.values, 1e-13 * scale, 1e-6 * scale, "translation mode"));
  mode *= 1.0 / inner(mode, psi);

  AdjointEigenfunction out{psi, mode, inner(slope, psi) - 1.0, 0.0};
  out.adjoint_residual = (Ls * psi.values).norm() / psi.values.norm();
  return out;
}

double essential_bound(const Model& model, double k_max, int samples) {
  double best = -std::numeric_limits<double>::infinity();
  const int n = model.n;
  std::vector<double> J(static_cast<std::size_t>(n) * n);
  for (const auto* state : {&model.u_minus, &model.u_plus}) {
    model.reaction_jac(*state, J);
    Eigen::MatrixXd A(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) A(i, j) = J[i * n + j];
    for (int s = 0; s <= samples; ++s) {
      const double k = k_max * s / samples;
      Eigen::MatrixXd B = A;
      for (int i = 0; i < n; ++i) B(i, i) -= k * k * model.rho[i];
      Eigen::EigenSolver<Eigen::MatrixXd> es(B, false);
      best = std::max(best, es.eigenvalues().real().maxCoeff());
    }
  }
  return best;
}

SpectralReport spectrum(const Model& model, const WaveSolution& wave, int num_eigs, int dense_limit) {
  const Grid& grid = wave.profile.grid;
  const SparseMatrix L = assemble_linearization(model, wave.profile, wave.speed);
  SpectralReport rep;
  std::vector<std::complex<double>> eig;
  if (L.rows() <= dense_limit) {
    eig = dense_eigenvalues(Eigen::MatrixXd(L));
    rep.dense = true;
  } else {
    rep.dense = false;
    const double shift = 0.01;
    const auto ritz = shift_invert_eigenvalues(L, shift, std::max(4 * num_eigs, 80));
    for (const auto& r : ritz)
      if (r.residual < 1e-6 * std::max(1.0, std::abs(r.value))) eig.push_back(r.value);
    if (eig.empty()) throw NumericalError("spectrum: no Ritz value converged");
  }
  std::sort(eig.begin(), eig.end(),
            [](auto a, auto b) { return a.real() > b.real() || (a.real() == b.real() && a.imag() > b.imag()); });

  std::size_t zero_idx = 0;
  for (std::size_t i = 1; i < eig.size(); ++i)
    if (std::abs(eig[i]) < std::abs(eig[zero_idx])) zero_idx = i;
  rep.zero_eig = eig[zero_idx];
  int near_zero = 0;
  double max_other = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < eig.size(); ++i) {
    rep.spectral_radius = std::max(rep.spectral_radius, std::abs(eig[i]));
    if (std::abs(eig[i]) <= 1e-6) ++near_zero;
    if (i != zero_idx) max_other = std::max(max_other, eig[i].real());
  }
  rep.zero_is_simple = near_zero == 1;
  rep.gap_beta = -max_other / 2.0;
  rep.essential_bound = essential_bound(model, M_PI / grid.spacing());
  if (static_cast<int>(eig.size()) > num_eigs && num_eigs > 0) eig.resize(num_eigs);
  rep.eigenvalues = std::move(eig);
  return rep;
}

}  // namespace twlab
