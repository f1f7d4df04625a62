#pragma once

#include <complex>
#include <vector>

#include "twlab/grid.hpp"
#include "twlab/kinetics.hpp"

namespace twlab {

/// Deterministic traveling wave rho Phi'' + c Phi' + f(Phi) = 0.
struct WaveSolution {
  Field profile;
  double speed = 0.0;
  double residual_norm = 0.0;
  int newton_iters = 0;
};

struct NewtonOptions {
  double tol = 1e-10;
  int max_iters = 50;
  double min_step = 1.0 / 1048576.0;  // 2^-20
};

/// Neutral modes of the linearisation about a wave.
///
/// psi spans the kernel of the adjoint and is scaled so that
/// <diff1(Phi0), psi> = 1. translation_mode spans the kernel of the discrete
/// L_tw (it differs from diff1(Phi0) by the O(h^2) stencil error) and is scaled
/// so that <translation_mode, psi> = 1.
struct AdjointEigenfunction {
  Field psi;
  Field translation_mode;
  double normalization_check = 0.0;  // <diff1(Phi0), psi> - 1
  double adjoint_residual = 0.0;     // |L* psi| / |psi|
};

struct SpectralReport {
  std::vector<std::complex<double>> eigenvalues;
  std::complex<double> zero_eig;
  double gap_beta = 0.0;
  bool zero_is_simple = false;
  double essential_bound = 0.0;
  double spectral_radius = 0.0;
  bool dense = true;

  /// Simple zero eigenvalue with a positive gap.
  bool certifies() const { return zero_is_simple && gap_beta > 0.0; }
};

/// rho D2 Phi + c D1 Phi + f(Phi).
Field wave_residual(const Model& model, const Field& profile, double speed);

/// Sparse nN x nN matrix of L_tw v = rho v'' + c v' + Df(Phi) v, component-major.
SparseMatrix assemble_linearization(const Model& model, const Field& profile, double speed);

/// Weighted adjoint of assemble_linearization: <L v, w> = <v, L* w>.
SparseMatrix assemble_adjoint(const Model& model, const Field& profile, double speed);

/// Seed for solve_wave: a tanh front for heteroclinic models, a relaxed pulse
/// (direct simulation in a recentred frame) for homoclinic models.
struct WaveSeed {
  Field profile;
  double speed;
};
WaveSeed seed_wave(const Model& model, const Grid& grid);

/// Damped Newton on (F(Phi, c), <Phi - Phi_init, Phi_init'>) = 0.
WaveSolution solve_wave(const Model& model, const Grid& grid, const Field& init_profile, double init_speed,
                        const NewtonOptions& opts = {});

/// Kernel vectors of L_tw and L_tw^* by inverse iteration.
AdjointEigenfunction adjoint_eigenfunction(const Model& model, const WaveSolution& wave);

/// Eigenvalues of the discretised L_tw. Dense for nN <= dense_limit, shift-invert
/// Arnoldi otherwise.
SpectralReport spectrum(const Model& model, const WaveSolution& wave, int num_eigs = 40, int dense_limit = 4096);

/// max over k of the largest real part of eig(Df(u_pm) - k^2 rho).
double essential_bound(const Model& model, double k_max, int samples = 2000);

}  // namespace twlab
