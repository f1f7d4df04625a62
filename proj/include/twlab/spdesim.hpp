#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "twlab/linalg.hpp"
#include "twlab/stochwave.hpp"

namespace twlab {

/// Everything a path needs; immutable and shared between workers.
struct SimConfig {
  Model model;
  StochasticWave swave;
  double c0 = 0.0;          // deterministic speed, for the c0 frame
  Field psi;
  Field psi_x;
  Field psi_xx;
  double b_ref = 0.0;       // b(Phi_sigma, psi)
  Cutoffs cutoffs;
  double sigma = 0.0;
  double dt = 1e-3;
  double t_end = 10.0;
  double eps = 0.01;        // decay rate in N_eps
  int record_stride = 100;
  std::vector<double> snapshot_times;
  Field u0;                 // initial condition (defaults to Phi_sigma)
};

/// Builds a SimConfig, precomputing psi derivatives and validating
/// dt > 0, sigma >= 0, 0 < eps < 2 gap_beta.
SimConfig make_sim_config(const Model& model, const StochasticWave& swave, double c0, const Field& psi,
                          double gap_beta, double dt, double t_end, double eps, int record_stride,
                          const Cutoffs& cutoffs = Cutoffs());

/// The window holds U(. + frame_offset * h): it follows the wave by whole
/// cells so that the truncated domain moves with the pulse.
struct PathState {
  Field u;
  long frame_offset = 0;
  double gamma = 0.0;
  double beta = 0.0;           // accumulated Brownian motion
  double neps_integral = 0.0;
  double t = 0.0;
  long low_cutoff_hits = 0;
  long high_cutoff_hits = 0;
};

struct Snapshot {
  double t;
  Field c0_frame;      // U(. + c0 t)
  Field csigma_frame;  // U(. + c_sigma t)
  Field gamma_frame;   // U(. + Gamma(t))
};

struct PathRecord {
  std::vector<double> times;
  std::vector<double> gamma_series;
  std::vector<double> gamma_minus_cst;
  std::vector<double> gamma_vr;
  std::vector<double> neps_series;
  std::vector<double> v_l2_series;
  std::vector<double> phase_mismatch;  // <T_{-Gamma} U - Phi_sigma, psi>
  std::vector<double> peak_position;   // argmax of the first component, lab frame
  std::vector<double> beta_series;
  double sup_neps = 0.0;
  std::uint64_t seed = 0;
  long low_cutoff_hits = 0;
  long high_cutoff_hits = 0;
  std::vector<Snapshot> snapshots;
};

/// gamma0 with <T_{-gamma0} u0 - Phi_sigma, psi> = 0, nearest root to 0 in [-L/2, L/2].
double init_gamma0(const Field& u0, const StochasticWave& swave, const Field& psi);

/// V = T_{-Gamma} U - Phi_sigma.
Field deviation(const PathState& state, const StochasticWave& swave);

/// I_{k+1} = e^{-eps dt} I_k + dt e^{-eps dt / 2} |V|_{H1}^2.
double neps_update(double prev_integral, double v_h1_sq, double dt, double eps);

/// One semi-implicit Euler-Maruyama step of the field alone:
/// (I - dt rho D2) U+ = U + dt f(U) + sigma g(U) dW.
void advance_field(Field& u, const Model& model, const std::vector<Tridiagonal>& solvers, double sigma, double dt,
                   double dW);
std::vector<Tridiagonal> diffusion_solvers(const Model& model, const Grid& grid, double dt);

/// Brownian increments N(0, dt) from a per-path generator.
std::vector<double> brownian_increments(std::uint64_t seed, double dt, long steps);

class Simulator {
 public:
  explicit Simulator(SimConfig cfg);
  const SimConfig& config() const { return cfg_; }

  PathState initial_state() const;
  /// Advances U and Gamma by one step with increment dW. Throws NumericalError
  /// on blow-up.
  void step(PathState& state, double dW) const;

  PathRecord run_path(std::uint64_t seed) const;
  /// Same with caller-supplied increments (one per step).
  PathRecord run_path(std::span<const double> increments) const;

  long steps() const;

 private:
  SimConfig cfg_;
  std::vector<Tridiagonal> solvers_;
};

}  // namespace twlab
