#pragma once

#include <Eigen/SparseLU>
#include <memory>
#include <vector>

#include "twlab/detwave.hpp"
#include "twlab/stochwave.hpp"

namespace twlab {

/// Crank-Nicolson propagator for v_t = A v with a fixed step.
///
/// Immutable after construction; apply() and step() may be called from
/// several threads at once.
class Propagator {
 public:
  Propagator(const SparseMatrix& op, const Grid& grid, int n, double dt = 1e-2);

  /// Generator L_tw about a deterministic wave.
  static Propagator linearization(const Model& model, const WaveSolution& wave, double dt = 1e-2);

  /// Propagator of the weighted adjoint W^-1 A^T W; its steps are the exact
  /// W-adjoints of this propagator's steps.
  Propagator adjoint() const;

  /// One step of size dt, in place.
  void step(Vector& v) const;
  /// S(t) v: floor(t/dt) full steps plus one shorter step for any remainder.
  Field apply(const Field& v, double t) const;

  double dt() const { return dt_; }
  const SparseMatrix& op() const { return op_; }
  const Grid& grid() const { return grid_; }
  int components() const { return n_; }

 private:
  SparseMatrix op_;
  Grid grid_;
  int n_;
  double dt_;
  SparseMatrix forward_;  // I + dt/2 A
  std::shared_ptr<Eigen::SparseLU<SparseMatrix>> backward_;  // I - dt/2 A
};

Field apply_S(const Propagator& prop, const Field& v, double t);

/// P v = <v, psi> Phi0',  Q v = v - P v,  P_xi v = -<v, psi'> Phi0'.
Field project_P(const Field& v, const Field& psi, const WaveSolution& wave);
Field project_Q(const Field& v, const Field& psi, const WaveSolution& wave);
Field project_Pxi(const Field& v, const Field& psi, const WaveSolution& wave);

struct DriftQuadrature {
  double dt = 1e-2;          // Crank-Nicolson step
  double sample_dt = 5e-2;   // spacing of integrand samples
  double tol = 1e-6;         // stop once |integrand| < tol * max over a window
  double window = 10.0;      // length of that window
  double fd_scale = 1e-4;    // finite-difference step factor for D^2 a
  double s_max = 0.0;        // 0: 12 / gap_beta
};

struct DriftIntegral {
  double value = 0.0;
  double truncation_time = 0.0;
  double error_estimate = 0.0;
  int samples = 0;
};

/// c^od_{sigma;2} = 1/2 int_0^inf D_1^2 a_sigma(Phi_sigma, c_sigma, psi)[w(s), w(s)] ds,
/// w(s) = S(s)(g(Phi_sigma) + b Phi_sigma').
DriftIntegral orbital_drift_general(const Model& model, const WaveSolution& wave, const StochasticWave& swave,
                                    const Field& psi, double gap_beta, const Cutoffs& cutoffs,
                                    const DriftQuadrature& quad = {});

/// c^od_{0;2} = -1/2 int_0^inf <D^2 f(Phi0)[I(s)], psi> ds where I(s) is the first
/// component of S(s)(g(Phi0) + b~ Phi0'). The noise must act on the first
/// component only.
DriftIntegral orbital_drift_leading(const Model& model, const WaveSolution& wave, const Field& psi, double gap_beta,
                                    const Cutoffs& cutoffs, const DriftQuadrature& quad = {});

/// I(s) at the sample times, built either from one evolution of the full
/// initial field or from separate evolutions of g(Phi0) and Phi0'.
std::vector<Field> leading_drift_profiles(const Model& model, const WaveSolution& wave, const Field& psi,
                                          const Cutoffs& cutoffs, const std::vector<double>& times, bool split,
                                          double dt = 1e-2);

/// c_sigma + sigma^2 c_od_2.
double limiting_speed(const StochasticWave& swave, double c_od_2);

struct DriftCoefficients {
  double c_od_2 = 0.0;
  double c_od_leading = 0.0;
  double c_lim_2 = 0.0;
  double truncation_time = 0.0;
  double quadrature_error_estimate = 0.0;
};

DriftCoefficients drift_coefficients(const Model& model, const WaveSolution& wave, const StochasticWave& swave,
                                     const Field& psi, double gap_beta, const Cutoffs& cutoffs,
                                     const DriftQuadrature& quad = {});

struct DecayOptions {
  double dt = 1e-2;
  int power_iterations = 20;
  int probes = 3;
  unsigned long long seed = 1;
};

struct DecayReport {
  std::vector<double> t;
  std::vector<double> norm_SQ;
  std::vector<double> norm_Lambda;
  double fitted_M = 0.0;
  double fitted_beta = 0.0;   // from log-linear regression on t in [1, t_max]
  double spectral_rate = 0.0; // -max Re of the non-zero spectrum, if supplied
  double lambda_sup_short = 0.0;
  double lambda_decay_rate = 0.0;
};

/// ||S(t) Q|| (L2 -> L2) by power iteration with the adjoint propagator.
double norm_SQ(const Propagator& prop, const Propagator& adj, const Field& psi, const Field& slope, double t,
               int iterations, unsigned long long seed);

/// ||Lambda(t) v||_{H1} / ||v|| with Lambda(t) v = S(t) Q d_xi v - d_xi S(t) Q v.
double commutator_ratio(const Propagator& prop, const Field& psi, const Field& slope, const Field& v, double t);

/// Gaussian probes used by decay_diagnostics.
std::vector<Field> smooth_probes(const Grid& grid, int n, int count);

DecayReport decay_diagnostics(const Model& model, const WaveSolution& wave, const Field& psi,
                              const std::vector<double>& t_grid, double spectral_rate = 0.0,
                              const DecayOptions& opts = {});

}  // namespace twlab
