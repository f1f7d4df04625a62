#pragma once

#include <vector>

#include "twlab/detwave.hpp"
#include "twlab/grid.hpp"
#include "twlab/kinetics.hpp"

namespace twlab {

/// Instantaneous stochastic wave: profile and speed with a_sigma(Phi, c, psi) = 0.
struct StochasticWave {
  Field profile;
  double speed = 0.0;
  double sigma = 0.0;
  double a_residual = 0.0;
  double b = 0.0;  // b(Phi_sigma, psi_tw)
  int continuation_steps = 0;
};

/// Second-order speed correction c_sigma = c0 + sigma^2 c02 + O(sigma^4).
struct SpeedExpansion {
  double c0 = 0.0;
  double c02 = 0.0;           // explicit pairing formula
  double c02_bordered = 0.0;  // bordering variable of the Phi_{0;2} solve
  Field phi02;
  double btilde0 = 0.0;
  double residual = 0.0;  // |L Phi02 + c02 Phi0' - rhs|
};

/// Everything the phase SDE needs from one evaluation.
struct PhaseFunctionals {
  double pairing_slope = 0.0;  // <d_xi u, psi>
  double pairing_noise = 0.0;  // <g(u), psi>
  double b = 0.0;
  double a = 0.0;
  bool low_cutoff_active = false;
  bool high_cutoff_active = false;
};

/// b(u, psi) = -chi_high(<g(u), psi>) / chi_low(<d_xi u, psi>).
double eval_b(const Field& u, const Field& psi, const Model& model, const Cutoffs& cutoffs);

/// kappa_i = 1 + sigma^2 b^2 / (2 rho_i).
std::vector<double> eval_kappa(const Field& u, const Field& psi, double sigma, const Model& model,
                               const Cutoffs& cutoffs);

/// a_sigma(u, c, psi). The second derivative falls on psi; psi_xx is passed in
/// so callers can reuse a shifted precomputed copy.
double eval_a(const Field& u, double c, const Field& psi, const Field& psi_xx, double sigma, const Model& model,
              const Cutoffs& cutoffs);
double eval_a(const Field& u, double c, const Field& psi, double sigma, const Model& model, const Cutoffs& cutoffs);

/// b and a_sigma together, sharing the derivative and noise evaluations.
PhaseFunctionals eval_phase_functionals(const Field& u, double c, const Field& psi, const Field& psi_xx,
                                        double sigma, const Model& model, const Cutoffs& cutoffs);

/// b~(Phi) = -<g(Phi), psi> / chi_low(<d_xi Phi, psi>)  (no saturation on the numerator).
double eval_btilde(const Field& phi, const Field& psi, const Model& model, const Cutoffs& cutoffs);

struct StochasticSolveOptions {
  int continuation_steps = 8;
  int max_halvings = 10;
  NewtonOptions newton{1e-11, 50, 1.0 / 1048576.0};
};

/// Newton on rho kappa Phi'' + c Phi' + f(Phi) + sigma^2 b d_xi[g(Phi)] = 0 with
/// <Phi - Phi0, Phi0'> = 0, continued in sigma from (Phi0, c0).
StochasticWave solve_stochastic_wave(const Model& model, const WaveSolution& wave, const AdjointEigenfunction& adj,
                                     double sigma, const Cutoffs& cutoffs, const StochasticSolveOptions& opts = {});

/// c02 from the explicit formula and Phi02 from the bordered system
/// L Phi02 + c02 Phi0' = -b~^2/2 Phi0'' - b~ d_xi g(Phi0),  <Phi02, psi> = 0.
SpeedExpansion speed_expansion(const Model& model, const WaveSolution& wave, const AdjointEigenfunction& adj,
                               const Cutoffs& cutoffs);

}  // namespace twlab
