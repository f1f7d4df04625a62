#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace twlab {

/// Pointwise map R^n -> R^n.
using PointMap = std::function<void(std::span<const double> u, std::span<double> out)>;
/// Pointwise Jacobian, written row-major into an n*n buffer.
using PointJacobian = std::function<void(std::span<const double> u, std::span<double> jac)>;
/// Second directional derivative D^2 F(u)[v, v].
using PointHessianDir =
    std::function<void(std::span<const double> u, std::span<const double> v, std::span<double> out)>;

/// Optional whole-field version of a PointMap on component-major arrays of
/// n * points values; used on hot paths when present.
using FieldMap = std::function<void(int points, const double* u, double* out)>;

/// Reaction-diffusion model  dU = [rho U_xx + f(U)] dt + sigma g(U) dbeta.
///
/// All callbacks act on a single spatial point; Field-level helpers live in
/// grid.hpp. A Model is immutable after construction.
struct Model {
  std::string name;
  int n = 0;
  std::vector<double> rho;  // diagonal diffusion, all entries > 0

  PointMap reaction;
  PointJacobian reaction_jac;
  PointHessianDir reaction_hess_dir;
  PointMap noise;
  PointJacobian noise_jac;
  FieldMap reaction_field;
  FieldMap noise_field;

  std::vector<double> u_minus;  // limit at xi -> -inf
  std::vector<double> u_plus;   // limit at xi -> +inf

  double rho_min() const;
};

enum class NoiseKind { linear_u, cubic_cutoff };

NoiseKind parse_noise_kind(const std::string& s);
std::string to_string(NoiseKind kind);

/// Cubic bistable nonlinearity u(1-u)(u-a) and its derivatives.
double f_cub(double u, double a);
double f_cub_prime(double u, double a);
double f_cub_second(double u, double a);

/// C^2 quintic smoothstep on [0,1]: 0 below, 1 above.
double smoothstep5(double s);
double smoothstep5_prime(double s);

/// FitzHugh-Nagumo: f = (f_cub(u) - w, eps (u - gamma w)), rho = diag(1, rho2).
/// The pulse connects (0,0) to itself.
Model fhn_model(double a, double eps, double gamma, double rho2, NoiseKind noise_kind);

/// Scalar Nagumo front, u_- = 1, u_+ = 0, g(u) = u(1-u).
Model nagumo_model(double a);

/// Closed-form Nagumo front (1 + exp(xi / sqrt 2))^-1 and its speed.
double nagumo_exact_front(double xi);
double nagumo_exact_speed(double a);

/// Smooth cut-offs used by the phase-tracking functionals.
///
/// chi_low equals 1/4 below 1/4 and the identity above 1/2; chi_high is the
/// identity on [-K, K] and saturates at +-(K+1) beyond |theta| = K+1. Both are
/// non-decreasing and C^2 (quintic blend on the transition intervals).
class Cutoffs {
 public:
  explicit Cutoffs(double k_high = 100.0);

  double k_high() const { return k_high_; }

  double chi_low(double theta) const;
  double chi_low_prime(double theta) const;
  double chi_high(double theta) const;
  double chi_high_prime(double theta) const;

  /// True when theta lies outside the identity region of either cut-off.
  bool low_active(double theta) const { return theta < 0.5; }
  bool high_active(double theta) const;

 private:
  double k_high_;
};

Cutoffs make_cutoffs(double k_high);

}  // namespace twlab
