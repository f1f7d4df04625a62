#include "twlab/kinetics.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "twlab/error.hpp"

namespace twlab {

namespace {
bool g_warnings_enabled = true;

void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}
}  // namespace

void warn(const std::string& message) {
  if (g_warnings_enabled) std::clog << "warning: " << message << '\n';
}

void set_warnings_enabled(bool enabled) { g_warnings_enabled = enabled; }

double Model::rho_min() const { return *std::min_element(rho.begin(), rho.end()); }

NoiseKind parse_noise_kind(const std::string& s) {
  if (s == "linear_u") return NoiseKind::linear_u;
  if (s == "cubic_cutoff") return NoiseKind::cubic_cutoff;
  throw ValidationError("noise_kind: unknown value '" + s + "' (expected linear_u or cubic_cutoff)");
}

std::string to_string(NoiseKind kind) {
  return kind == NoiseKind::linear_u ? "linear_u" : "cubic_cutoff";
}

double f_cub(double u, double a) { return u * (1.0 - u) * (u - a); }
double f_cub_prime(double u, double a) { return -3.0 * u * u + 2.0 * (1.0 + a) * u - a; }
double f_cub_second(double u, double a) { return -6.0 * u + 2.0 * (1.0 + a); }

double smoothstep5(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  return s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

double smoothstep5_prime(double s) {
  if (s <= 0.0 || s >= 1.0) return 0.0;
  const double t = s * (1.0 - s);
  return 30.0 * t * t;
}

namespace {

// Bump equal to 1 on |u| <= 2 and 0 on |u| >= 3.
double noise_bump(double u) { return 1.0 - smoothstep5(std::abs(u) - 2.0); }
double noise_bump_prime(double u) {
  const double sgn = u < 0.0 ? -1.0 : 1.0;
  return -sgn * smoothstep5_prime(std::abs(u) - 2.0);
}

}  // namespace

Model fhn_model(double a, double eps, double gamma, double rho2, NoiseKind noise_kind) {
  require(a > 0.0 && a < 1.0, "fhn: parameter 'a' must lie in (0,1)");
  require(eps > 0.0, "fhn: parameter 'eps' must be positive");
  require(gamma > 0.0, "fhn: parameter 'gamma' must be positive");
  require(rho2 > 0.0, "fhn: parameter 'rho2' must be positive");

  Model m;
  m.name = "fhn";
  m.n = 2;
  m.rho = {1.0, rho2};
  m.u_minus = {0.0, 0.0};
  m.u_plus = {0.0, 0.0};

  m.reaction = [=](std::span<const double> u, std::span<double> out) {
    out[0] = f_cub(u[0], a) - u[1];
    out[1] = eps * (u[0] - gamma * u[1]);
  };
  m.reaction_jac = [=](std::span<const double> u, std::span<double> J) {
    J[0] = f_cub_prime(u[0], a);
    J[1] = -1.0;
    J[2] = eps;
    J[3] = -eps * gamma;
  };
  m.reaction_hess_dir = [=](std::span<const double> u, std::span<const double> v,
                            std::span<double> out) {
    out[0] = f_cub_second(u[0], a) * v[0] * v[0];
    out[1] = 0.0;
  };
  m.reaction_field = [=](int N, const double* u, double* out) {
    const double* w = u + N;
    for (int k = 0; k < N; ++k) {
      out[k] = f_cub(u[k], a) - w[k];
      out[N + k] = eps * (u[k] - gamma * w[k]);
    }
  };

  if (noise_kind == NoiseKind::linear_u) {
    m.noise = [](std::span<const double> u, std::span<double> out) {
      out[0] = u[0];
      out[1] = 0.0;
    };
    m.noise_jac = [](std::span<const double>, std::span<double> J) {
      J[0] = 1.0;
      J[1] = 0.0;
      J[2] = 0.0;
      J[3] = 0.0;
    };
    m.noise_field = [](int N, const double* u, double* out) {
      for (int k = 0; k < N; ++k) {
        out[k] = u[k];
        out[N + k] = 0.0;
      }
    };
  } else {
    m.noise = [](std::span<const double> u, std::span<double> out) {
      out[0] = noise_bump(u[0]) * u[0] * (1.0 - u[0]);
      out[1] = 0.0;
    };
    m.noise_jac = [](std::span<const double> u, std::span<double> J) {
      const double x = u[0];
      J[0] = noise_bump_prime(x) * x * (1.0 - x) + noise_bump(x) * (1.0 - 2.0 * x);
      J[1] = 0.0;
      J[2] = 0.0;
      J[3] = 0.0;
    };
    m.noise_field = [](int N, const double* u, double* out) {
      for (int k = 0; k < N; ++k) {
        out[k] = noise_bump(u[k]) * u[k] * (1.0 - u[k]);
        out[N + k] = 0.0;
      }
    };
  }
  return m;
}

Model nagumo_model(double a) {
  require(a > 0.0 && a <= 0.5, "nagumo: parameter 'a' must lie in (0,1/2]");
  Model m;
  m.name = "nagumo";
  m.n = 1;
  m.rho = {1.0};
  m.u_minus = {1.0};
  m.u_plus = {0.0};
  m.reaction = [=](std::span<const double> u, std::span<double> out) { out[0] = f_cub(u[0], a); };
  m.reaction_jac = [=](std::span<const double> u, std::span<double> J) {
    J[0] = f_cub_prime(u[0], a);
  };
  m.reaction_hess_dir = [=](std::span<const double> u, std::span<const double> v,
                            std::span<double> out) {
    out[0] = f_cub_second(u[0], a) * v[0] * v[0];
  };
  m.noise = [](std::span<const double> u, std::span<double> out) { out[0] = u[0] * (1.0 - u[0]); };
  m.noise_jac = [](std::span<const double> u, std::span<double> J) { J[0] = 1.0 - 2.0 * u[0]; };
  m.reaction_field = [=](int N, const double* u, double* out) {
    for (int k = 0; k < N; ++k) out[k] = f_cub(u[k], a);
  };
  m.noise_field = [](int N, const double* u, double* out) {
    for (int k = 0; k < N; ++k) out[k] = u[k] * (1.0 - u[k]);
  };
  return m;
}

double nagumo_exact_front(double xi) { return 1.0 / (1.0 + std::exp(xi / std::sqrt(2.0))); }

double nagumo_exact_speed(double a) { return std::sqrt(2.0) * (0.5 - a); }

Cutoffs::Cutoffs(double k_high) : k_high_(k_high) {
  require(k_high >= 1.0, "cutoffs: k_high must be >= 1");
}

double Cutoffs::chi_low(double theta) const {
  if (theta <= 0.25) return 0.25;
  if (theta >= 0.5) return theta;
  const double s = smoothstep5((theta - 0.25) * 4.0);
  return (1.0 - s) * 0.25 + s * theta;
}

double Cutoffs::chi_low_prime(double theta) const {
  if (theta <= 0.25) return 0.0;
  if (theta >= 0.5) return 1.0;
  const double x = (theta - 0.25) * 4.0;
  return 4.0 * smoothstep5_prime(x) * (theta - 0.25) + smoothstep5(x);
}

double Cutoffs::chi_high(double theta) const {
  const double r = std::abs(theta);
  const double sgn = theta < 0.0 ? -1.0 : 1.0;
  if (r <= k_high_) return theta;
  if (r >= k_high_ + 1.0) return sgn * (k_high_ + 1.0);
  const double s = smoothstep5(r - k_high_);
  return sgn * ((1.0 - s) * r + s * (k_high_ + 1.0));
}

double Cutoffs::chi_high_prime(double theta) const {
  const double r = std::abs(theta);
  if (r <= k_high_) return 1.0;
  if (r >= k_high_ + 1.0) return 0.0;
  const double x = r - k_high_;
  return (1.0 - smoothstep5(x)) + smoothstep5_prime(x) * (k_high_ + 1.0 - r);
}

bool Cutoffs::high_active(double theta) const { return std::abs(theta) > k_high_; }

Cutoffs make_cutoffs(double k_high) { return Cutoffs(k_high); }

}  // namespace twlab
