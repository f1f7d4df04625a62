#include "twlab/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "twlab/error.hpp"
#include "twlab/linalg.hpp"

namespace twlab {

namespace {

std::shared_ptr<Eigen::SparseLU<SparseMatrix>> factor(const SparseMatrix& m, const char* what) {
  auto lu = std::make_shared<Eigen::SparseLU<SparseMatrix>>();
  lu->compute(m);
  if (lu->info() != Eigen::Success) throw NumericalError(std::string(what) + ": factorisation failed");
  return lu;
}

}  // namespace

Propagator::Propagator(const SparseMatrix& op, const Grid& grid, int n, double dt)
    : op_(op), grid_(grid), n_(n), dt_(dt) {
  if (!(dt > 0.0)) throw ValidationError("propagator: dt must be positive");
  if (op.rows() != static_cast<Eigen::Index>(n) * grid.points() || op.cols() != op.rows())
    throw ValidationError("propagator: operator size does not match grid");
  const SparseMatrix I = sparse_identity(op.rows());
  forward_ = I + (0.5 * dt) * op_;
  backward_ = factor(I - (0.5 * dt) * op_, "propagator");
}

Propagator Propagator::linearization(const Model& model, const WaveSolution& wave, double dt) {
  return Propagator(assemble_linearization(model, wave.profile, wave.speed), wave.profile.grid, model.n, dt);
}

Propagator Propagator::adjoint() const { return Propagator(weighted_adjoint(op_, grid_, n_), grid_, n_, dt_); }

void Propagator::step(Vector& v) const {
  const Vector rhs = forward_ * v;
  v = backward_->solve(rhs);
}

Field Propagator::apply(const Field& v, double t) const {
  if (!(t >= 0.0)) throw ValidationError("apply_S: t must be non-negative");
  if (!(v.grid == grid_) || v.n != n_) throw ValidationError("apply_S: field does not match propagator");
  Field out = v;
  if (t == 0.0) return out;
  const long full = static_cast<long>(std::floor(t / dt_ + 1e-9));
  for (long s = 0; s < full; ++s) step(out.values);
  const double rem = t - full * dt_;
  if (rem > 1e-9 * dt_) {
    const SparseMatrix I = sparse_identity(op_.rows());
    auto lu = factor(I - (0.5 * rem) * op_, "apply_S");
    const Vector rhs = out.values + (0.5 * rem) * (op_ * out.values);
    out.values = lu->solve(rhs);
  }
  return out;
}

Field apply_S(const Propagator& prop, const Field& v, double t) { return prop.apply(v, t); }

Field project_P(const Field& v, const Field& psi, const WaveSolution& wave) {
  return inner(v, psi) * diff1(wave.profile);
}

Field project_Q(const Field& v, const Field& psi, const WaveSolution& wave) {
  return v - project_P(v, psi, wave);
}

Field project_Pxi(const Field& v, const Field& psi, const WaveSolution& wave) {
  return (-inner(v, diff1(psi))) * diff1(wave.profile);
}

namespace {

// Trapezoid quadrature of a decaying integrand sampled every ds by `next`.
DriftIntegral integrate_decaying(const std::function<double()>& next, double ds, const DriftQuadrature& quad,
                                 double gap_beta, const char* what) {
  const double s_max = quad.s_max > 0.0 ? quad.s_max : 12.0 / gap_beta;
  if (!(s_max > 0.0) || !std::isfinite(s_max))
    throw ValidationError(std::string(what) + ": gap_beta must be positive to bound the quadrature");
  std::vector<double> vals;
  double max_abs = 0.0;
  double below_since = -1.0;
  double s = 0.0;
  for (int k = 0;; ++k) {
    s = k * ds;
    const double v = next();
    if (!std::isfinite(v)) throw NumericalError(std::string(what) + ": integrand is not finite");
    vals.push_back(v);
    max_abs = std::max(max_abs, std::abs(v));
    if (std::abs(v) <= quad.tol * max_abs) {
      if (below_since < 0.0) below_since = s;
      if (s - below_since >= quad.window) break;
    } else {
      below_since = -1.0;
    }
    if (s >= s_max) {
      if (std::abs(v) > 1e-3 * max_abs) {
        std::ostringstream os;
        os << what << ": integrand has not decayed by s_max=" << s_max << " (gap_beta=" << gap_beta
           << "); |integrand|/max = " << std::abs(v) / max_abs;
        throw NumericalError(os.str());
      }
      break;
    }
  }

  DriftIntegral out;
  out.samples = static_cast<int>(vals.size());
  out.truncation_time = s;
  const std::size_t m = vals.size();
  double fine = 0.0;
  for (std::size_t k = 1; k < m; ++k) fine += 0.5 * ds * (vals[k - 1] + vals[k]);
  out.value = fine;

  // Step-doubling estimate over the even-length prefix.
  const std::size_t even = (m - 1) / 2 * 2;
  double f2 = 0.0, c2 = 0.0;
  for (std::size_t k = 1; k <= even; ++k) f2 += 0.5 * ds * (vals[k - 1] + vals[k]);
  for (std::size_t k = 2; k <= even; k += 2) c2 += ds * (vals[k - 2] + vals[k]);
  double err = std::abs(f2 - c2) / 3.0;

  // Exponential tail beyond the truncation time.
  double rate = 2.0 * gap_beta;
  const std::size_t start = m - std::max<std::size_t>(2, m / 5);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (std::size_t k = start; k < m; ++k) {
    if (vals[k] == 0.0) continue;
    const double x = k * ds, y = std::log(std::abs(vals[k]));
    sx += x; sy += y; sxx += x * x; sxy += x * y;
    ++cnt;
  }
  if (cnt >= 2) {
    const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    if (std::isfinite(slope) && slope < 0.0) rate = -slope;
  }
  if (rate > 0.0) err += std::abs(vals.back()) / rate;
  out.error_estimate = err;
  return out;
}

void require_first_component_noise(const Model& model, const Field& phi0, const char* what) {
  const Field g = apply_noise(model, phi0);
  for (int i = 1; i < model.n; ++i)
    if (g.comp(i).cwiseAbs().maxCoeff() != 0.0)
      throw ValidationError(std::string(what) + ": noise must act on the first component only");
}

}  // namespace

DriftIntegral orbital_drift_general(const Model& model, const WaveSolution& wave, const StochasticWave& swave,
                                    const Field& psi, double gap_beta, const Cutoffs& cutoffs,
                                    const DriftQuadrature& quad) {
  const Propagator prop = Propagator::linearization(model, wave, quad.dt);
  const Field& phi = swave.profile;
  const double sigma = swave.sigma;
  const double c = swave.speed;
  const Field psi_xx = diff2(psi);
  const double b = eval_b(phi, psi, model, cutoffs);
  Field w = apply_noise(model, phi) + b * diff1(phi);
  const double a0 = eval_a(phi, c, psi, psi_xx, sigma, model, cutoffs);
  const double h = quad.fd_scale * l2_norm(phi);
  const int stride = std::max(1, static_cast<int>(std::lround(quad.sample_dt / quad.dt)));

  // D^2 a[w, w] = |w|^2 D^2 a[e, e] with e = w/|w|; the difference step is taken
  // along e so that it does not shrink with w.
  auto second_derivative = [&](const Field& dir) {
    const double nw = l2_norm(dir);
    if (nw == 0.0) return 0.0;
    const Field e = (1.0 / nw) * dir;
    auto d2 = [&](double step) {
      const double ap = eval_a(phi + step * e, c, psi, psi_xx, sigma, model, cutoffs);
      const double am = eval_a(phi - step * e, c, psi, psi_xx, sigma, model, cutoffs);
      return (ap - 2.0 * a0 + am) / (step * step);
    };
    const double coarse = d2(h), fine = d2(0.5 * h);
    return nw * nw * (4.0 * fine - coarse) / 3.0;
  };

  bool first = true;
  auto next = [&]() {
    if (!first)
      for (int k = 0; k < stride; ++k) prop.step(w.values);
    first = false;
    return 0.5 * second_derivative(w);
  };
  return integrate_decaying(next, stride * quad.dt, quad, gap_beta, "orbital_drift_general");
}

std::vector<Field> leading_drift_profiles(const Model& model, const WaveSolution& wave, const Field& psi,
                                          const Cutoffs& cutoffs, const std::vector<double>& times, bool split,
                                          double dt) {
  require_first_component_noise(model, wave.profile, "orbital_drift_leading");
  const Propagator prop = Propagator::linearization(model, wave, dt);
  const double bt = eval_btilde(wave.profile, psi, model, cutoffs);
  const Field g = apply_noise(model, wave.profile);
  const Field slope = diff1(wave.profile);
  std::vector<Field> out;
  const Grid& grid = wave.profile.grid;
  double t_prev = 0.0;
  Field whole = g + bt * slope;
  Field part_g = g, part_s = slope;
  for (double t : times) {
    if (t < t_prev) throw ValidationError("leading_drift_profiles: times must be increasing");
    if (split) {
      part_g = prop.apply(part_g, t - t_prev);
      part_s = prop.apply(part_s, t - t_prev);
    } else {
      whole = prop.apply(whole, t - t_prev);
    }
    t_prev = t;
    Field I(grid, 1);
    I.comp(0) = split ? Vector(part_g.comp(0) + bt * part_s.comp(0)) : Vector(whole.comp(0));
    out.push_back(std::move(I));
  }
  return out;
}

DriftIntegral orbital_drift_leading(const Model& model, const WaveSolution& wave, const Field& psi, double gap_beta,
                                    const Cutoffs& cutoffs, const DriftQuadrature& quad) {
  const Field& phi0 = wave.profile;
  require_first_component_noise(model, phi0, "orbital_drift_leading");
  const Propagator prop = Propagator::linearization(model, wave, quad.dt);
  const double bt = eval_btilde(phi0, psi, model, cutoffs);
  Field w = apply_noise(model, phi0) + bt * diff1(phi0);
  const int stride = std::max(1, static_cast<int>(std::lround(quad.sample_dt / quad.dt)));

  auto integrand = [&]() {
    Field v(phi0.grid, model.n);
    v.comp(0) = w.comp(0);
    return -0.5 * inner(apply_reaction_hess_dir(model, phi0, v), psi);
  };
  bool first = true;
  auto next = [&]() {
    if (!first)
      for (int k = 0; k < stride; ++k) prop.step(w.values);
    first = false;
    return integrand();
  };
  return integrate_decaying(next, stride * quad.dt, quad, gap_beta, "orbital_drift_leading");
}

double limiting_speed(const StochasticWave& swave, double c_od_2) {
  return swave.speed + swave.sigma * swave.sigma * c_od_2;
}

DriftCoefficients drift_coefficients(const Model& model, const WaveSolution& wave, const StochasticWave& swave,
                                     const Field& psi, double gap_beta, const Cutoffs& cutoffs,
                                     const DriftQuadrature& quad) {
  DriftCoefficients out;
  const DriftIntegral general = orbital_drift_general(model, wave, swave, psi, gap_beta, cutoffs, quad);
  const DriftIntegral leading = orbital_drift_leading(model, wave, psi, gap_beta, cutoffs, quad);
  out.c_od_2 = general.value;
  out.c_od_leading = leading.value;
  out.c_lim_2 = limiting_speed(swave, general.value);
  out.truncation_time = general.truncation_time;
  out.quadrature_error_estimate = general.error_estimate;
  return out;
}

double norm_SQ(const Propagator& prop, const Propagator& adj, const Field& psi, const Field& slope, double t,
               int iterations, unsigned long long seed) {
  const Grid& grid = prop.grid();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Field x(grid, prop.components());
  for (Eigen::Index k = 0; k < x.values.size(); ++k) x.values[k] = normal(rng);
  auto Q = [&](const Field& v) { return v - inner(v, psi) * slope; };
  auto Qstar = [&](const Field& v) { return v - inner(v, slope) * psi; };
  x *= 1.0 / l2_norm(x);
  double est = 0.0;
  for (int it = 0; it < iterations; ++it) {
    const Field y = prop.apply(Q(x), t);
    est = l2_norm(y);
    if (est == 0.0) return 0.0;
    Field z = Qstar(adj.apply(y, t));
    const double nz = l2_norm(z);
    if (nz == 0.0) return est;
    x = (1.0 / nz) * z;
  }
  return l2_norm(prop.apply(Q(x), t));
}

double commutator_ratio(const Propagator& prop, const Field& psi, const Field& slope, const Field& v, double t) {
  auto Q = [&](const Field& f) { return f - inner(f, psi) * slope; };
  const Field a = prop.apply(Q(diff1(v)), t);
  const Field b = diff1(prop.apply(Q(v), t));
  return std::sqrt(h1_norm_sq(a - b)) / l2_norm(v);
}

std::vector<Field> smooth_probes(const Grid& grid, int n, int count) {
  std::vector<Field> out;
  const double L = grid.half_length();
  for (int p = 0; p < count; ++p) {
    const double center = -0.5 * L + (count > 1 ? L * p / (count - 1) : 0.5 * L);
    const double width = 2.0 + p;
    out.push_back(sample(grid, n, [&](int i, double x) {
      const double z = (x - center) / width;
      return std::exp(-z * z) * (i == 0 ? 1.0 : 0.5);
    }));
  }
  return out;
}

DecayReport decay_diagnostics(const Model& model, const WaveSolution& wave, const Field& psi,
                              const std::vector<double>& t_grid, double spectral_rate, const DecayOptions& opts) {
  const Propagator prop = Propagator::linearization(model, wave, opts.dt);
  const Propagator adj = prop.adjoint();
  const Field slope = diff1(wave.profile);
  const std::vector<Field> probes = smooth_probes(wave.profile.grid, model.n, opts.probes);

  DecayReport rep;
  rep.spectral_rate = spectral_rate;
  for (double t : t_grid) {
    rep.t.push_back(t);
    rep.norm_SQ.push_back(norm_SQ(prop, adj, psi, slope, t, opts.power_iterations, opts.seed));
    double lam = 0.0;
    for (const Field& v : probes) lam = std::max(lam, commutator_ratio(prop, psi, slope, v, t));
    rep.norm_Lambda.push_back(lam);
  }

  auto fit = [&](const std::vector<double>& ys, double& intercept) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (std::size_t k = 0; k < rep.t.size(); ++k) {
      if (rep.t[k] < 1.0 || !(ys[k] > 0.0)) continue;
      const double x = rep.t[k], y = std::log(ys[k]);
      sx += x; sy += y; sxx += x * x; sxy += x * y;
      ++cnt;
    }
    if (cnt < 2) {
      intercept = 0.0;
      return 0.0;
    }
    const double slope_fit = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    intercept = (sy - slope_fit * sx) / cnt;
    return slope_fit;
  };
  double logM = 0.0, dummy = 0.0;
  rep.fitted_beta = -fit(rep.norm_SQ, logM);
  rep.fitted_M = std::exp(logM);
  rep.lambda_decay_rate = -fit(rep.norm_Lambda, dummy);
  for (std::size_t k = 0; k < rep.t.size(); ++k)
    if (rep.t[k] > 0.0 && rep.t[k] <= 1.0) rep.lambda_sup_short = std::max(rep.lambda_sup_short, rep.norm_Lambda[k]);
  return rep;
}

}  // namespace twlab
