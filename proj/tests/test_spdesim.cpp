#include <algorithm>
#include <cmath>
#include <map>

#include "doctest.h"
#include "helpers.hpp"
#include "twlab/error.hpp"
#include "twlab/semigroup.hpp"
#include "twlab/spdesim.hpp"

using namespace twlab;

namespace {

struct Setup {
  StochasticWave swave;
  double beta;
};

const Setup& fhn_swave(double sigma) {
  static std::map<double, Setup> cache;
  auto it = cache.find(sigma);
  if (it != cache.end()) return it->second;
  const auto& s = testing::fhn_coarse();
  const Cutoffs cut;
  const double beta = spectrum(s.model, s.wave).gap_beta;
  return cache.emplace(sigma, Setup{solve_stochastic_wave(s.model, s.wave, s.adj, sigma, cut), beta}).first->second;
}

Simulator make_sim(double sigma, double dt, double t_end, int stride = 10) {
  const auto& s = testing::fhn_coarse();
  const Setup& st = fhn_swave(sigma);
  return Simulator(make_sim_config(s.model, st.swave, s.wave.speed, s.adj.psi, st.beta, dt, t_end, 0.01, stride));
}

// Scalar model with f(u) = -lambda u, g(u) = u, or f = g = 0 when lambda < 0.
Model linear_model(double lambda, bool noise) {
  Model m;
  m.name = "linear";
  m.n = 1;
  m.rho = {1.0};
  m.u_minus = {0.0};
  m.u_plus = {0.0};
  m.reaction = [=](std::span<const double> u, std::span<double> out) { out[0] = -lambda * u[0]; };
  m.reaction_jac = [=](std::span<const double>, std::span<double> J) { J[0] = -lambda; };
  m.reaction_hess_dir = [](std::span<const double>, std::span<const double>, std::span<double> out) { out[0] = 0; };
  m.noise = [=](std::span<const double> u, std::span<double> out) { out[0] = noise ? u[0] : 0.0; };
  m.noise_jac = [=](std::span<const double>, std::span<double> J) { J[0] = noise ? 1.0 : 0.0; };
  return m;
}

}  // namespace

TEST_CASE("init_gamma0 recovers shifts and ignores orthogonal perturbations") {
  const auto& s = testing::fhn_coarse();
  const StochasticWave& sw = fhn_swave(0.05).swave;
  CHECK(init_gamma0(sw.profile, sw, s.adj.psi) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(init_gamma0(shift(sw.profile, 0.7), sw, s.adj.psi) == doctest::Approx(0.7).epsilon(1e-6));
  CHECK(init_gamma0(shift(sw.profile, -2.3), sw, s.adj.psi) == doctest::Approx(-2.3).epsilon(1e-6));
  Field p = testing::bump(s.grid, 2, 4.0, 1.5);
  p -= (inner(p, s.adj.psi) / inner(s.adj.psi, s.adj.psi)) * s.adj.psi;
  p *= 1e-3 / l2_norm(p);
  CHECK(std::abs(init_gamma0(sw.profile + p, sw, s.adj.psi)) < 1e-8);
}

TEST_CASE("deviation of a shifted wave vanishes and is shift covariant") {
  const StochasticWave& sw = fhn_swave(0.05).swave;
  PathState st{shift(sw.profile, 1.1)};
  st.gamma = 1.1;
  CHECK(deviation(st, sw).values.cwiseAbs().maxCoeff() < 1e-5);
  PathState a{shift(sw.profile + 0.01 * testing::bump(sw.profile.grid, 2, 0.0, 2.0), 0.4)};
  a.gamma = 0.3;
  PathState b{shift(a.u, 0.5)};
  b.gamma = 0.8;
  CHECK(l2_norm(deviation(b, sw)) == doctest::Approx(l2_norm(deviation(a, sw))).epsilon(1e-4));
}

TEST_CASE("N_eps filter") {
  const double q = 2.0, eps = 0.1, dt = 1e-2;
  double I = 0.0;
  for (int k = 1; k <= 2000; ++k) {
    I = neps_update(I, q, dt, eps);
    const double t = k * dt;
    const double exact = q * (1 - std::exp(-eps * t)) / eps;
    CHECK(std::abs(I - exact) <= 2 * dt * exact);
  }
  CHECK(neps_update(0.0, 0.0, dt, eps) == 0.0);
  // eps -> 0 gives the plain integral
  double J = 0.0;
  for (int k = 0; k < 500; ++k) J = neps_update(J, q, dt, 1e-12);
  CHECK(J == doctest::Approx(500 * dt * q).epsilon(1e-9));
}

TEST_CASE("implicit heat step conserves mass") {
  const Model heat = linear_model(0.0, false);
  const Grid g(10.0, 201);
  const auto solvers = diffusion_solvers(heat, g, 0.05);
  Field u = testing::bump(g, 1, 3.0, 1.0);
  const Field one = sample(g, 1, [](int, double) { return 1.0; });
  const double m0 = inner(u, one);
  const double peak0 = u.values.maxCoeff();
  for (int k = 0; k < 200; ++k) advance_field(u, heat, solvers, 0.0, 0.05, 0.0);
  CHECK(std::abs(inner(u, one) - m0) < 1e-8 * 10.0);
  CHECK(u.values.maxCoeff() < 0.5 * peak0);
}

TEST_CASE("strong order on the linear scalar SDE") {
  // u' = -lambda u dt + sigma u dW with a spatially constant datum: the
  // diffusion step is inert and the exact solution is geometric.
  const double lambda = 0.5, sigma = 0.8, T = 1.0;
  const Model m = linear_model(lambda, true);
  const Grid g(1.0, 16);
  const int levels = 5, finest = 1 << 10, paths = 200;
  std::vector<double> err(levels, 0.0);
  for (int p = 0; p < paths; ++p) {
    const auto dW = brownian_increments(1000 + p, T / finest, finest);
    double W = 0.0;
    for (double x : dW) W += x;
    const double exact = std::exp((-lambda - 0.5 * sigma * sigma) * T + sigma * W);
    for (int l = 0; l < levels; ++l) {
      const int n = finest >> (l + 2);  // 256, 128, ..., 16 steps
      const int agg = finest / n;
      const double dt = T / n;
      const auto solvers = diffusion_solvers(m, g, dt);
      Field u = sample(g, 1, [](int, double) { return 1.0; });
      for (int k = 0; k < n; ++k) {
        double inc = 0.0;
        for (int j = 0; j < agg; ++j) inc += dW[k * agg + j];
        advance_field(u, m, solvers, sigma, dt, inc);
      }
      err[l] += std::abs(u.at(0, 0) - exact) / paths;
    }
  }
  // err[l] at dt = 2^(l+2) / finest; fit the slope of log err against log dt
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int l = 0; l < levels; ++l) {
    const double x = std::log(std::pow(2.0, l)), y = std::log(err[l]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double order = (levels * sxy - sx * sy) / (levels * sxx - sx * sx);
  CHECK(order >= 0.45);
}

TEST_CASE("deterministic wave is advected consistently") {
  Simulator sim = make_sim(0.0, 1e-3, 50.0, 100);
  const PathRecord r = sim.run_path(1);
  const double c = sim.config().swave.speed;
  for (std::size_t k = 0; k < r.times.size(); ++k) {
    CHECK(std::abs(r.gamma_series[k] - c * r.times[k]) <= 1e-3 * std::max(1.0, r.times[k]));
    CHECK(r.gamma_vr[k] == r.gamma_minus_cst[k]);
  }
  CHECK(r.low_cutoff_hits == 0);
  // N_eps stays at round-off level while the lag of the pulse is negligible
  Simulator short_sim = make_sim(0.0, 1e-3, 5.0, 100);
  CHECK(short_sim.run_path(1).sup_neps <= 1e-6);
}

TEST_CASE("time-stepping part of the pulse lag is first order in dt") {
  // V(T) = lag from the truncated wake (dt independent) + O(dt) scheme error
  std::vector<double> v;
  for (double dt : {8e-3, 4e-3, 2e-3}) v.push_back(make_sim(0.0, dt, 10.0, 100).run_path(1).v_l2_series.back());
  CHECK((v[0] - v[1]) / (v[1] - v[2]) == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("paths are pure functions of the seed") {
  Simulator sim = make_sim(0.05, 1e-2, 5.0);
  const PathRecord a = sim.run_path(42), b = sim.run_path(42);
  CHECK(a.gamma_series == b.gamma_series);
  CHECK(a.neps_series == b.neps_series);
  const auto inc = brownian_increments(42, 1e-2, sim.steps());
  CHECK(sim.run_path(inc).gamma_series == a.gamma_series);
  CHECK(sim.run_path(43).gamma_series != a.gamma_series);
  CHECK(a.times.size() == a.gamma_vr.size());
  CHECK(a.times.size() == a.neps_series.size());
  CHECK(a.sup_neps == *std::max_element(a.neps_series.begin(), a.neps_series.end()));
}

TEST_CASE("phase condition is approximately maintained in the Gamma frame") {
  Simulator sim = make_sim(0.03, 2e-3, 20.0, 50);
  const PathRecord r = sim.run_path(7);
  const double psi_norm = l2_norm(testing::fhn_coarse().adj.psi);
  for (double m : r.phase_mismatch) CHECK(std::abs(m) <= 1e-2 * psi_norm);
  CHECK(std::abs(r.phase_mismatch.front()) < 1e-8);
}

TEST_CASE("dt refinement on fixed Brownian paths") {
  // sup |Gamma| at coarse steps against the finest step on the same paths;
  // coarse increments are sums of the fine ones
  const double T = 4.0;
  const int finest = 4096;
  const std::vector<int> aggs{32, 16, 8, 4};
  std::vector<double> err(aggs.size(), 0.0);
  auto sup_gamma = [&](const std::vector<double>& fine, int agg) {
    std::vector<double> inc(finest / agg, 0.0);
    for (int k = 0; k < finest; ++k) inc[k / agg] += fine[k];
    const PathRecord r = make_sim(0.05, T / (finest / agg), T, 1).run_path(inc);
    double m = 0.0;
    for (double g : r.gamma_series) m = std::max(m, std::abs(g));
    return m;
  };
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const auto fine = brownian_increments(seed, T / finest, finest);
    const double ref = sup_gamma(fine, 1);
    for (std::size_t l = 0; l < aggs.size(); ++l) err[l] += std::abs(sup_gamma(fine, aggs[l]) - ref);
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = aggs.size();
  for (std::size_t l = 0; l < aggs.size(); ++l) {
    const double x = std::log(aggs[l]), y = std::log(err[l]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double order = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  CHECK(err.back() < err.front());
  CHECK(order >= 0.45);
}

TEST_CASE("blow-up and bad settings are reported") {
  Simulator sim = make_sim(0.05, 1e-2, 1.0);
  PathState s = sim.initial_state();
  CHECK_THROWS_AS(sim.step(s, std::nan("")), NumericalError);
  const auto& w = testing::fhn_coarse();
  const Setup& st = fhn_swave(0.05);
  CHECK_THROWS_AS(make_sim_config(w.model, st.swave, w.wave.speed, w.adj.psi, st.beta, 1e-2, 1.0, 1.0, 1),
                  ValidationError);
  CHECK_THROWS_AS(make_sim_config(w.model, st.swave, w.wave.speed, w.adj.psi, st.beta, -1e-2, 1.0, 0.01, 1),
                  ValidationError);
  CHECK_THROWS_AS(sim.run_path(std::vector<double>(3, 0.0)), ValidationError);
}
