#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "twlab/stochwave.hpp"

using namespace twlab;

TEST_CASE("b, kappa and a are invariant under a common shift") {
  const auto& s = testing::fhn_coarse();
  const Cutoffs cut;
  const Field u = s.wave.profile + 0.05 * testing::bump(s.grid, 2, -2.0, 3.0);
  const double gamma = 1.3;
  const Field us = shift(u, gamma), ps = shift(s.adj.psi, gamma);
  const double sigma = 0.1, c = s.wave.speed;
  CHECK(eval_b(us, ps, s.model, cut) == doctest::Approx(eval_b(u, s.adj.psi, s.model, cut)).epsilon(1e-4));
  const auto k0 = eval_kappa(u, s.adj.psi, sigma, s.model, cut), k1 = eval_kappa(us, ps, sigma, s.model, cut);
  for (std::size_t i = 0; i < k0.size(); ++i) CHECK(k1[i] == doctest::Approx(k0[i]).epsilon(1e-6));
  const double a0 = eval_a(u, c, s.adj.psi, sigma, s.model, cut);
  CHECK(eval_a(us, c, ps, sigma, s.model, cut) == doctest::Approx(a0).epsilon(1e-3).scale(1e-4));
}

TEST_CASE("functionals at the deterministic wave") {
  const auto& s = testing::fhn_coarse();
  const Cutoffs cut;
  // a_0 vanishes on the wave; b reduces to -<g, psi> since <Phi0', psi> = 1
  CHECK(std::abs(eval_a(s.wave.profile, s.wave.speed, s.adj.psi, 0.0, s.model, cut)) < 1e-9);
  const double b = eval_b(s.wave.profile, s.adj.psi, s.model, cut);
  CHECK(b == doctest::Approx(-inner(apply_noise(s.model, s.wave.profile), s.adj.psi)).epsilon(1e-8));
  CHECK(eval_btilde(s.wave.profile, s.adj.psi, s.model, cut) == doctest::Approx(b));
  const auto kappa = eval_kappa(s.wave.profile, s.adj.psi, 0.2, s.model, cut);
  CHECK(kappa[0] == doctest::Approx(1.0 + 0.04 * b * b / 2.0));
  CHECK(kappa[1] == doctest::Approx(1.0 + 0.04 * b * b / (2.0 * 0.01)));
}

TEST_CASE("fused evaluation agrees with the separate functionals") {
  const auto& s = testing::fhn_coarse();
  const Cutoffs cut;
  const Field u = s.wave.profile + 0.02 * testing::random_field(s.grid, 2, 4);
  const Field psi_xx = diff2(s.adj.psi);
  const PhaseFunctionals pf = eval_phase_functionals(u, 0.45, s.adj.psi, psi_xx, 0.07, s.model, cut);
  CHECK(pf.b == doctest::Approx(eval_b(u, s.adj.psi, s.model, cut)).epsilon(1e-12));
  CHECK(pf.a == doctest::Approx(eval_a(u, 0.45, s.adj.psi, psi_xx, 0.07, s.model, cut)).epsilon(1e-10));
  CHECK_FALSE(pf.low_cutoff_active);
  CHECK_FALSE(pf.high_cutoff_active);
}

TEST_CASE("a depends on sigma only through sigma^2") {
  const auto& s = testing::fhn_coarse();
  const Cutoffs cut;
  const Field u = s.wave.profile + 0.03 * testing::bump(s.grid, 2, 1.0, 2.0);
  CHECK(eval_a(u, 0.47, s.adj.psi, 0.08, s.model, cut) == eval_a(u, 0.47, s.adj.psi, -0.08, s.model, cut));
  const StochasticWave p = solve_stochastic_wave(s.model, s.wave, s.adj, 0.05, cut);
  const StochasticWave m = solve_stochastic_wave(s.model, s.wave, s.adj, -0.05, cut);
  CHECK(p.speed == m.speed);
  CHECK((p.profile.values - m.profile.values).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("stochastic wave solves a_sigma = 0 with the phase condition") {
  const auto& s = testing::fhn_coarse();
  const Cutoffs cut;
  const StochasticWave sw = solve_stochastic_wave(s.model, s.wave, s.adj, 0.1, cut);
  CHECK(sw.a_residual < 1e-9);
  CHECK(std::abs(eval_a(sw.profile, sw.speed, s.adj.psi, 0.1, s.model, cut)) < 1e-8);
  CHECK(std::abs(inner(sw.profile - s.wave.profile, diff1(s.wave.profile))) < 1e-8);
  CHECK(sw.b == doctest::Approx(eval_b(sw.profile, s.adj.psi, s.model, cut)));
  CHECK(sw.speed < s.wave.speed);
  const StochasticWave zero = solve_stochastic_wave(s.model, s.wave, s.adj, 0.0, cut);
  CHECK(zero.speed == doctest::Approx(s.wave.speed).epsilon(1e-12));
}

TEST_CASE("speed correction: explicit formula, bordered solve and small-sigma branch") {
  const auto& s = testing::fhn_coarse();
  const Cutoffs cut;
  const SpeedExpansion ex = speed_expansion(s.model, s.wave, s.adj, cut);
  CHECK(ex.c02 == doctest::Approx(ex.c02_bordered).epsilon(1e-8));
  CHECK(ex.residual < 1e-8);
  CHECK(std::abs(inner(ex.phi02, s.adj.psi)) < 1e-8);
  const double sigma = 0.02;
  const StochasticWave sw = solve_stochastic_wave(s.model, s.wave, s.adj, sigma, cut);
  CHECK((sw.speed - s.wave.speed) / (sigma * sigma) == doctest::Approx(ex.c02).epsilon(0.01));
}

TEST_CASE("Nagumo front has the same expansion structure") {
  const auto& s = testing::nagumo_coarse();
  const Cutoffs cut;
  const SpeedExpansion ex = speed_expansion(s.model, s.wave, s.adj, cut);
  CHECK(ex.c02 == doctest::Approx(ex.c02_bordered).epsilon(1e-8));
  const StochasticWave sw = solve_stochastic_wave(s.model, s.wave, s.adj, 0.02, cut);
  CHECK((sw.speed - s.wave.speed) / 4e-4 == doctest::Approx(ex.c02).epsilon(0.01));
}
