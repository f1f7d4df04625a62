#include <cmath>
#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "twlab/ensemble.hpp"
#include "twlab/error.hpp"
#include "twlab/semigroup.hpp"

using namespace twlab;

namespace {

Simulator small_sim(double sigma, double t_end) {
  static const testing::SolvedWave s = testing::solve(testing::fhn(), 60.0, 768);
  static const double beta = spectrum(s.model, s.wave).gap_beta;
  const StochasticWave sw = solve_stochastic_wave(s.model, s.wave, s.adj, sigma, Cutoffs());
  return Simulator(make_sim_config(s.model, sw, s.wave.speed, s.adj.psi, beta, 2e-2, t_end, 0.01, 25));
}

}  // namespace

TEST_CASE("derived seeds are distinct and reproducible") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 10000; ++i) seen.insert(derive_seed(2024, i));
  CHECK(seen.size() == 10000);
  CHECK(derive_seed(2024, 3) == derive_seed(2024, 3));
  CHECK(derive_seed(2024, 3) != derive_seed(2025, 3));
}

TEST_CASE("observed drift quadrature") {
  std::vector<double> t, lin, zero;
  for (int k = 0; k <= 200; ++k) {
    t.push_back(0.5 * k);
    lin.push_back(-0.003 * 0.5 * k);
    zero.push_back(0.0);
  }
  CHECK(observed_drift(t, lin, 100.0) == doctest::Approx(-0.003).epsilon(1e-12));
  CHECK(observed_drift(t, lin, 73.3) == doctest::Approx(-0.003).epsilon(1e-12));
  CHECK(observed_drift(t, zero, 100.0) == 0.0);
  CHECK_THROWS_AS(observed_drift({0.0, 10.0}, {0.0, 1.0}, 10.0), ValidationError);
  CHECK_THROWS_AS(observed_drift(t, lin, 150.0), ValidationError);
}

TEST_CASE("Wilson interval") {
  const ProbabilityEstimate e = wilson_interval(20, 100);
  CHECK(e.p == doctest::Approx(0.2));
  CHECK(e.ci_low == doctest::Approx(0.1333).epsilon(1e-3));
  CHECK(e.ci_high == doctest::Approx(0.2888).epsilon(1e-3));
  const ProbabilityEstimate z = wilson_interval(0, 50);
  CHECK(z.p == 0.0);
  CHECK(z.ci_low == 0.0);
  CHECK(z.ci_high > 0.0);
  CHECK(wilson_interval(50, 50).ci_high == doctest::Approx(1.0));
}

TEST_CASE("ensemble is independent of the worker count") {
  const Simulator sim = small_sim(0.05, 10.0);
  const EnsembleResult a = run_ensemble(sim, 12, 99, 1, "fp");
  const EnsembleResult b = run_ensemble(sim, 12, 99, 4, "fp");
  CHECK(a.stats.mean_drift == b.stats.mean_drift);
  CHECK(a.stats.sem_drift == b.stats.sem_drift);
  CHECK(a.stats.c_od_obs == b.stats.c_od_obs);
  CHECK(a.stats.fingerprint == "fp");
  CHECK(a.stats.n_paths == 12);
  for (std::size_t i = 0; i < a.paths.size(); ++i) {
    CHECK(a.paths[i].index == i);
    CHECK(a.paths[i].seed == derive_seed(99, i));
  }
  for (double s : a.stats.sem_drift) CHECK(s >= 0.0);
  // each path replays on its own
  const PathRecord r = sim.run_path(a.paths[5].seed);
  CHECK(r.gamma_vr == a.paths[5].gamma_vr);
}

TEST_CASE("sigma = 0 ensemble has no drift and no exceedances") {
  const Simulator sim = small_sim(0.0, 10.0);
  const EnsembleResult r = run_ensemble(sim, 4, 1, 1);
  for (double m : r.stats.mean_drift) CHECK(std::abs(m) < 1e-3);
  const ProbabilityEstimate p = p_eps_from(r.paths, 1e-3);
  CHECK(p.p == 0.0);
  CHECK_THROWS_AS(run_ensemble(sim, 1, 1, 1), ValidationError);
}

TEST_CASE("ensemble statistics: variance reduction, CLT scaling and p_eps monotonicity") {
  const Simulator sim = small_sim(0.05, 20.0);
  const EnsembleResult big = run_ensemble(sim, 128, 7, 0);
  const EnsembleResult half = run_ensemble(sim, 64, 7, 0);
  const std::size_t last = big.stats.times.size() - 1;
  CHECK(big.stats.sem_drift[last] / half.stats.sem_drift[last] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(0.2));
  // the subtracted Brownian term shrinks the spread of Gamma - c_sigma t
  CHECK(big.stats.sem_drift[last] < big.stats.sem_raw[last]);
  // ... and has mean zero
  CHECK(std::abs(big.stats.mean_correction[last]) <= 3.0 * big.stats.sem_correction[last]);
  double prev = 1.0;
  for (double eta : {1e-6, 1e-3, 0.01, 0.1, 1.0, 10.0, 1e6}) {
    const double p = p_eps_from(big.paths, eta).p;
    CHECK(p <= prev);
    prev = p;
  }
  CHECK(p_eps_from(big.paths, 1e-12).p == 1.0);
  CHECK(p_eps_from(big.paths, 1e12).p == 0.0);
}
