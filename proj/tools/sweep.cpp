#include "sweep.hpp"

#include <cmath>
#include <iostream>
#include <limits>

namespace twlab::cli {

SweepPoint sweep_point(Pipeline& p, double sigma, int workers, bool verbose) {
  const RunConfig& cfg = p.config();
  SweepPoint out;
  out.sigma = sigma;
  Simulator sim(p.sim_config(sigma, cfg.stochastic.t_end));
  out.c_sigma = sim.config().swave.speed;
  out.prediction_cod_sigma2 = sigma * sigma * p.leading_drift().value;
  if (verbose)
    std::clog << "ensemble: sigma=" << sigma << " paths=" << cfg.ensemble.paths << " T=" << cfg.stochastic.t_end
              << '\n';
  out.result = run_ensemble(sim, cfg.ensemble.paths, cfg.ensemble.seed, workers, p.fingerprint());
  return out;
}

SweepTable run_sweep(Pipeline& p, const std::vector<double>& sigmas, bool with_ensemble, int workers, bool verbose) {
  SweepTable tab;
  const double c0 = p.wave().speed;
  const double c02 = p.expansion().c02;
  if (with_ensemble) tab.c_od_leading = p.leading_drift().value;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (double s : sigmas) {
    if (verbose) std::clog << "stochastic wave: sigma=" << s << '\n';
    const StochasticWave& sw = p.stochastic_wave(s);
    tab.sigma.push_back(s);
    tab.c_sigma_minus_c0.push_back(sw.speed - c0);
    tab.prediction_c02_sigma2.push_back(s * s * c02);
    if (!with_ensemble) {
      tab.c_od_obs.push_back(nan);
      tab.c_od_obs_sem.push_back(nan);
      tab.prediction_cod_sigma2.push_back(nan);
      tab.n_excluded.push_back(0);
      continue;
    }
    const SweepPoint pt = sweep_point(p, s, workers, verbose);
    const EnsembleStats& st = pt.result.stats;
    tab.c_od_obs.push_back(st.c_od_obs);
    tab.c_od_obs_sem.push_back(st.c_od_obs_sem);
    tab.prediction_cod_sigma2.push_back(pt.prediction_cod_sigma2);
    tab.n_excluded.push_back(st.n_excluded);
    for (std::size_t k = 0; k < st.times.size(); ++k) {
      tab.series_sigma.push_back(s);
      tab.series_t.push_back(st.times[k]);
      tab.series_mean.push_back(st.mean_drift[k]);
      tab.series_sem.push_back(st.sem_drift[k]);
    }
  }
  return tab;
}

void write_sweep(const RunDir& dir, const SweepTable& tab) {
  if (tab.series_t.empty()) {
    dir.write_csv("sweep.csv", {"sigma", "c_sigma_minus_c0", "prediction_c02_sigma2"},
                  {tab.sigma, tab.c_sigma_minus_c0, tab.prediction_c02_sigma2});
    return;
  }
  dir.write_csv("sweep.csv",
                {"sigma", "c_sigma_minus_c0", "prediction_c02_sigma2", "c_od_obs", "prediction_cod_sigma2",
                 "c_od_obs_sem", "n_excluded"},
                {tab.sigma, tab.c_sigma_minus_c0, tab.prediction_c02_sigma2, tab.c_od_obs, tab.prediction_cod_sigma2,
                 tab.c_od_obs_sem, tab.n_excluded});
  dir.write_csv("drift_series.csv", {"sigma", "t", "mean_drift", "sem_drift"},
                {tab.series_sigma, tab.series_t, tab.series_mean, tab.series_sem}, true);
}

}  // namespace twlab::cli
