#pragma once

#include <vector>

#include "run_dir.hpp"
#include "twlab/ensemble.hpp"
#include "twlab/pipeline.hpp"

namespace twlab::cli {

struct SweepPoint {
  double sigma = 0.0;
  double c_sigma = 0.0;
  double prediction_cod_sigma2 = 0.0;
  EnsembleResult result;
};

/// Ensemble at one sigma with the pipeline's paths, seed and horizon.
SweepPoint sweep_point(Pipeline& p, double sigma, int workers, bool verbose);

struct SweepTable {
  double c_od_leading = 0.0;
  std::vector<double> sigma, c_sigma_minus_c0, prediction_c02_sigma2, c_od_obs, c_od_obs_sem, prediction_cod_sigma2,
      n_excluded;
  // long format, one block per sigma
  std::vector<double> series_sigma, series_t, series_mean, series_sem;
};

/// Stochastic waves over `sigmas`; with_ensemble adds the Monte Carlo drift.
SweepTable run_sweep(Pipeline& p, const std::vector<double>& sigmas, bool with_ensemble, int workers, bool verbose);

/// sweep.csv, plus drift_series.csv when the table has ensemble data.
void write_sweep(const RunDir& dir, const SweepTable& tab);

}  // namespace twlab::cli
