#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "twlab/spdesim.hpp"

namespace twlab {

/// Counter-based seed of path `index`: a bijective 64-bit mix of
/// base_seed + (index + 1) * golden_gamma, hence collision-free for a fixed base.
std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t index);

/// Compact per-path output kept by the ensemble.
struct PathSummary {
  std::uint64_t index = 0;
  std::uint64_t seed = 0;
  bool excluded = false;
  std::string failure;
  double sup_neps = 0.0;
  double c_od_path = 0.0;                // observed-drift functional of gamma_vr
  std::vector<double> gamma_vr;
  std::vector<double> gamma_minus_cst;
  std::vector<double> correction;        // sigma b(Phi_sigma, psi) beta_t
  std::vector<double> position_c0;       // argmax position minus c0 t
  std::vector<double> phase_mismatch;
};

struct EnsembleStats {
  std::vector<double> times;
  std::vector<double> mean_drift;        // sample mean of gamma_vr
  std::vector<double> sem_drift;
  std::vector<double> mean_raw;          // sample mean of Gamma - c_sigma t
  std::vector<double> sem_raw;
  std::vector<double> mean_correction;
  std::vector<double> sem_correction;
  int n_paths = 0;
  int n_excluded = 0;
  double t_end = 0.0;
  double c_od_obs = 0.0;
  double c_od_obs_sem = 0.0;             // from the spread of per-path functionals
  std::string fingerprint;
};

struct EnsembleResult {
  EnsembleStats stats;
  std::vector<PathSummary> paths;        // ordered by path index
};

/// Runs n_paths seeded paths on `workers` threads (0: hardware concurrency).
/// Aggregation is in path-index order, so the result does not depend on the
/// number of workers. Paths that blow up are excluded with a warning when
/// they are fewer than 1% of the ensemble; otherwise NumericalError.
EnsembleResult run_ensemble(const Simulator& sim, int n_paths, std::uint64_t base_seed, int workers = 0,
                            const std::string& fingerprint = {});

/// (2/T) int_{T/2}^{T} series(t)/t dt by the trapezoid rule on the recorded
/// times, with linear interpolation at t = T/2 and t = T.
double observed_drift(const std::vector<double>& times, const std::vector<double>& series, double T);
double observed_drift(const EnsembleStats& stats, double T);

struct ProbabilityEstimate {
  double p = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  int exceed = 0;
  int n = 0;
};

/// Wilson score interval at 95%.
ProbabilityEstimate wilson_interval(int successes, int n);

/// Fraction of paths with sup N_eps > eta.
ProbabilityEstimate p_eps_from(const std::vector<PathSummary>& paths, double eta);
ProbabilityEstimate estimate_p_eps(const Simulator& sim, int n_paths, double eta, std::uint64_t base_seed,
                                   int workers = 0);

}  // namespace twlab
