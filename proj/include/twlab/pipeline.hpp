#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>

#include "twlab/config.hpp"
#include "twlab/detwave.hpp"
#include "twlab/ensemble.hpp"
#include "twlab/semigroup.hpp"
#include "twlab/spdesim.hpp"
#include "twlab/stochwave.hpp"

namespace twlab {

/// Lazily computed stages wave -> spectrum -> stochastic wave -> drift ->
/// simulation, all driven by one RunConfig. Each stage is computed once.
class Pipeline {
 public:
  explicit Pipeline(RunConfig cfg);

  const RunConfig& config() const { return cfg_; }
  const std::string& fingerprint() const { return fingerprint_; }
  const Model& model() const { return model_; }
  const Grid& grid() const { return grid_; }
  const Cutoffs& cutoffs() const { return cutoffs_; }

  const WaveSolution& wave();
  const AdjointEigenfunction& adjoint();
  const SpectralReport& spectrum();
  /// Throws NumericalError unless the spectrum certifies a simple zero and a gap.
  double gap_beta();
  const SpeedExpansion& expansion();
  const StochasticWave& stochastic_wave(double sigma);
  const DriftIntegral& leading_drift();
  DriftIntegral general_drift(double sigma);

  DriftQuadrature quadrature() const;
  /// Simulation setup at the given sigma, starting from Phi_sigma.
  SimConfig sim_config(double sigma, double t_end);

 private:
  RunConfig cfg_;
  std::string fingerprint_;
  Model model_;
  Grid grid_;
  Cutoffs cutoffs_;
  std::optional<WaveSolution> wave_;
  std::optional<AdjointEigenfunction> adjoint_;
  std::optional<SpectralReport> spectrum_;
  std::optional<SpeedExpansion> expansion_;
  std::optional<DriftIntegral> leading_;
  std::map<double, StochasticWave> swaves_;
};

}  // namespace twlab
