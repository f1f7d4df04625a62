#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "twlab/config.hpp"

namespace twlab::cli {

/// Values given on the command line; unset ones leave the config untouched.
struct Overrides {
  std::string config_path;
  std::optional<std::string> model, noise, out;
  std::optional<double> a, eps, gamma, rho2, L, sigma, dt, t_end, eta;
  std::optional<int> N, paths;
  std::optional<std::uint64_t> seed;
  std::vector<double> sigmas;
};

struct Runtime {
  int workers = 0;
  bool quiet = false;
};

/// Config file (or defaults) with the overrides applied, validated.
RunConfig assemble_config(const Overrides& o);

int cmd_wave_solve(const RunConfig& cfg, const Runtime& rt);
int cmd_wave_spectrum(const RunConfig& cfg, const Runtime& rt);
int cmd_stochastic_profile(const RunConfig& cfg, const Runtime& rt);
int cmd_drift_predict(const RunConfig& cfg, const Runtime& rt);
int cmd_sim_run(const RunConfig& cfg, const Runtime& rt);
int cmd_ensemble_run(const RunConfig& cfg, const Runtime& rt);
int cmd_ensemble_sweep(const RunConfig& cfg, const Runtime& rt);
int cmd_diagnostics_semigroup(const RunConfig& cfg, const Runtime& rt);
int cmd_reproduce_figure(const std::string& id, bool full, const Overrides& o, const Runtime& rt);

}  // namespace twlab::cli
