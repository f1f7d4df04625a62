#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "twlab/kinetics.hpp"

namespace twlab {

struct ModelSection {
  std::string name = "fhn";
  double a = 0.1;
  double eps = 0.01;     // fhn only
  double gamma = 5.0;    // fhn only
  double rho2 = 0.01;    // fhn only
  std::string noise = "linear_u";  // fhn only
};

struct GridSection {
  double L = 60.0;
  int N = 3072;
};

struct SolverSection {
  double newton_tol = 1e-10;
  int newton_max_iters = 50;
  int continuation_steps = 8;
  double k_high = 100.0;
  int num_eigs = 40;
  int dense_limit = 4096;
  double propagator_dt = 1e-2;
  double quad_sample_dt = 5e-2;
  double quad_tol = 1e-6;
  double fd_scale = 1e-4;
};

struct StochasticSection {
  double sigma = 0.05;
  double dt = 1e-3;
  double t_end = 100.0;
  double eps = 0.01;
  double eta = 10.0;     // p_eps threshold; sup N_eps is about 5e3 sigma^2 by T = 50 for the FHN pulse
  int record_stride = 0;  // 0: keep at most 10^4 records per path
  std::vector<double> snapshot_times;
};

struct EnsembleSection {
  int paths = 100;
  std::uint64_t seed = 1;
  std::vector<double> sigmas;
};

struct OutputSection {
  std::string directory = "out";
  std::vector<std::string> formats{"csv", "json"};
};

/// Versioned run configuration (schema_version 1). Parsing rejects unknown
/// keys and fills every omitted value with its default.
struct RunConfig {
  int schema_version = 1;
  ModelSection model;
  GridSection grid;
  SolverSection solver;
  StochasticSection stochastic;
  EnsembleSection ensemble;
  OutputSection output;

  bool wants(const std::string& format) const;
  int record_stride() const;
};

/// Defaults for a model name (grid size follows the model).
RunConfig default_config(const std::string& model_name = "fhn");

RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

/// Checks value ranges; throws ValidationError naming the offending key.
void validate(const RunConfig& cfg);

/// Canonical, key-sorted, fully defaulted JSON.
std::string echo_config(const RunConfig& cfg);

/// 64-bit FNV-1a of the compact canonical JSON, as 16 hex digits.
std::string fingerprint(const RunConfig& cfg);

Model build_model(const RunConfig& cfg);

}  // namespace twlab
