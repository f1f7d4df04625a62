#include "twlab/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "twlab/error.hpp"

namespace twlab {

using nlohmann::json;

namespace {

const std::vector<double> kDefaultSigmas{0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08,
                                         0.09, 0.10, 0.11, 0.12, 0.13, 0.14, 0.15};

void reject_unknown(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw ValidationError(where + ": expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key())) throw ValidationError(where + "." + it.key() + ": unknown key");
}

void read(const json& obj, const std::string& where, const char* key, double& out) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  if (!v.is_number()) throw ValidationError(where + "." + key + ": expected a number");
  out = v.get<double>();
}

void read(const json& obj, const std::string& where, const char* key, int& out) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw ValidationError(where + "." + key + ": expected an integer");
  out = v.get<int>();
}

void read(const json& obj, const std::string& where, const char* key, std::uint64_t& out) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0))
    throw ValidationError(where + "." + key + ": expected a non-negative integer");
  out = v.get<std::uint64_t>();
}

void read(const json& obj, const std::string& where, const char* key, std::string& out) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  if (!v.is_string()) throw ValidationError(where + "." + key + ": expected a string");
  out = v.get<std::string>();
}

template <class T>
void read_list(const json& obj, const std::string& where, const char* key, std::vector<T>& out) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  if (!v.is_array()) throw ValidationError(where + "." + key + ": expected an array");
  out.clear();
  for (const json& e : v) {
    if constexpr (std::is_same_v<T, std::string>) {
      if (!e.is_string()) throw ValidationError(where + "." + key + ": expected strings");
    } else {
      if (!e.is_number()) throw ValidationError(where + "." + key + ": expected numbers");
    }
    out.push_back(e.get<T>());
  }
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}

json to_json(const RunConfig& c) {
  json model;
  model["name"] = c.model.name;
  model["a"] = c.model.a;
  if (c.model.name == "fhn") {
    model["eps"] = c.model.eps;
    model["gamma"] = c.model.gamma;
    model["rho2"] = c.model.rho2;
    model["noise"] = c.model.noise;
  }
  const SolverSection& s = c.solver;
  const StochasticSection& st = c.stochastic;
  return json{
      {"schema_version", c.schema_version},
      {"model", model},
      {"grid", {{"L", c.grid.L}, {"N", c.grid.N}}},
      {"solver",
       {{"newton_tol", s.newton_tol},
        {"newton_max_iters", s.newton_max_iters},
        {"continuation_steps", s.continuation_steps},
        {"k_high", s.k_high},
        {"num_eigs", s.num_eigs},
        {"dense_limit", s.dense_limit},
        {"propagator_dt", s.propagator_dt},
        {"quad_sample_dt", s.quad_sample_dt},
        {"quad_tol", s.quad_tol},
        {"fd_scale", s.fd_scale}}},
      {"stochastic",
       {{"sigma", st.sigma},
        {"dt", st.dt},
        {"t_end", st.t_end},
        {"eps", st.eps},
        {"eta", st.eta},
        {"record_stride", st.record_stride},
        {"snapshot_times", st.snapshot_times}}},
      {"ensemble", {{"paths", c.ensemble.paths}, {"seed", c.ensemble.seed}, {"sigmas", c.ensemble.sigmas}}},
      {"output", {{"directory", c.output.directory}, {"formats", c.output.formats}}},
  };
}

}  // namespace

bool RunConfig::wants(const std::string& format) const {
  for (const auto& f : output.formats)
    if (f == format) return true;
  return false;
}

int RunConfig::record_stride() const {
  if (stochastic.record_stride > 0) return stochastic.record_stride;
  const double steps = std::round(stochastic.t_end / stochastic.dt);
  return std::max(1, static_cast<int>(std::ceil(steps / 1e4)));
}

RunConfig default_config(const std::string& model_name) {
  RunConfig c;
  c.model.name = model_name;
  if (model_name == "nagumo") {
    c.grid = {40.0, 2048};
  } else if (model_name != "fhn") {
    throw ValidationError("model.name: unknown model '" + model_name + "' (expected fhn or nagumo)");
  }
  c.ensemble.sigmas = kDefaultSigmas;
  return c;
}

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config: invalid JSON: ") + e.what());
  }
  reject_unknown(j, "config", {"schema_version", "model", "grid", "solver", "stochastic", "ensemble", "output"});
  if (!j.contains("schema_version")) throw ValidationError("config.schema_version: missing (expected 1)");
  if (!j.at("schema_version").is_number_integer() || j.at("schema_version").get<int>() != 1)
    throw ValidationError("config.schema_version: unsupported version (expected 1)");

  std::string name = "fhn";
  if (j.contains("model")) read(j.at("model"), "model", "name", name);
  RunConfig c = default_config(name);

  if (j.contains("model")) {
    const json& m = j.at("model");
    if (name == "fhn")
      reject_unknown(m, "model", {"name", "a", "eps", "gamma", "rho2", "noise"});
    else
      reject_unknown(m, "model", {"name", "a"});
    read(m, "model", "a", c.model.a);
    read(m, "model", "eps", c.model.eps);
    read(m, "model", "gamma", c.model.gamma);
    read(m, "model", "rho2", c.model.rho2);
    read(m, "model", "noise", c.model.noise);
  }
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    reject_unknown(g, "grid", {"L", "N"});
    read(g, "grid", "L", c.grid.L);
    read(g, "grid", "N", c.grid.N);
  }
  if (j.contains("solver")) {
    const json& s = j.at("solver");
    reject_unknown(s, "solver",
                   {"newton_tol", "newton_max_iters", "continuation_steps", "k_high", "num_eigs", "dense_limit",
                    "propagator_dt", "quad_sample_dt", "quad_tol", "fd_scale"});
    read(s, "solver", "newton_tol", c.solver.newton_tol);
    read(s, "solver", "newton_max_iters", c.solver.newton_max_iters);
    read(s, "solver", "continuation_steps", c.solver.continuation_steps);
    read(s, "solver", "k_high", c.solver.k_high);
    read(s, "solver", "num_eigs", c.solver.num_eigs);
    read(s, "solver", "dense_limit", c.solver.dense_limit);
    read(s, "solver", "propagator_dt", c.solver.propagator_dt);
    read(s, "solver", "quad_sample_dt", c.solver.quad_sample_dt);
    read(s, "solver", "quad_tol", c.solver.quad_tol);
    read(s, "solver", "fd_scale", c.solver.fd_scale);
  }
  if (j.contains("stochastic")) {
    const json& s = j.at("stochastic");
    reject_unknown(s, "stochastic", {"sigma", "dt", "t_end", "eps", "eta", "record_stride", "snapshot_times"});
    read(s, "stochastic", "sigma", c.stochastic.sigma);
    read(s, "stochastic", "dt", c.stochastic.dt);
    read(s, "stochastic", "t_end", c.stochastic.t_end);
    read(s, "stochastic", "eps", c.stochastic.eps);
    read(s, "stochastic", "eta", c.stochastic.eta);
    read(s, "stochastic", "record_stride", c.stochastic.record_stride);
    read_list(s, "stochastic", "snapshot_times", c.stochastic.snapshot_times);
  }
  if (j.contains("ensemble")) {
    const json& e = j.at("ensemble");
    reject_unknown(e, "ensemble", {"paths", "seed", "sigmas"});
    read(e, "ensemble", "paths", c.ensemble.paths);
    read(e, "ensemble", "seed", c.ensemble.seed);
    read_list(e, "ensemble", "sigmas", c.ensemble.sigmas);
  }
  if (j.contains("output")) {
    const json& o = j.at("output");
    reject_unknown(o, "output", {"directory", "formats"});
    read(o, "output", "directory", c.output.directory);
    read_list(o, "output", "formats", c.output.formats);
  }
  validate(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void validate(const RunConfig& c) {
  require(c.schema_version == 1, "schema_version: unsupported version (expected 1)");
  require(c.model.name == "fhn" || c.model.name == "nagumo", "model.name: expected fhn or nagumo");
  build_model(c);  // parameter ranges are checked by the model factories
  require(c.grid.L > 0.0 && std::isfinite(c.grid.L), "grid.L: must be positive");
  require(c.grid.N >= 16, "grid.N: must be at least 16");
  require(c.solver.newton_tol > 0.0, "solver.newton_tol: must be positive");
  require(c.solver.newton_max_iters >= 1, "solver.newton_max_iters: must be >= 1");
  require(c.solver.continuation_steps >= 1, "solver.continuation_steps: must be >= 1");
  require(c.solver.k_high >= 1.0, "solver.k_high: must be >= 1");
  require(c.solver.num_eigs >= 1, "solver.num_eigs: must be >= 1");
  require(c.solver.dense_limit >= 0, "solver.dense_limit: must be >= 0");
  require(c.solver.propagator_dt > 0.0, "solver.propagator_dt: must be positive");
  require(c.solver.quad_sample_dt >= c.solver.propagator_dt, "solver.quad_sample_dt: must be >= propagator_dt");
  require(c.solver.quad_tol > 0.0 && c.solver.quad_tol < 1.0, "solver.quad_tol: must lie in (0,1)");
  require(c.solver.fd_scale > 0.0, "solver.fd_scale: must be positive");
  require(c.stochastic.sigma >= 0.0, "stochastic.sigma: must be non-negative");
  require(c.stochastic.dt > 0.0, "stochastic.dt: must be positive");
  require(c.stochastic.t_end > 0.0, "stochastic.t_end: must be positive");
  require(c.stochastic.eps > 0.0, "stochastic.eps: must be positive");
  require(c.stochastic.eta > 0.0, "stochastic.eta: must be positive");
  require(c.stochastic.record_stride >= 0, "stochastic.record_stride: must be >= 0");
  for (double t : c.stochastic.snapshot_times)
    require(t >= 0.0 && t <= c.stochastic.t_end, "stochastic.snapshot_times: must lie in [0, t_end]");
  require(c.ensemble.paths >= 2, "ensemble.paths: must be at least 2");
  for (double s : c.ensemble.sigmas) require(s >= 0.0, "ensemble.sigmas: must be non-negative");
  require(!c.output.directory.empty(), "output.directory: must not be empty");
  for (const auto& f : c.output.formats) require(f == "csv" || f == "json", "output.formats: expected csv or json");
}

std::string echo_config(const RunConfig& cfg) { return to_json(cfg).dump(2) + "\n"; }

std::string fingerprint(const RunConfig& cfg) {
  const std::string text = to_json(cfg).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Model build_model(const RunConfig& cfg) {
  if (cfg.model.name == "nagumo") return nagumo_model(cfg.model.a);
  if (cfg.model.name == "fhn")
    return fhn_model(cfg.model.a, cfg.model.eps, cfg.model.gamma, cfg.model.rho2, parse_noise_kind(cfg.model.noise));
  throw ValidationError("model.name: expected fhn or nagumo");
}

}  // namespace twlab
