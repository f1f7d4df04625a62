#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"
#include "json.hpp"
#include "twlab/error.hpp"

using namespace twlab;
using namespace twlab::cli;

namespace {

int fail(const std::string& type, const std::string& message, int code) {
  std::cerr << nlohmann::json{{"error", {{"type", type}, {"message", message}, {"exit_code", code}}}}.dump() << '\n';
  return code;
}

template <class T>
void opt(CLI::App& app, const std::string& name, std::optional<T>& target, const std::string& help) {
  app.add_option_function<T>(name, [&target](const T& v) { target = v; }, help);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"twlab: traveling waves under multiplicative noise"};
  app.require_subcommand(1);
  app.fallthrough();

  Overrides o;
  Runtime rt;
  app.add_option("-c,--config", o.config_path, "JSON run configuration")->check(CLI::ExistingFile);
  opt(app, "-o,--out", o.out, "output directory (overrides output.directory)");
  app.add_option("--workers", rt.workers, "ensemble worker threads (0: all cores)");
  app.add_flag("-q,--quiet", rt.quiet, "no progress messages or warnings");
  opt(app, "--model", o.model, "fhn or nagumo");
  opt(app, "--a", o.a, "threshold parameter a");
  opt(app, "--eps", o.eps, "fhn: recovery rate");
  opt(app, "--gamma", o.gamma, "fhn: recovery coupling");
  opt(app, "--rho2", o.rho2, "fhn: diffusion of the second component");
  opt(app, "--noise", o.noise, "fhn: linear_u or cubic_cutoff");
  opt(app, "--L", o.L, "domain half-length");
  opt(app, "--N", o.N, "grid points");
  opt(app, "--sigma", o.sigma, "noise strength");
  opt(app, "--dt", o.dt, "simulation time step");
  opt(app, "--t-end", o.t_end, "simulation horizon");
  opt(app, "--eta", o.eta, "threshold for p_eps");
  opt(app, "--paths", o.paths, "ensemble size");
  opt(app, "--seed", o.seed, "base seed");
  app.add_option("--sigmas", o.sigmas, "sigma grid for sweeps")->delimiter(',');

  auto* wave = app.add_subcommand("wave", "deterministic and stochastic waves");
  wave->require_subcommand(1);
  auto* wave_solve = wave->add_subcommand("solve", "solve the traveling wave");
  auto* wave_spec = wave->add_subcommand("spectrum", "spectrum of the linearization");
  auto* wave_stoch = wave->add_subcommand("stochastic-profile", "stochastic wave at --sigma");
  auto* drift = app.add_subcommand("drift", "orbital drift");
  drift->require_subcommand(1);
  auto* drift_predict = drift->add_subcommand("predict", "drift coefficients at --sigma");
  auto* sim = app.add_subcommand("sim", "single path");
  sim->require_subcommand(1);
  auto* sim_run = sim->add_subcommand("run", "simulate one path");
  auto* ens = app.add_subcommand("ensemble", "Monte Carlo ensembles");
  ens->require_subcommand(1);
  auto* ens_run = ens->add_subcommand("run", "ensemble at --sigma");
  auto* ens_sweep = ens->add_subcommand("sweep", "ensembles over --sigmas");
  auto* diag = app.add_subcommand("diagnostics", "numerical diagnostics");
  diag->require_subcommand(1);
  auto* diag_sg = diag->add_subcommand("semigroup", "decay of S(t)Q and commutator norms");
  auto* fig = app.add_subcommand("reproduce-figure", "figure data and gnuplot script");
  std::string figure_id;
  bool full = false;
  fig->add_option("figure", figure_id, "1a, 1b, 2, 3a or 3b")->required();
  fig->add_flag("--full", full, "1000 paths instead of the reduced 100");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("validation", e.what(), 1);
  }

  try {
    set_warnings_enabled(!rt.quiet);
    if (*fig) return cmd_reproduce_figure(figure_id, full, o, rt);
    const RunConfig cfg = assemble_config(o);
    if (*wave_solve) return cmd_wave_solve(cfg, rt);
    if (*wave_spec) return cmd_wave_spectrum(cfg, rt);
    if (*wave_stoch) return cmd_stochastic_profile(cfg, rt);
    if (*drift_predict) return cmd_drift_predict(cfg, rt);
    if (*sim_run) return cmd_sim_run(cfg, rt);
    if (*ens_run) return cmd_ensemble_run(cfg, rt);
    if (*ens_sweep) return cmd_ensemble_sweep(cfg, rt);
    if (*diag_sg) return cmd_diagnostics_semigroup(cfg, rt);
  } catch (const ValidationError& e) {
    return fail("validation", e.what(), 1);
  } catch (const NumericalError& e) {
    return fail("numerical", e.what(), 2);
  } catch (const std::exception& e) {
    return fail("numerical", e.what(), 2);
  }
  return fail("validation", "no subcommand", 1);
}
