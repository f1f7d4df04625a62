#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "run_dir.hpp"
#include "sweep.hpp"
#include "twlab/error.hpp"
#include "twlab/pipeline.hpp"

namespace twlab::cli {

namespace {

void say(const Runtime& rt, const std::string& msg) {
  if (!rt.quiet) std::clog << msg << '\n';
}

void print(const json& j) { std::cout << j.dump(2) << '\n'; }

json wave_summary(Pipeline& p) {
  const WaveSolution& w = p.wave();
  json j{{"model", p.model().name},
         {"speed", w.speed},
         {"residual_norm", w.residual_norm},
         {"newton_iters", w.newton_iters},
         {"L", p.grid().half_length()},
         {"N", p.grid().points()}};
  if (p.model().name == "nagumo") {
    const double a = p.config().model.a;
    double err = 0.0;
    for (int k = 0; k < p.grid().points(); ++k)
      err = std::max(err, std::abs(w.profile.at(0, k) - nagumo_exact_front(p.grid().node(k))));
    j["exact_speed"] = nagumo_exact_speed(a);
    j["profile_max_error"] = err;
  }
  return j;
}

}  // namespace

RunConfig assemble_config(const Overrides& o) {
  RunConfig cfg = o.config_path.empty() ? default_config(o.model.value_or("fhn")) : load_config(o.config_path);
  if (o.model && *o.model != cfg.model.name) {
    const RunConfig fresh = default_config(*o.model);
    cfg.model = fresh.model;
    if (o.config_path.empty()) cfg.grid = fresh.grid;
  }
  if (cfg.model.name == "nagumo") {
    if (o.eps || o.gamma || o.rho2 || o.noise)
      throw ValidationError("model: --eps, --gamma, --rho2 and --noise apply to fhn only");
  }
  if (o.a) cfg.model.a = *o.a;
  if (o.eps) cfg.model.eps = *o.eps;
  if (o.gamma) cfg.model.gamma = *o.gamma;
  if (o.rho2) cfg.model.rho2 = *o.rho2;
  if (o.noise) cfg.model.noise = *o.noise;
  if (o.L) cfg.grid.L = *o.L;
  if (o.N) cfg.grid.N = *o.N;
  if (o.sigma) cfg.stochastic.sigma = *o.sigma;
  if (o.dt) cfg.stochastic.dt = *o.dt;
  if (o.t_end) {
    cfg.stochastic.t_end = *o.t_end;
    std::erase_if(cfg.stochastic.snapshot_times, [&](double t) { return t > *o.t_end; });
  }
  if (o.eta) cfg.stochastic.eta = *o.eta;
  if (o.paths) cfg.ensemble.paths = *o.paths;
  if (o.seed) cfg.ensemble.seed = *o.seed;
  if (!o.sigmas.empty()) cfg.ensemble.sigmas = o.sigmas;
  if (o.out) cfg.output.directory = *o.out;
  validate(cfg);
  return cfg;
}

int cmd_wave_solve(const RunConfig& cfg, const Runtime& rt) {
  Pipeline p(cfg);
  say(rt, "solving traveling wave");
  const json summary = wave_summary(p);
  RunDir dir(cfg.output.directory, cfg);
  if (cfg.wants("csv")) dir.write_field("wave.csv", p.wave().profile);
  if (cfg.wants("json")) dir.write_json("wave.json", summary);
  print(summary);
  return 0;
}

int cmd_wave_spectrum(const RunConfig& cfg, const Runtime& rt) {
  Pipeline p(cfg);
  say(rt, "solving traveling wave and its spectrum");
  const SpectralReport& rep = p.spectrum();
  json j{{"eigenvalues", complex_list(rep.eigenvalues)},
         {"zero_eig", {{"re", rep.zero_eig.real()}, {"im", rep.zero_eig.imag()}}},
         {"gap_beta", rep.gap_beta},
         {"zero_is_simple", rep.zero_is_simple},
         {"essential_bound", rep.essential_bound},
         {"spectral_radius", rep.spectral_radius},
         {"dense", rep.dense},
         {"speed", p.wave().speed}};
  RunDir dir(cfg.output.directory, cfg);
  dir.write_json("spectrum.json", j);
  json brief = j;
  brief.erase("eigenvalues");
  print(brief);
  return 0;
}

int cmd_stochastic_profile(const RunConfig& cfg, const Runtime& rt) {
  Pipeline p(cfg);
  const double sigma = cfg.stochastic.sigma;
  say(rt, "solving stochastic wave");
  const StochasticWave& sw = p.stochastic_wave(sigma);
  const SpeedExpansion& ex = p.expansion();
  json j{{"sigma", sigma},
         {"c_sigma", sw.speed},
         {"c0", p.wave().speed},
         {"c02", ex.c02},
         {"c_sigma_minus_c0", sw.speed - p.wave().speed},
         {"prediction_c02_sigma2", sigma * sigma * ex.c02},
         {"b", sw.b},
         {"a_residual", sw.a_residual},
         {"continuation_steps", sw.continuation_steps}};
  RunDir dir(cfg.output.directory, cfg);
  if (cfg.wants("csv")) {
    const Grid& g = p.grid();
    std::vector<std::string> header{"xi"};
    std::vector<std::vector<double>> cols(1);
    for (int k = 0; k < g.points(); ++k) cols[0].push_back(g.node(k));
    auto add = [&](const std::string& prefix, const Field& u) {
      for (int i = 0; i < u.n; ++i) {
        header.push_back(prefix + std::to_string(i + 1));
        cols.emplace_back(u.comp(i).begin(), u.comp(i).end());
      }
    };
    add("phi_sigma_", sw.profile);
    add("phi0_", p.wave().profile);
    dir.write_csv("stochastic_profile.csv", header, cols);
  }
  if (cfg.wants("json")) dir.write_json("stochastic_profile.json", j);
  print(j);
  return 0;
}

int cmd_drift_predict(const RunConfig& cfg, const Runtime& rt) {
  Pipeline p(cfg);
  const double sigma = cfg.stochastic.sigma;
  say(rt, "computing wave, spectrum, stochastic wave and drift integrals");
  const DriftCoefficients dc = drift_coefficients(p.model(), p.wave(), p.stochastic_wave(sigma), p.adjoint().psi,
                                                  p.gap_beta(), p.cutoffs(), p.quadrature());
  json j{{"sigma", sigma},
         {"c0", p.wave().speed},
         {"c_sigma", p.stochastic_wave(sigma).speed},
         {"c02", p.expansion().c02},
         {"c_od_leading", dc.c_od_leading},
         {"c_od_general", dc.c_od_2},
         {"c_lim_2", dc.c_lim_2},
         {"truncation_time", dc.truncation_time},
         {"quadrature_error_estimate", dc.quadrature_error_estimate},
         {"gap_beta", p.gap_beta()}};
  RunDir dir(cfg.output.directory, cfg);
  dir.write_json("drift.json", j);
  print(j);
  return 0;
}

int cmd_sim_run(const RunConfig& cfg, const Runtime& rt) {
  Pipeline p(cfg);
  const double sigma = cfg.stochastic.sigma;
  say(rt, "preparing simulation");
  Simulator sim(p.sim_config(sigma, cfg.stochastic.t_end));
  say(rt, "running path");
  const PathRecord rec = sim.run_path(cfg.ensemble.seed);
  json j{{"sigma", sigma},
         {"seed", cfg.ensemble.seed},
         {"c0", p.wave().speed},
         {"c_sigma", sim.config().swave.speed},
         {"t_end", cfg.stochastic.t_end},
         {"dt", cfg.stochastic.dt},
         {"sup_neps", rec.sup_neps},
         {"low_cutoff_hits", rec.low_cutoff_hits},
         {"high_cutoff_hits", rec.high_cutoff_hits}};
  RunDir dir(cfg.output.directory, cfg);
  if (cfg.wants("csv")) {
    dir.write_csv("path.csv",
                  {"t", "gamma", "gamma_minus_cst", "gamma_vr", "neps", "v_l2", "phase_mismatch", "peak_position",
                   "beta"},
                  {rec.times, rec.gamma_series, rec.gamma_minus_cst, rec.gamma_vr, rec.neps_series, rec.v_l2_series,
                   rec.phase_mismatch, rec.peak_position, rec.beta_series});
    if (!rec.snapshots.empty()) {
      std::vector<std::vector<double>> cols(5);
      const Grid& g = p.grid();
      for (const Snapshot& s : rec.snapshots)
        for (int k = 0; k < g.points(); ++k) {
          cols[0].push_back(s.t);
          cols[1].push_back(g.node(k));
          cols[2].push_back(s.c0_frame.at(0, k));
          cols[3].push_back(s.csigma_frame.at(0, k));
          cols[4].push_back(s.gamma_frame.at(0, k));
        }
      dir.write_csv("snapshots.csv", {"t", "xi", "u_c0_frame", "u_csigma_frame", "u_gamma_frame"}, cols);
    }
  }
  if (cfg.wants("json")) dir.write_json("path.json", j);
  print(j);
  return 0;
}

int cmd_ensemble_run(const RunConfig& cfg, const Runtime& rt) {
  Pipeline p(cfg);
  const double sigma = cfg.stochastic.sigma;
  say(rt, "preparing ensemble");
  const SweepPoint pt = sweep_point(p, sigma, rt.workers, !rt.quiet);
  const EnsembleStats& st = pt.result.stats;
  const ProbabilityEstimate pe = p_eps_from(pt.result.paths, cfg.stochastic.eta);
  json j{{"sigma", sigma},
         {"paths", cfg.ensemble.paths},
         {"n_paths", st.n_paths},
         {"n_excluded", st.n_excluded},
         {"seed", cfg.ensemble.seed},
         {"t_end", st.t_end},
         {"c_sigma", pt.c_sigma},
         {"c_od_obs", st.c_od_obs},
         {"c_od_obs_sem", st.c_od_obs_sem},
         {"prediction_cod_sigma2", pt.prediction_cod_sigma2},
         {"p_eps", pe.p},
         {"p_eps_ci", {pe.ci_low, pe.ci_high}},
         {"eta", cfg.stochastic.eta}};
  RunDir dir(cfg.output.directory, cfg);
  if (cfg.wants("csv"))
    dir.write_csv("ensemble.csv", {"t", "mean_drift", "sem_drift", "mean_raw", "sem_raw", "mean_correction"},
                  {st.times, st.mean_drift, st.sem_drift, st.mean_raw, st.sem_raw, st.mean_correction});
  if (cfg.wants("json")) dir.write_json("ensemble.json", j);
  print(j);
  return 0;
}

int cmd_ensemble_sweep(const RunConfig& cfg, const Runtime& rt) {
  Pipeline p(cfg);
  const SweepTable tab = run_sweep(p, cfg.ensemble.sigmas, true, rt.workers, !rt.quiet);
  RunDir dir(cfg.output.directory, cfg);
  write_sweep(dir, tab);
  json j{{"rows", static_cast<int>(tab.sigma.size())},
         {"c0", p.wave().speed},
         {"c02", p.expansion().c02},
         {"c_od_leading", tab.c_od_leading}};
  dir.write_json("sweep.json", j);
  print(j);
  return 0;
}

int cmd_diagnostics_semigroup(const RunConfig& cfg, const Runtime& rt) {
  Pipeline p(cfg);
  say(rt, "measuring semigroup decay");
  std::vector<double> t_grid;
  for (double t : {0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}) t_grid.push_back(t);
  for (int k = 1; k <= 10; ++k) t_grid.push_back(k);
  DecayOptions opts;
  opts.dt = cfg.solver.propagator_dt;
  opts.seed = cfg.ensemble.seed;
  const double rate = 2.0 * p.gap_beta();
  const DecayReport rep = decay_diagnostics(p.model(), p.wave(), p.adjoint().psi, t_grid, rate, opts);
  json j{{"fitted_M", rep.fitted_M},
         {"fitted_beta", rep.fitted_beta},
         {"spectral_rate", rep.spectral_rate},
         {"lambda_sup_short", rep.lambda_sup_short},
         {"lambda_decay_rate", rep.lambda_decay_rate}};
  RunDir dir(cfg.output.directory, cfg);
  if (cfg.wants("csv")) dir.write_csv("semigroup.csv", {"t", "norm_SQ", "norm_Lambda"}, {rep.t, rep.norm_SQ, rep.norm_Lambda});
  if (cfg.wants("json")) dir.write_json("semigroup.json", j);
  print(j);
  return 0;
}

}  // namespace twlab::cli
