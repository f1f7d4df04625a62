#include <cmath>
#include <iostream>

#include "commands.hpp"
#include "run_dir.hpp"
#include "sweep.hpp"
#include "twlab/error.hpp"
#include "twlab/pipeline.hpp"

namespace twlab::cli {

namespace {

const char* kHead =
    "set datafile separator ','\n"
    "set datafile commentschars '#'\n"
    "set terminal pngcairo size 900,600\n";

// Default FHN parameters with the presets of figure `id`; explicit overrides win.
RunConfig figure_config(const std::string& id, bool full, const Overrides& o) {
  Overrides fo = o;
  fo.model = "fhn";
  RunConfig base = default_config("fhn");
  const std::string root = o.out.value_or(base.output.directory);
  fo.out = root + "/figure-" + id;
  if (id == "1b" && !o.sigma) fo.sigma = 0.15;
  if (id == "2") {
    if (!o.sigma) fo.sigma = 0.03;
    if (!o.t_end) fo.t_end = 100.0;
  }
  if (id == "3a" || id == "3b") {
    // Monte Carlo presets: coarser mesh and step, long horizon.
    if (!o.N) fo.N = 1536;
    if (!o.dt) fo.dt = 1e-2;
    if (!o.t_end) fo.t_end = 200.0;
    if (!o.paths) fo.paths = full ? 1000 : 100;
    if (id == "3a" && o.sigmas.empty()) fo.sigmas = {0.05, 0.10, 0.15};
  }
  RunConfig cfg = assemble_config(fo);
  if (id == "2" && cfg.stochastic.snapshot_times.empty())
    for (double t = 0.0; t <= cfg.stochastic.t_end + 1e-9; t += 1.0) cfg.stochastic.snapshot_times.push_back(t);
  validate(cfg);
  return cfg;
}

void figure_1a(Pipeline& p, const Runtime& rt) {
  const SweepTable tab = run_sweep(p, p.config().ensemble.sigmas, false, rt.workers, !rt.quiet);
  RunDir dir(p.config().output.directory, p.config());
  write_sweep(dir, tab);
  dir.write_text("plot.gp", std::string(kHead) +
                                "set output 'figure-1a.png'\n"
                                "set xlabel 'sigma'\nset ylabel 'c_sigma - c_0'\nset key left bottom\n"
                                "plot 'sweep.csv' using 1:2 with linespoints title 'c_sigma - c_0', \\\n"
                                "     'sweep.csv' using 1:3 with lines title 'sigma^2 c_{0;2}'\n");
  dir.write_json("figure.json", {{"figure", "1a"}, {"c0", p.wave().speed}, {"c02", p.expansion().c02}});
}

void figure_1b(Pipeline& p) {
  const double sigma = p.config().stochastic.sigma;
  const StochasticWave& sw = p.stochastic_wave(sigma);
  const Field& phi0 = p.wave().profile;
  const Grid& g = p.grid();
  std::vector<std::vector<double>> cols(5);
  for (int k = 0; k < g.points(); ++k) {
    cols[0].push_back(g.node(k));
    cols[1].push_back(sw.profile.at(0, k));
    cols[2].push_back(sw.profile.at(1, k));
    cols[3].push_back(phi0.at(0, k));
    cols[4].push_back(phi0.at(1, k));
  }
  RunDir dir(p.config().output.directory, p.config());
  dir.write_csv("profiles.csv", {"xi", "phi_sigma_u", "phi_sigma_w", "phi0_u", "phi0_w"}, cols);
  dir.write_text("plot.gp", std::string(kHead) +
                                "set output 'figure-1b.png'\nset xlabel 'xi'\n"
                                "plot 'profiles.csv' using 1:2 with lines title 'Phi_sigma u', \\\n"
                                "     'profiles.csv' using 1:3 with lines title 'Phi_sigma w', \\\n"
                                "     'profiles.csv' using 1:4 with lines dt 2 title 'Phi_0 u', \\\n"
                                "     'profiles.csv' using 1:5 with lines dt 2 title 'Phi_0 w'\n");
  dir.write_json("figure.json", {{"figure", "1b"},
                                 {"sigma", sigma},
                                 {"c_sigma", sw.speed},
                                 {"c0", p.wave().speed},
                                 {"max_difference", (sw.profile.values - phi0.values).cwiseAbs().maxCoeff()}});
}

void figure_2(Pipeline& p, const Runtime& rt) {
  const RunConfig& cfg = p.config();
  if (!rt.quiet) std::clog << "running one path at sigma=" << cfg.stochastic.sigma << '\n';
  Simulator sim(p.sim_config(cfg.stochastic.sigma, cfg.stochastic.t_end));
  const PathRecord rec = sim.run_path(cfg.ensemble.seed);
  const Grid& g = p.grid();
  const int stride = std::max(1, g.points() / 600);
  std::vector<std::vector<double>> cols(5);
  for (const Snapshot& s : rec.snapshots)
    for (int k = 0; k < g.points(); k += stride) {
      cols[0].push_back(s.t);
      cols[1].push_back(g.node(k));
      cols[2].push_back(s.c0_frame.at(0, k));
      cols[3].push_back(s.csigma_frame.at(0, k));
      cols[4].push_back(s.gamma_frame.at(0, k));
    }
  RunDir dir(cfg.output.directory, cfg);
  dir.write_csv("frames.csv", {"t", "xi", "u_c0_frame", "u_csigma_frame", "u_gamma_frame"}, cols, true);
  dir.write_csv("path.csv", {"t", "gamma_minus_cst", "phase_mismatch", "peak_position"},
                {rec.times, rec.gamma_minus_cst, rec.phase_mismatch, rec.peak_position});
  dir.write_text("plot.gp", std::string(kHead) +
                                "set terminal pngcairo size 1500,500\nset output 'figure-2.png'\n"
                                "set multiplot layout 1,3\nset view map\nset xlabel 'xi'\nset ylabel 't'\n"
                                "unset key\n"
                                "set title 'U(. + c_0 t)'\nsplot 'frames.csv' using 2:1:3 with pm3d\n"
                                "set title 'U(. + c_sigma t)'\nsplot 'frames.csv' using 2:1:4 with pm3d\n"
                                "set title 'U(. + Gamma(t))'\nsplot 'frames.csv' using 2:1:5 with pm3d\n"
                                "unset multiplot\n");
  dir.write_json("figure.json", {{"figure", "2"},
                                 {"sigma", cfg.stochastic.sigma},
                                 {"seed", cfg.ensemble.seed},
                                 {"c0", p.wave().speed},
                                 {"c_sigma", sim.config().swave.speed}});
}

void figure_3(Pipeline& p, const std::string& id, const Runtime& rt) {
  const RunConfig& cfg = p.config();
  const SweepTable tab = run_sweep(p, cfg.ensemble.sigmas, true, rt.workers, !rt.quiet);
  RunDir dir(cfg.output.directory, cfg);
  write_sweep(dir, tab);
  if (id == "3a")
    dir.write_text("plot.gp", std::string(kHead) +
                                  "set output 'figure-3a.png'\nset xlabel 't'\n"
                                  "set ylabel 'E[Gamma(t) - c_sigma t]'\nset key left bottom\n"
                                  "stats 'sweep.csv' using 1 nooutput\n"
                                  "plot for [i=0:STATS_records-1] 'drift_series.csv' index 0 every :::i::i "
                                  "using 2:3 with lines title sprintf('block %d', i+1)\n");
  else
    dir.write_text("plot.gp", std::string(kHead) +
                                  "set output 'figure-3b.png'\nset xlabel 'sigma'\nset ylabel 'orbital drift'\n"
                                  "set key left bottom\n"
                                  "plot 'sweep.csv' using 1:4:6 with yerrorbars title 'c^{od}_{obs}', \\\n"
                                  "     'sweep.csv' using 1:5 with lines title 'sigma^2 c^{od}_{0;2}'\n");
  dir.write_json("figure.json", {{"figure", id},
                                 {"paths", cfg.ensemble.paths},
                                 {"t_end", cfg.stochastic.t_end},
                                 {"c_od_leading", tab.c_od_leading}});
}

}  // namespace

int cmd_reproduce_figure(const std::string& id, bool full, const Overrides& o, const Runtime& rt) {
  if (id != "1a" && id != "1b" && id != "2" && id != "3a" && id != "3b")
    throw ValidationError("reproduce-figure: unknown figure '" + id + "' (expected 1a, 1b, 2, 3a or 3b)");
  Pipeline p(figure_config(id, full, o));
  if (id == "1a") figure_1a(p, rt);
  if (id == "1b") figure_1b(p);
  if (id == "2") figure_2(p, rt);
  if (id == "3a" || id == "3b") figure_3(p, id, rt);
  std::cout << json{{"figure", id}, {"directory", p.config().output.directory}, {"fingerprint", p.fingerprint()}}.dump()
            << '\n';
  return 0;
}

}  // namespace twlab::cli
