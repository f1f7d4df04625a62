#include "twlab/spdesim.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "twlab/error.hpp"

namespace twlab {

SimConfig make_sim_config(const Model& model, const StochasticWave& swave, double c0, const Field& psi,
                          double gap_beta, double dt, double t_end, double eps, int record_stride,
                          const Cutoffs& cutoffs) {
  if (!(dt > 0.0)) throw ValidationError("sim: dt must be positive");
  if (!(t_end > 0.0)) throw ValidationError("sim: t_end must be positive");
  if (!(swave.sigma >= 0.0)) throw ValidationError("sim: sigma must be non-negative");
  if (!(eps > 0.0 && eps < 2.0 * gap_beta))
    throw ValidationError("sim: eps must lie in (0, 2*gap_beta)");
  if (record_stride < 1) throw ValidationError("sim: record_stride must be >= 1");
  if (!(swave.profile.grid == psi.grid)) throw ValidationError("sim: psi and the wave live on different grids");
  SimConfig cfg{model, swave, c0, psi, diff1(psi), diff2(psi), 0.0, cutoffs, swave.sigma, dt, t_end, eps,
                record_stride, {}, swave.profile};
  cfg.b_ref = eval_b(swave.profile, psi, model, cutoffs);
  return cfg;
}

double init_gamma0(const Field& u0, const StochasticWave& swave, const Field& psi) {
  const Field& phi = swave.profile;
  auto F = [&](double g) { return inner(shift(u0, -g) - phi, psi); };
  const double f0 = F(0.0);
  if (f0 == 0.0) return 0.0;
  const double half = 0.5 * u0.grid.half_length();
  const double step = 4.0 * u0.grid.spacing();

  double lo = 0.0, hi = 0.0, flo = 0.0;
  bool found = false;
  double prev_r = 0.0, prev_fr = f0, prev_l = 0.0, prev_fl = f0;
  for (int j = 1; !found; ++j) {
    const double r = std::min(half, j * step);
    const double l = -r;
    const double fr = F(r);
    if (std::signbit(fr) != std::signbit(prev_fr)) {
      lo = prev_r; hi = r; flo = prev_fr;
      found = true;
      break;
    }
    const double fl = F(l);
    if (std::signbit(fl) != std::signbit(prev_fl)) {
      lo = l; hi = prev_l; flo = fl;
      found = true;
      break;
    }
    prev_r = r; prev_fr = fr; prev_l = l; prev_fl = fl;
    if (r >= half) break;
  }
  if (!found) throw NumericalError("init_gamma0: no sign change of the phase condition in [-L/2, L/2]");

  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    const double fm = F(mid);
    if (fm == 0.0) return mid;
    if (std::signbit(fm) == std::signbit(flo)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

Field deviation(const PathState& state, const StochasticWave& swave) {
  const double local = state.gamma - state.frame_offset * state.u.grid.spacing();
  return shift(state.u, -local) - swave.profile;
}

double neps_update(double prev_integral, double v_h1_sq, double dt, double eps) {
  return std::exp(-eps * dt) * prev_integral + dt * std::exp(-0.5 * eps * dt) * v_h1_sq;
}

std::vector<Tridiagonal> diffusion_solvers(const Model& model, const Grid& grid, double dt) {
  std::vector<Tridiagonal> out;
  for (int i = 0; i < model.n; ++i) out.push_back(implicit_diffusion(grid, model.rho[i] * dt));
  return out;
}

void advance_field(Field& u, const Model& model, const std::vector<Tridiagonal>& solvers, double sigma, double dt,
                   double dW) {
  Field rhs = apply_reaction(model, u);
  if (sigma != 0.0) {
    const Field g = apply_noise(model, u);
    const double amp = sigma * dW;
    rhs.values = u.values + dt * rhs.values + amp * g.values;
  } else {
    rhs.values = u.values + dt * rhs.values;
  }
  const int N = u.points();
  auto block = [&](int i) { return rhs.values.data() + static_cast<std::ptrdiff_t>(i) * N; };
  int i = 0;
  for (; i + 1 < model.n; i += 2) Tridiagonal::solve_pair(solvers[i], block(i), solvers[i + 1], block(i + 1));
  if (i < model.n) solvers[i].solve(block(i));
  u = std::move(rhs);
}

std::vector<double> brownian_increments(std::uint64_t seed, double dt, long steps) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(dt));
  std::vector<double> out(static_cast<std::size_t>(steps));
  for (auto& x : out) x = normal(rng);
  return out;
}

Simulator::Simulator(SimConfig cfg) : cfg_(std::move(cfg)) {
  solvers_ = diffusion_solvers(cfg_.model, cfg_.swave.profile.grid, cfg_.dt);
}

long Simulator::steps() const { return std::lround(cfg_.t_end / cfg_.dt); }

namespace {

void recentre(PathState& s) {
  const double h = s.u.grid.spacing();
  const long m = std::lround((s.gamma - s.frame_offset * h) / h);
  if (m != 0) {
    s.u = shift_cells(s.u, static_cast<int>(-m));
    s.frame_offset += m;
  }
}

double peak_position(const PathState& s) {
  const Grid& g = s.u.grid;
  Eigen::Index k = 0;
  s.u.comp(0).maxCoeff(&k);
  double x = g.node(static_cast<int>(k));
  if (k > 0 && k + 1 < g.points()) {
    const double ym = s.u.at(0, k - 1), y0 = s.u.at(0, k), yp = s.u.at(0, k + 1);
    const double den = ym - 2.0 * y0 + yp;
    if (den < 0.0) x += 0.5 * g.spacing() * (ym - yp) / den;
  }
  return x + s.frame_offset * g.spacing();
}

}  // namespace

PathState Simulator::initial_state() const {
  PathState s{cfg_.u0};
  if (!s.u.finite()) throw ValidationError("sim: initial condition is not finite");
  s.gamma = init_gamma0(cfg_.u0, cfg_.swave, cfg_.psi);
  recentre(s);
  return s;
}

void Simulator::step(PathState& s, double dW) const {
  const double h = s.u.grid.spacing();
  const double local = s.gamma - s.frame_offset * h;
  const Field psi_s = shift(cfg_.psi, local);
  const Field psi_xx_s = shift(cfg_.psi_xx, local);
  const PhaseFunctionals pf =
      eval_phase_functionals(s.u, cfg_.swave.speed, psi_s, psi_xx_s, cfg_.sigma, cfg_.model, cfg_.cutoffs);
  if (pf.low_cutoff_active) ++s.low_cutoff_hits;
  if (pf.high_cutoff_active) ++s.high_cutoff_hits;

  s.gamma += (cfg_.swave.speed + pf.a) * cfg_.dt + cfg_.sigma * pf.b * dW;
  advance_field(s.u, cfg_.model, solvers_, cfg_.sigma, cfg_.dt, dW);
  s.beta += dW;
  s.t += cfg_.dt;
  if (!s.u.finite() || !std::isfinite(s.gamma)) {
    std::ostringstream os;
    os << "sim: blow-up at t=" << s.t;
    throw NumericalError(os.str());
  }
  recentre(s);
}

PathRecord Simulator::run_path(std::uint64_t seed) const {
  PathRecord rec = run_path(brownian_increments(seed, cfg_.dt, steps()));
  rec.seed = seed;
  return rec;
}

PathRecord Simulator::run_path(std::span<const double> increments) const {
  const long n_steps = steps();
  if (static_cast<long>(increments.size()) < n_steps)
    throw ValidationError("sim: fewer Brownian increments than steps");
  const double cs = cfg_.swave.speed;
  const double sigma = cfg_.sigma;

  PathRecord rec;
  PathState s = initial_state();
  std::vector<long> snap_steps;
  for (double t : cfg_.snapshot_times) snap_steps.push_back(std::lround(t / cfg_.dt));

  auto frame = [&](double position) -> Field {
    const double d = position - s.frame_offset * s.u.grid.spacing();
    return shift(s.u, -d);
  };

  double v_l2_sq = 0.0;
  double phase = 0.0;
  auto measure = [&]() {
    const Field v = deviation(s, cfg_.swave);
    v_l2_sq = inner(v, v);
    phase = inner(v, cfg_.psi);
    return h1_norm_sq(v);
  };
  measure();

  auto record = [&](long k) {
    const double t = k * cfg_.dt;
    const double neps = v_l2_sq + s.neps_integral;
    rec.times.push_back(t);
    rec.gamma_series.push_back(s.gamma);
    rec.gamma_minus_cst.push_back(s.gamma - cs * t);
    rec.gamma_vr.push_back(s.gamma - cs * t - sigma * cfg_.b_ref * s.beta);
    rec.neps_series.push_back(neps);
    rec.v_l2_series.push_back(std::sqrt(v_l2_sq));
    rec.phase_mismatch.push_back(phase);
    rec.peak_position.push_back(peak_position(s));
    rec.beta_series.push_back(s.beta);
    rec.sup_neps = std::max(rec.sup_neps, neps);
  };
  auto snapshot = [&](long k) {
    for (long ks : snap_steps)
      if (ks == k) {
        const double t = k * cfg_.dt;
        try {
          rec.snapshots.push_back({t, frame(cfg_.c0 * t), frame(cs * t), frame(s.gamma)});
        } catch (const ValidationError&) {
          warn("sim: snapshot frames at t=" + std::to_string(t) + " leave the window; skipped");
        }
      }
  };

  record(0);
  snapshot(0);
  for (long k = 1; k <= n_steps; ++k) {
    step(s, increments[static_cast<std::size_t>(k - 1)]);
    const double h1 = measure();
    s.neps_integral = neps_update(s.neps_integral, h1, cfg_.dt, cfg_.eps);
    if (k % cfg_.record_stride == 0 || k == n_steps) record(k);
    snapshot(k);
  }
  rec.low_cutoff_hits = s.low_cutoff_hits;
  rec.high_cutoff_hits = s.high_cutoff_hits;
  return rec;
}

}  // namespace twlab
