#include "twlab/pipeline.hpp"

#include <sstream>

#include "twlab/error.hpp"

namespace twlab {

Pipeline::Pipeline(RunConfig cfg)
    : cfg_(std::move(cfg)),
      fingerprint_(twlab::fingerprint(cfg_)),
      model_(build_model(cfg_)),
      grid_(cfg_.grid.L, cfg_.grid.N),
      cutoffs_(cfg_.solver.k_high) {}

const WaveSolution& Pipeline::wave() {
  if (!wave_) {
    const WaveSeed seed = seed_wave(model_, grid_);
    NewtonOptions opts;
    opts.tol = cfg_.solver.newton_tol;
    opts.max_iters = cfg_.solver.newton_max_iters;
    wave_ = solve_wave(model_, grid_, seed.profile, seed.speed, opts);
  }
  return *wave_;
}

const AdjointEigenfunction& Pipeline::adjoint() {
  if (!adjoint_) adjoint_ = adjoint_eigenfunction(model_, wave());
  return *adjoint_;
}

const SpectralReport& Pipeline::spectrum() {
  if (!spectrum_) spectrum_ = twlab::spectrum(model_, wave(), cfg_.solver.num_eigs, cfg_.solver.dense_limit);
  return *spectrum_;
}

double Pipeline::gap_beta() {
  const SpectralReport& rep = spectrum();
  if (!rep.certifies()) {
    std::ostringstream msg;
    msg << "spectrum: no certified gap (zero_is_simple=" << rep.zero_is_simple << ", gap_beta=" << rep.gap_beta
        << "); try a larger grid";
    throw NumericalError(msg.str());
  }
  return rep.gap_beta;
}

const SpeedExpansion& Pipeline::expansion() {
  if (!expansion_) expansion_ = speed_expansion(model_, wave(), adjoint(), cutoffs_);
  return *expansion_;
}

const StochasticWave& Pipeline::stochastic_wave(double sigma) {
  auto it = swaves_.find(sigma);
  if (it != swaves_.end()) return it->second;
  StochasticSolveOptions opts;
  opts.continuation_steps = cfg_.solver.continuation_steps;
  opts.newton.tol = std::min(opts.newton.tol, cfg_.solver.newton_tol);
  opts.newton.max_iters = cfg_.solver.newton_max_iters;
  return swaves_.emplace(sigma, solve_stochastic_wave(model_, wave(), adjoint(), sigma, cutoffs_, opts))
      .first->second;
}

DriftQuadrature Pipeline::quadrature() const {
  DriftQuadrature q;
  q.dt = cfg_.solver.propagator_dt;
  q.sample_dt = cfg_.solver.quad_sample_dt;
  q.tol = cfg_.solver.quad_tol;
  q.fd_scale = cfg_.solver.fd_scale;
  return q;
}

const DriftIntegral& Pipeline::leading_drift() {
  if (!leading_) leading_ = orbital_drift_leading(model_, wave(), adjoint().psi, gap_beta(), cutoffs_, quadrature());
  return *leading_;
}

DriftIntegral Pipeline::general_drift(double sigma) {
  const double beta = gap_beta();
  return orbital_drift_general(model_, wave(), stochastic_wave(sigma), adjoint().psi, beta, cutoffs_, quadrature());
}

SimConfig Pipeline::sim_config(double sigma, double t_end) {
  const double beta = gap_beta();
  RunConfig c = cfg_;
  c.stochastic.t_end = t_end;
  SimConfig sc = make_sim_config(model_, stochastic_wave(sigma), wave().speed, adjoint().psi, beta,
                                 cfg_.stochastic.dt, t_end, cfg_.stochastic.eps, c.record_stride(), cutoffs_);
  sc.snapshot_times = cfg_.stochastic.snapshot_times;
  return sc;
}

}  // namespace twlab
