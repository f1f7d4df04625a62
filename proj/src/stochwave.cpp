#include "twlab/stochwave.hpp"

#include <Eigen/SparseLU>
#include <cmath>
#include <sstream>

#include "twlab/error.hpp"
#include "twlab/operators.hpp"

namespace twlab {

namespace {

void check_pair(const Field& u, const Field& psi, const char* what) {
  if (!(u.grid == psi.grid) || u.n != psi.n)
    throw ValidationError(std::string(what) + ": u and psi live on different grids");
}

double b_from_pairings(double slope, double noise, const Cutoffs& cutoffs) {
  return -cutoffs.chi_high(noise) / cutoffs.chi_low(slope);
}

}  // namespace

double eval_b(const Field& u, const Field& psi, const Model& model, const Cutoffs& cutoffs) {
  check_pair(u, psi, "eval_b");
  return b_from_pairings(inner(diff1(u), psi), inner(apply_noise(model, u), psi), cutoffs);
}

std::vector<double> eval_kappa(const Field& u, const Field& psi, double sigma, const Model& model,
                               const Cutoffs& cutoffs) {
  const double b = eval_b(u, psi, model, cutoffs);
  std::vector<double> kappa(model.n);
  for (int i = 0; i < model.n; ++i) kappa[i] = 1.0 + sigma * sigma * b * b / (2.0 * model.rho[i]);
  return kappa;
}

PhaseFunctionals eval_phase_functionals(const Field& u, double c, const Field& psi, const Field& psi_xx,
                                        double sigma, const Model& model, const Cutoffs& cutoffs) {
  check_pair(u, psi, "eval_a");
  check_pair(u, psi_xx, "eval_a");
  // One fused pass over the grid: this runs once per time step in the simulator.
  const Field g = apply_noise(model, u);
  const Field f = apply_reaction(model, u);
  const int N = u.points();
  const double h = u.grid.spacing();
  const double inv2h = 0.5 / h;
  const Vector& w = u.grid.weights();

  double slope = 0.0, noise = 0.0, rest = 0.0, coupling = 0.0;
  std::vector<double> diffusive(model.n, 0.0);
  for (int i = 0; i < model.n; ++i) {
    const std::ptrdiff_t o = static_cast<std::ptrdiff_t>(i) * N;
    const double* pu = u.values.data() + o;
    const double* pg = g.values.data() + o;
    const double* pf = f.values.data() + o;
    const double* ps = psi.values.data() + o;
    const double* pxx = psi_xx.values.data() + o;
    auto d1 = [N, inv2h](const double* p, int k) {
      if (k == 0) return (-3.0 * p[0] + 4.0 * p[1] - p[2]) * inv2h;
      if (k == N - 1) return (3.0 * p[N - 1] - 4.0 * p[N - 2] + p[N - 3]) * inv2h;
      return (p[k + 1] - p[k - 1]) * inv2h;
    };
    double s_slope = 0.0, s_noise = 0.0, s_rest = 0.0, s_coup = 0.0, s_diff = 0.0;
    for (int k = 0; k < N; ++k) {
      const double wk = w[k] * ps[k];
      const double du = d1(pu, k);
      s_slope += wk * du;
      s_noise += wk * pg[k];
      s_rest += wk * (pf[k] + c * du);
      s_coup += wk * d1(pg, k);
      s_diff += w[k] * pu[k] * pxx[k];
    }
    slope += s_slope;
    noise += s_noise;
    rest += s_rest;
    coupling += s_coup;
    diffusive[i] = s_diff;
  }

  PhaseFunctionals out;
  out.pairing_slope = slope;
  out.pairing_noise = noise;
  out.low_cutoff_active = cutoffs.low_active(slope);
  out.high_cutoff_active = cutoffs.high_active(noise);
  out.b = b_from_pairings(slope, noise, cutoffs);
  const double s2 = sigma * sigma;
  double total = rest + s2 * out.b * coupling;
  for (int i = 0; i < model.n; ++i) {
    const double kappa = 1.0 + s2 * out.b * out.b / (2.0 * model.rho[i]);
    total += kappa * model.rho[i] * diffusive[i];
  }
  out.a = -total / cutoffs.chi_low(slope);
  return out;
}

double eval_a(const Field& u, double c, const Field& psi, const Field& psi_xx, double sigma, const Model& model,
              const Cutoffs& cutoffs) {
  return eval_phase_functionals(u, c, psi, psi_xx, sigma, model, cutoffs).a;
}

double eval_a(const Field& u, double c, const Field& psi, double sigma, const Model& model, const Cutoffs& cutoffs) {
  return eval_a(u, c, psi, diff2(psi), sigma, model, cutoffs);
}

double eval_btilde(const Field& phi, const Field& psi, const Model& model, const Cutoffs& cutoffs) {
  check_pair(phi, psi, "eval_btilde");
  return -inner(apply_noise(model, phi), psi) / cutoffs.chi_low(inner(diff1(phi), psi));
}

namespace {

// rho kappa(beta) D2 Phi + c D1 Phi + f(Phi) + s2 beta D1 g(Phi)
Field stochastic_residual(const Model& model, const Field& phi, double c, double beta, double s2) {
  Field r = diff2(phi);
  for (int i = 0; i < model.n; ++i) r.comp(i) *= model.rho[i] + 0.5 * s2 * beta * beta;
  r += c * diff1(phi);
  r += apply_reaction(model, phi);
  if (s2 != 0.0) r += (s2 * beta) * diff1(apply_noise(model, phi));
  return r;
}

struct Branch {
  Field phi;
  double c;
  double beta;
};

// Gradient of u -> b(u, psi) as a weighted vector g with db[v] = g . v.
Vector b_gradient(const Model& model, const Field& u, const Field& psi, const Cutoffs& cutoffs,
                  const SparseMatrix& d1_block) {
  const Vector W = block_weights(u.grid, model.n);
  const Vector wpsi = W.cwiseProduct(psi.values);
  const double p = inner(diff1(u), psi);
  const double q = inner(apply_noise(model, u), psi);
  const double cl = cutoffs.chi_low(p);

  // <Dg(u) v, psi> = v . (Dg(u)^T W psi) pointwise
  const int N = u.points();
  const int n = model.n;
  Vector dg_t(static_cast<Eigen::Index>(n) * N);
  std::vector<double> point(n), jac(static_cast<std::size_t>(n) * n);
  for (int k = 0; k < N; ++k) {
    for (int i = 0; i < n; ++i) point[i] = u.at(i, k);
    model.noise_jac(point, jac);
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += jac[static_cast<std::size_t>(i) * n + j] * wpsi[static_cast<Eigen::Index>(i) * N + k];
      dg_t[static_cast<Eigen::Index>(j) * N + k] = s;
    }
  }
  const Vector d1_t = d1_block.transpose() * wpsi;
  return -cutoffs.chi_high_prime(q) / cl * dg_t + cutoffs.chi_high(q) * cutoffs.chi_low_prime(p) / (cl * cl) * d1_t;
}

SparseMatrix block_diff1(const Grid& grid, int n) {
  const SparseMatrix d1 = diff1_matrix(grid);
  const Eigen::Index N = grid.points();
  Triplets t;
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < d1.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(d1, k); it; ++it)
        t.emplace_back(i * N + it.row(), i * N + it.col(), it.value());
  SparseMatrix out(n * N, n * N);
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

// Newton at fixed s2 from `start`. Returns false (leaving `start` untouched)
// when the iteration fails; `last_residual` reports where it stopped.
bool newton_branch(const Model& model, const Field& phi0, const Field& psi, const Cutoffs& cutoffs, double s2,
                   const NewtonOptions& opts, Branch& start, double& last_residual) {
  const Grid& grid = phi0.grid;
  const Eigen::Index m = static_cast<Eigen::Index>(model.n) * grid.points();
  const Vector W = block_weights(grid, model.n);
  const Field slope0 = diff1(phi0);
  const Vector phase_row = W.cwiseProduct(slope0.values);
  const SparseMatrix d1_block = block_diff1(grid, model.n);

  Branch cur = start;
  auto merit = [&](const Branch& z, Field* r_out, double* ph_out, double* br_out) {
    Field r = stochastic_residual(model, z.phi, z.c, z.beta, s2);
    const double ph = inner(z.phi - phi0, slope0);
    const double br = z.beta - eval_b(z.phi, psi, model, cutoffs);
    const double val = inner(r, r) + ph * ph + br * br;
    if (r_out) *r_out = std::move(r);
    if (ph_out) *ph_out = ph;
    if (br_out) *br_out = br;
    return val;
  };

  Field r(grid, model.n);
  double ph = 0.0, br = 0.0;
  double f2 = merit(cur, &r, &ph, &br);
  for (int it = 0;; ++it) {
    last_residual = std::sqrt(f2);
    if (!std::isfinite(f2)) return false;
    if (last_residual <= opts.tol) break;
    if (it == opts.max_iters) return false;

    const double beta = cur.beta;
    std::vector<double> coef(model.n);
    for (int i = 0; i < model.n; ++i) coef[i] = model.rho[i] + 0.5 * s2 * beta * beta;
    Triplets t;
    append_diffusion_advection(t, grid, coef, cur.c);
    append_pointwise(t, cur.phi, model.reaction_jac, 1.0);
    if (s2 != 0.0) append_diff1_of_pointwise(t, cur.phi, model.noise_jac, s2 * beta);
    append_column(t, diff1(cur.phi).values, m);
    Vector dbeta_col = Vector::Zero(m);
    if (s2 != 0.0)
      dbeta_col = s2 * beta * diff2(cur.phi).values + s2 * diff1(apply_noise(model, cur.phi)).values;
    append_column(t, dbeta_col, m + 1);
    append_row(t, phase_row, m);
    append_row(t, -b_gradient(model, cur.phi, psi, cutoffs, d1_block), m + 1);
    t.emplace_back(m + 1, m + 1, 1.0);
    SparseMatrix J(m + 2, m + 2);
    J.setFromTriplets(t.begin(), t.end());
    Eigen::SparseLU<SparseMatrix> lu;
    lu.compute(J);
    if (lu.info() != Eigen::Success) return false;
    Vector rhs(m + 2);
    rhs.head(m) = -r.values;
    rhs[m] = -ph;
    rhs[m + 1] = -br;
    const Vector dz = lu.solve(rhs);
    if (!dz.allFinite()) return false;

    double step = 1.0;
    for (;;) {
      Branch trial = cur;
      trial.phi.values += step * dz.head(m);
      trial.c += step * dz[m];
      trial.beta += step * dz[m + 1];
      Field r_t(grid, model.n);
      double ph_t = 0.0, br_t = 0.0;
      const double f2_t = merit(trial, &r_t, &ph_t, &br_t);
      if (std::isfinite(f2_t) && f2_t < f2) {
        cur = std::move(trial);
        r = std::move(r_t);
        ph = ph_t;
        br = br_t;
        f2 = f2_t;
        break;
      }
      step *= 0.5;
      if (step < opts.min_step) return false;
    }
  }
  start = std::move(cur);
  return true;
}

}  // namespace

StochasticWave solve_stochastic_wave(const Model& model, const WaveSolution& wave, const AdjointEigenfunction& adj,
                                     double sigma, const Cutoffs& cutoffs, const StochasticSolveOptions& opts) {
  if (!std::isfinite(sigma)) throw ValidationError("solve_stochastic_wave: sigma must be finite");
  if (opts.continuation_steps < 1) throw ValidationError("solve_stochastic_wave: continuation_steps must be >= 1");
  const double target = std::abs(sigma);
  const Field& phi0 = wave.profile;
  const Field& psi = adj.psi;
  check_pair(phi0, psi, "solve_stochastic_wave");

  Branch z{phi0, wave.speed, eval_b(phi0, psi, model, cutoffs)};
  double reached = 0.0;
  double increment = target / opts.continuation_steps;
  int halvings = 0;
  int steps = 0;
  double last_residual = 0.0;

  // sigma = 0 is the first stage: it only re-converges (Phi0, c0, b) and is a no-op
  // when the deterministic wave already meets the tolerance.
  if (!newton_branch(model, phi0, psi, cutoffs, 0.0, opts.newton, z, last_residual)) {
    std::ostringstream os;
    os << "solve_stochastic_wave: Newton failed at sigma=0, residual " << last_residual;
    throw NumericalError(os.str());
  }
  while (reached < target) {
    const double next = reached + increment >= target * (1.0 - 1e-12) ? target : reached + increment;
    const double s2 = next * next;
    Branch trial = z;
    if (newton_branch(model, phi0, psi, cutoffs, s2, opts.newton, trial, last_residual)) {
      z = std::move(trial);
      reached = next;
      ++steps;
    } else {
      if (++halvings > opts.max_halvings) {
        std::ostringstream os;
        os << "solve_stochastic_wave: Newton failed at sigma=" << next << ", residual " << last_residual;
        throw NumericalError(os.str());
      }
      increment *= 0.5;
    }
  }

  StochasticWave out{z.phi, z.c, target, 0.0, 0.0, steps};
  out.a_residual = std::abs(eval_a(z.phi, z.c, psi, target, model, cutoffs));
  out.b = eval_b(z.phi, psi, model, cutoffs);
  return out;
}

SpeedExpansion speed_expansion(const Model& model, const WaveSolution& wave, const AdjointEigenfunction& adj,
                               const Cutoffs& cutoffs) {
  const Field& phi0 = wave.profile;
  const Field& psi = adj.psi;
  check_pair(phi0, psi, "speed_expansion");
  const Grid& grid = phi0.grid;
  const Eigen::Index m = static_cast<Eigen::Index>(model.n) * grid.points();

  SpeedExpansion out{wave.speed, 0.0, 0.0, Field(grid, model.n), 0.0, 0.0};
  const double bt = eval_btilde(phi0, psi, model, cutoffs);
  out.btilde0 = bt;
  const Field d2 = diff2(phi0);
  const Field dg = diff1(apply_noise(model, phi0));
  out.c02 = -0.5 * bt * bt * inner(d2, psi) - bt * inner(dg, psi);

  const Field rhs = (-0.5 * bt * bt) * d2 - bt * dg;
  Triplets t;
  append_diffusion_advection(t, grid, model.rho, wave.speed);
  append_pointwise(t, phi0, model.reaction_jac, 1.0);
  append_column(t, diff1(phi0).values, m);
  append_row(t, block_weights(grid, model.n).cwiseProduct(psi.values), m);
  SparseMatrix J(m + 1, m + 1);
  J.setFromTriplets(t.begin(), t.end());
  Eigen::SparseLU<SparseMatrix> lu;
  lu.compute(J);
  if (lu.info() != Eigen::Success)
    throw NumericalError("speed_expansion: bordered system is singular (spectral certificate fails)");
  Vector b(m + 1);
  b.head(m) = rhs.values;
  b[m] = 0.0;
  const Vector z = lu.solve(b);
  if (!z.allFinite())
    throw NumericalError("speed_expansion: bordered system is singular (spectral certificate fails)");
  out.phi02.values = z.head(m);
  out.c02_bordered = z[m];

  Field check(grid, model.n);
  const SparseMatrix L = assemble_linearization(model, phi0, wave.speed);
  check.values = L * out.phi02.values + out.c02_bordered * diff1(phi0).values - rhs.values;
  out.residual = l2_norm(check);
  return out;
}

}  // namespace twlab
