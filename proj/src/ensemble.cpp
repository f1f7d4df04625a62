#include "twlab/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "twlab/error.hpp"

namespace twlab {

std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t index) {
  std::uint64_t z = base_seed + (index + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double observed_drift(const std::vector<double>& times, const std::vector<double>& series, double T) {
  if (times.size() != series.size()) throw ValidationError("observed_drift: series length mismatch");
  if (!(T > 0.0)) throw ValidationError("observed_drift: T must be positive");
  const double tol = 1e-9 * T;
  if (times.empty() || times.back() < T - tol) throw ValidationError("observed_drift: records do not cover [0, T]");
  const double a = 0.5 * T;
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (times[k] < a - tol) continue;
    if (times[k] > T + tol) {
      // close the window at T by interpolation
      const double t0 = times[k - 1], t1 = times[k];
      if (!xs.empty() && xs.back() < T - tol) {
        const double y = series[k - 1] + (series[k] - series[k - 1]) * (T - t0) / (t1 - t0);
        xs.push_back(T);
        ys.push_back(y / T);
      }
      break;
    }
    if (xs.empty() && times[k] > a + tol) {
      if (k == 0) throw ValidationError("observed_drift: records do not reach back to T/2");
      const double t0 = times[k - 1], t1 = times[k];
      const double y = series[k - 1] + (series[k] - series[k - 1]) * (a - t0) / (t1 - t0);
      xs.push_back(a);
      ys.push_back(y / a);
    }
    xs.push_back(times[k]);
    ys.push_back(series[k] / times[k]);
  }
  if (xs.size() < 3) throw ValidationError("observed_drift: fewer than 3 samples in [T/2, T]");
  double integral = 0.0;
  for (std::size_t k = 1; k < xs.size(); ++k) integral += 0.5 * (xs[k] - xs[k - 1]) * (ys[k] + ys[k - 1]);
  return 2.0 / T * integral;
}

double observed_drift(const EnsembleStats& stats, double T) { return observed_drift(stats.times, stats.mean_drift, T); }

namespace {

PathSummary summarise(const PathRecord& rec, const SimConfig& cfg, std::uint64_t index) {
  PathSummary s;
  s.index = index;
  s.seed = rec.seed;
  s.sup_neps = rec.sup_neps;
  s.gamma_vr = rec.gamma_vr;
  s.gamma_minus_cst = rec.gamma_minus_cst;
  const std::size_t m = rec.times.size();
  s.correction.resize(m);
  s.position_c0.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    s.correction[k] = cfg.sigma * cfg.b_ref * rec.beta_series[k];
    s.position_c0[k] = rec.peak_position[k] - cfg.c0 * rec.times[k];
  }
  s.phase_mismatch = rec.phase_mismatch;
  s.c_od_path = observed_drift(rec.times, rec.gamma_vr, rec.times.back());
  return s;
}

void mean_sem(const std::vector<const std::vector<double>*>& rows, std::vector<double>& mean, std::vector<double>& sem) {
  const std::size_t m = rows.front()->size();
  const double n = static_cast<double>(rows.size());
  mean.assign(m, 0.0);
  sem.assign(m, 0.0);
  for (const auto* r : rows)
    for (std::size_t k = 0; k < m; ++k) mean[k] += (*r)[k];
  for (auto& x : mean) x /= n;
  for (const auto* r : rows)
    for (std::size_t k = 0; k < m; ++k) {
      const double d = (*r)[k] - mean[k];
      sem[k] += d * d;
    }
  for (auto& x : sem) x = std::sqrt(x / (n - 1.0) / n);
}

}  // namespace

EnsembleResult run_ensemble(const Simulator& sim, int n_paths, std::uint64_t base_seed, int workers,
                            const std::string& fingerprint) {
  if (n_paths < 2) throw ValidationError("ensemble: n_paths must be at least 2");
  if (workers <= 0) workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers = std::min(workers, n_paths);

  std::vector<PathSummary> paths(static_cast<std::size_t>(n_paths));
  std::vector<double> times;
  std::mutex times_mutex;
  std::atomic<int> next{0};
  std::exception_ptr fatal;
  std::mutex fatal_mutex;

  auto worker = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n_paths) return;
      const std::uint64_t seed = derive_seed(base_seed, static_cast<std::uint64_t>(i));
      try {
        const PathRecord rec = sim.run_path(seed);
        paths[static_cast<std::size_t>(i)] = summarise(rec, sim.config(), static_cast<std::uint64_t>(i));
        std::lock_guard<std::mutex> lock(times_mutex);
        if (times.empty()) times = rec.times;
      } catch (const NumericalError& e) {
        PathSummary& s = paths[static_cast<std::size_t>(i)];
        s.index = static_cast<std::uint64_t>(i);
        s.seed = seed;
        s.excluded = true;
        s.failure = e.what();
      } catch (...) {
        std::lock_guard<std::mutex> lock(fatal_mutex);
        if (!fatal) fatal = std::current_exception();
        next.store(n_paths);
      }
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (fatal) std::rethrow_exception(fatal);

  EnsembleResult out;
  EnsembleStats& st = out.stats;
  st.fingerprint = fingerprint;
  st.t_end = sim.config().t_end;
  std::vector<const std::vector<double>*> vr, raw, corr;
  std::vector<double> c_od;
  for (const PathSummary& s : paths) {
    if (s.excluded) {
      ++st.n_excluded;
      continue;
    }
    vr.push_back(&s.gamma_vr);
    raw.push_back(&s.gamma_minus_cst);
    corr.push_back(&s.correction);
    c_od.push_back(s.c_od_path);
  }
  if (st.n_excluded > 0) {
    std::ostringstream os;
    os << "ensemble: " << st.n_excluded << " of " << n_paths << " paths blew up (first: seed "
       << std::find_if(paths.begin(), paths.end(), [](const PathSummary& s) { return s.excluded; })->seed << ")";
    if (100 * st.n_excluded >= n_paths) throw NumericalError(os.str() + "; at least 1% of paths failed");
    warn(os.str() + "; excluded from the statistics");
  }
  st.n_paths = static_cast<int>(vr.size());
  if (st.n_paths < 2) throw NumericalError("ensemble: fewer than two usable paths");
  st.times = times;
  mean_sem(vr, st.mean_drift, st.sem_drift);
  mean_sem(raw, st.mean_raw, st.sem_raw);
  mean_sem(corr, st.mean_correction, st.sem_correction);

  double mean = 0.0;
  for (double x : c_od) mean += x;
  mean /= static_cast<double>(c_od.size());
  double var = 0.0;
  for (double x : c_od) var += (x - mean) * (x - mean);
  var /= static_cast<double>(c_od.size() - 1);
  st.c_od_obs = observed_drift(st, st.t_end);
  st.c_od_obs_sem = std::sqrt(var / static_cast<double>(c_od.size()));
  out.paths = std::move(paths);
  return out;
}

ProbabilityEstimate wilson_interval(int successes, int n) {
  if (n <= 0) throw ValidationError("wilson_interval: n must be positive");
  const double z = 1.959963984540054;
  const double p = static_cast<double>(successes) / n;
  const double z2n = z * z / n;
  const double centre = (p + 0.5 * z2n) / (1.0 + z2n);
  const double half = z * std::sqrt(p * (1.0 - p) / n + 0.25 * z2n / n) / (1.0 + z2n);
  const double lo = successes == 0 ? 0.0 : std::max(0.0, centre - half);
  const double hi = successes == n ? 1.0 : std::min(1.0, centre + half);
  return {p, lo, hi, successes, n};
}

ProbabilityEstimate p_eps_from(const std::vector<PathSummary>& paths, double eta) {
  int n = 0, hit = 0;
  for (const PathSummary& s : paths) {
    if (s.excluded) continue;
    ++n;
    if (s.sup_neps > eta) ++hit;
  }
  return wilson_interval(hit, n);
}

ProbabilityEstimate estimate_p_eps(const Simulator& sim, int n_paths, double eta, std::uint64_t base_seed,
                                   int workers) {
  return p_eps_from(run_ensemble(sim, n_paths, base_seed, workers).paths, eta);
}

}  // namespace twlab
