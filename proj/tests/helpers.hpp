#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "twlab/detwave.hpp"
#include "twlab/grid.hpp"
#include "twlab/kinetics.hpp"

namespace testing {

inline twlab::Model fhn() { return twlab::fhn_model(0.1, 0.01, 5.0, 0.01, twlab::NoiseKind::linear_u); }

/// Wave at a coarse resolution, cached per (model name, L, N).
struct SolvedWave {
  twlab::Model model;
  twlab::Grid grid;
  twlab::WaveSolution wave;
  twlab::AdjointEigenfunction adj;
};

inline SolvedWave solve(const twlab::Model& m, double L, int N) {
  twlab::Grid g(L, N);
  const auto seed = twlab::seed_wave(m, g);
  auto w = twlab::solve_wave(m, g, seed.profile, seed.speed);
  auto adj = twlab::adjoint_eigenfunction(m, w);
  return {m, g, std::move(w), std::move(adj)};
}

inline const SolvedWave& fhn_coarse() {
  static const SolvedWave s = solve(fhn(), 60.0, 1024);
  return s;
}

inline const SolvedWave& nagumo_coarse() {
  static const SolvedWave s = solve(twlab::nagumo_model(0.1), 40.0, 512);
  return s;
}

inline twlab::Field random_field(const twlab::Grid& g, int n, unsigned seed, double amp = 1.0) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> nd(0.0, amp);
  twlab::Field f(g, n);
  for (Eigen::Index i = 0; i < f.values.size(); ++i) f.values[i] = nd(rng);
  return f;
}

/// Smooth localized bump in every component.
inline twlab::Field bump(const twlab::Grid& g, int n, double center, double width) {
  return twlab::sample(g, n, [&](int i, double x) {
    const double z = (x - center) / width;
    return (1.0 + 0.3 * i) * std::exp(-z * z);
  });
}

}  // namespace testing
