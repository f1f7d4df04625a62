#include <cmath>
#include <cstdio>

#include "doctest.h"
#include "helpers.hpp"
#include "twlab/error.hpp"
#include "twlab/grid.hpp"

using namespace twlab;

TEST_CASE("grid nodes are symmetric with spacing 2L/(N-1)") {
  const Grid g(10.0, 101);
  CHECK(g.spacing() == doctest::Approx(0.2));
  CHECK(g.node(0) == -10.0);
  CHECK(g.node(100) == doctest::Approx(10.0));
  for (int k = 0; k < 101; ++k) CHECK(g.node(k) == doctest::Approx(-g.node(100 - k)).scale(1.0));
  CHECK_THROWS_AS(Grid(10.0, 8), ValidationError);
}

TEST_CASE("finite differences: constants, linear and quadratic exactness") {
  const Grid g(5.0, 64);
  const Field c = sample(g, 2, [](int, double) { return 3.0; });
  CHECK(diff1(c).values.cwiseAbs().maxCoeff() < 1e-12);
  CHECK(diff2(c).values.cwiseAbs().maxCoeff() < 1e-12);
  const Field lin = sample(g, 1, [](int, double x) { return x; });
  const Field d = diff1(lin);
  for (int k = 0; k < g.points(); ++k) CHECK(std::abs(d.at(0, k) - 1.0) < 1e-12);
  const Field q = sample(g, 1, [](int, double x) { return x * x; });
  const Field dq = diff1(q), d2q = diff2(q);
  for (int k = 0; k < g.points(); ++k) CHECK(std::abs(dq.at(0, k) - 2 * g.node(k)) < 1e-10);
  for (int k = 1; k + 1 < g.points(); ++k) CHECK(std::abs(d2q.at(0, k) - 2.0) < 1e-9);
}

TEST_CASE("finite differences converge at second order") {
  double err[2];
  for (int r = 0; r < 2; ++r) {
    const Grid g(8.0, 200 * (r + 1));
    const Field u = sample(g, 1, [](int, double x) { return std::exp(-x * x) * std::sin(x); });
    const Field d = diff1(u);
    double e = 0;
    for (int k = 0; k < g.points(); ++k) {
      const double x = g.node(k);
      e = std::max(e, std::abs(d.at(0, k) - std::exp(-x * x) * (std::cos(x) - 2 * x * std::sin(x))));
    }
    err[r] = e;
  }
  CHECK(err[0] / err[1] == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("sparse derivative matrices match the field operators") {
  const Grid g(6.0, 50);
  const Field u = testing::random_field(g, 1, 11);
  const Vector d1 = diff1_matrix(g) * u.values;
  const Vector d2 = diff2_matrix(g) * u.values;
  CHECK((d1 - diff1(u).values).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((d2 - diff2(u).values).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("trapezoid inner product and norms") {
  const Grid g(20.0, 2001);
  const Field u = sample(g, 1, [](int, double x) { return std::exp(-x * x / 2); });
  CHECK(inner(u, u) == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-10));
  CHECK(l2_norm(u) == doctest::Approx(std::pow(M_PI, 0.25)).epsilon(1e-10));
  // |u'|^2 integrates to sqrt(pi)/2
  CHECK(h1_norm_sq(u) == doctest::Approx(1.5 * std::sqrt(M_PI)).epsilon(1e-4));
  const Field v = testing::random_field(g, 1, 5);
  CHECK(inner(u, v) == doctest::Approx(inner(v, u)));
}

TEST_CASE("shift composes and is undone by the opposite shift") {
  const Grid g(30.0, 1201);
  const Field u = testing::bump(g, 2, 1.0, 2.0);
  const Field exact = testing::bump(g, 2, 1.7, 2.0);
  CHECK((shift(u, 0.7).values - exact.values).cwiseAbs().maxCoeff() < 1e-5);
  CHECK((shift(shift(u, 0.3), 0.4).values - shift(u, 0.7).values).cwiseAbs().maxCoeff() < 1e-5);
  CHECK((shift(shift(u, 1.3), -1.3).values - u.values).cwiseAbs().maxCoeff() < 1e-5);
  CHECK((shift(u, 0.0).values - u.values).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(shift(u, 30.0), ValidationError);
}

TEST_CASE("whole-cell shift is exact") {
  const Grid g(10.0, 101);
  const Field u = testing::random_field(g, 2, 3);
  const Field s = shift_cells(u, 4);
  for (int i = 0; i < 2; ++i)
    for (int k = 4; k < 101; ++k) CHECK(s.at(i, k) == u.at(i, k - 4));
  const Field b = shift_cells(s, -4);
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 97; ++k) CHECK(b.at(i, k) == u.at(i, k));
  CHECK((shift(u, 4 * g.spacing()).values - s.values).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("field CSV round trip") {
  const Grid g(4.0, 33);
  const Field u = testing::random_field(g, 2, 9);
  const std::string path = "grid_roundtrip.csv";
  write_field_csv(path, u, "abc");
  const Field r = read_field_csv(path);
  std::remove(path.c_str());
  CHECK(r.n == 2);
  CHECK(r.grid == g);
  CHECK((r.values - u.values).cwiseAbs().maxCoeff() < 1e-15);
}
