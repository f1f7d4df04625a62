#include "twlab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "twlab/error.hpp"

namespace twlab {

Grid::Grid(double half_length, int points) : half_length_(half_length), points_(points) {
  if (!(half_length > 0.0) || !std::isfinite(half_length))
    throw ValidationError("grid: half_length must be positive");
  if (points < 16) throw ValidationError("grid: need at least 16 points");
  spacing_ = 2.0 * half_length / (points - 1);
  Vector w = Vector::Constant(points, spacing_);
  w[0] = w[points - 1] = 0.5 * spacing_;
  weights_ = std::make_shared<const Vector>(std::move(w));
}

Vector Grid::nodes() const {
  Vector x(points_);
  for (int k = 0; k < points_; ++k) x[k] = node(k);
  return x;
}

Field::Field(const Grid& g, int components)
    : grid(g), n(components), values(Vector::Zero(static_cast<Eigen::Index>(components) * g.points())) {}

Field::Field(const Grid& g, int components, Vector data) : grid(g), n(components), values(std::move(data)) {
  if (values.size() != static_cast<Eigen::Index>(components) * g.points())
    throw ValidationError("field: data size does not match grid");
}

namespace {
void check_same(const Field& a, const Field& b) {
  if (!(a.grid == b.grid) || a.n != b.n) throw ValidationError("field: grid or component mismatch");
}
}  // namespace

Field& Field::operator+=(const Field& o) {
  check_same(*this, o);
  values += o.values;
  return *this;
}
Field& Field::operator-=(const Field& o) {
  check_same(*this, o);
  values -= o.values;
  return *this;
}
Field& Field::operator*=(double s) {
  values *= s;
  return *this;
}
Field operator+(Field a, const Field& b) {
  a += b;
  return a;
}
Field operator-(Field a, const Field& b) {
  a -= b;
  return a;
}
Field operator*(double s, Field a) {
  a *= s;
  return a;
}
Field operator*(Field a, double s) {
  a *= s;
  return a;
}

Field diff1(const Field& u) {
  const int N = u.points();
  const double inv2h = 0.5 / u.grid.spacing();
  Field out(u.grid, u.n);
  for (int i = 0; i < u.n; ++i) {
    const double* p = u.values.data() + static_cast<std::ptrdiff_t>(i) * N;
    double* q = out.values.data() + static_cast<std::ptrdiff_t>(i) * N;
    q[0] = (-3.0 * p[0] + 4.0 * p[1] - p[2]) * inv2h;
    for (int k = 1; k < N - 1; ++k) q[k] = (p[k + 1] - p[k - 1]) * inv2h;
    q[N - 1] = (3.0 * p[N - 1] - 4.0 * p[N - 2] + p[N - 3]) * inv2h;
  }
  return out;
}

Field diff2(const Field& u) {
  const int N = u.points();
  const double h = u.grid.spacing();
  const double invh2 = 1.0 / (h * h);
  Field out(u.grid, u.n);
  for (int i = 0; i < u.n; ++i) {
    const double* p = u.values.data() + static_cast<std::ptrdiff_t>(i) * N;
    double* q = out.values.data() + static_cast<std::ptrdiff_t>(i) * N;
    q[0] = 2.0 * (p[1] - p[0]) * invh2;
    for (int k = 1; k < N - 1; ++k) q[k] = (p[k + 1] - 2.0 * p[k] + p[k - 1]) * invh2;
    q[N - 1] = 2.0 * (p[N - 2] - p[N - 1]) * invh2;
  }
  return out;
}

double inner(const Field& u, const Field& v) {
  check_same(u, v);
  const int N = u.points();
  const double h = u.grid.spacing();
  double total = 0.0;
  for (int i = 0; i < u.n; ++i) {
    const double* a = u.values.data() + static_cast<std::ptrdiff_t>(i) * N;
    const double* b = v.values.data() + static_cast<std::ptrdiff_t>(i) * N;
    double s = 0.5 * (a[0] * b[0] + a[N - 1] * b[N - 1]);
    for (int k = 1; k < N - 1; ++k) s += a[k] * b[k];
    total += h * s;
  }
  return total;
}

double l2_norm(const Field& u) { return std::sqrt(inner(u, u)); }

double h1_norm_sq(const Field& u) {
  const Field du = diff1(u);
  return inner(u, u) + inner(du, du);
}

namespace {

// Applies the uniform Catmull-Rom stencil for a displacement of `cells` grid
// cells (any real number) to every component.
Field shift_by_cells(const Field& u, double cells) {
  const int N = u.points();
  Field out(u.grid, u.n);
  const double m_floor = std::floor(cells);
  const double frac = cells - m_floor;
  const long m = static_cast<long>(m_floor);
  auto clamp = [N](long j) { return static_cast<int>(std::clamp<long>(j, 0, N - 1)); };

  if (frac == 0.0) {
    for (int i = 0; i < u.n; ++i)
      for (int k = 0; k < N; ++k) out.at(i, k) = u.at(i, clamp(k - m));
    return out;
  }
  // query at index position k - cells = (k - m - 1) + t with t = 1 - frac
  const double t = 1.0 - frac;
  const double t2 = t * t, t3 = t2 * t;
  const double w0 = 0.5 * (-t3 + 2.0 * t2 - t);
  const double w1 = 0.5 * (3.0 * t3 - 5.0 * t2 + 2.0);
  const double w2 = 0.5 * (-3.0 * t3 + 4.0 * t2 + t);
  const double w3 = 0.5 * (t3 - t2);
  for (int i = 0; i < u.n; ++i) {
    const double* p = u.values.data() + static_cast<std::ptrdiff_t>(i) * N;
    double* q = out.values.data() + static_cast<std::ptrdiff_t>(i) * N;
    const long lo = m + 2, hi = N - 3 + m;  // range where no clamping is needed
    for (int k = 0; k < N; ++k) {
      const long j = k - m - 1;
      if (k >= lo && k <= hi) {
        q[k] = w0 * p[j - 1] + w1 * p[j] + w2 * p[j + 1] + w3 * p[j + 2];
      } else {
        q[k] = w0 * p[clamp(j - 1)] + w1 * p[clamp(j)] + w2 * p[clamp(j + 1)] + w3 * p[clamp(j + 2)];
      }
    }
  }
  return out;
}

}  // namespace

Field shift(const Field& u, double gamma) {
  const double L = u.grid.half_length();
  if (!std::isfinite(gamma) || std::abs(gamma) >= L)
    throw ValidationError("shift: |gamma| must be smaller than the half-length of the grid");
  if (std::abs(gamma) > 0.5 * L) warn("shift: displacement exceeds half the window");
  if (gamma == 0.0) return u;
  return shift_by_cells(u, gamma / u.grid.spacing());
}

Field shift_cells(const Field& u, int cells) { return shift_by_cells(u, static_cast<double>(cells)); }

namespace {
template <class Fn>
Field pointwise(const Model& m, const Field& u, Fn&& fn) {
  if (u.n != m.n) throw ValidationError("model/field component mismatch");
  const int N = u.points();
  Field out(u.grid, u.n);
  std::array<double, 8> in{}, res{};
  if (m.n > 8) throw ValidationError("models with more than 8 components are not supported");
  for (int k = 0; k < N; ++k) {
    for (int i = 0; i < m.n; ++i) in[i] = u.at(i, k);
    fn(std::span<const double>(in.data(), m.n), std::span<double>(res.data(), m.n), k);
    for (int i = 0; i < m.n; ++i) out.at(i, k) = res[i];
  }
  return out;
}
}  // namespace

Field apply_reaction(const Model& m, const Field& u) {
  if (m.reaction_field && u.n == m.n) {
    Field out(u.grid, u.n);
    m.reaction_field(u.points(), u.values.data(), out.values.data());
    return out;
  }
  return pointwise(m, u, [&](auto in, auto out, int) { m.reaction(in, out); });
}

Field apply_noise(const Model& m, const Field& u) {
  if (m.noise_field && u.n == m.n) {
    Field out(u.grid, u.n);
    m.noise_field(u.points(), u.values.data(), out.values.data());
    return out;
  }
  return pointwise(m, u, [&](auto in, auto out, int) { m.noise(in, out); });
}

Field apply_reaction_hess_dir(const Model& m, const Field& u, const Field& v) {
  std::array<double, 8> dir{};
  return pointwise(m, u, [&](auto in, auto out, int k) {
    for (int i = 0; i < m.n; ++i) dir[i] = v.at(i, k);
    m.reaction_hess_dir(in, std::span<const double>(dir.data(), m.n), out);
  });
}

SparseMatrix diff1_matrix(const Grid& grid) {
  const int N = grid.points();
  const double inv2h = 0.5 / grid.spacing();
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(2 * N + 6);
  t.emplace_back(0, 0, -3.0 * inv2h);
  t.emplace_back(0, 1, 4.0 * inv2h);
  t.emplace_back(0, 2, -inv2h);
  for (int k = 1; k < N - 1; ++k) {
    t.emplace_back(k, k - 1, -inv2h);
    t.emplace_back(k, k + 1, inv2h);
  }
  t.emplace_back(N - 1, N - 1, 3.0 * inv2h);
  t.emplace_back(N - 1, N - 2, -4.0 * inv2h);
  t.emplace_back(N - 1, N - 3, inv2h);
  SparseMatrix D(N, N);
  D.setFromTriplets(t.begin(), t.end());
  return D;
}

SparseMatrix diff2_matrix(const Grid& grid) {
  const int N = grid.points();
  const double h = grid.spacing();
  const double invh2 = 1.0 / (h * h);
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(3 * N);
  t.emplace_back(0, 0, -2.0 * invh2);
  t.emplace_back(0, 1, 2.0 * invh2);
  for (int k = 1; k < N - 1; ++k) {
    t.emplace_back(k, k - 1, invh2);
    t.emplace_back(k, k, -2.0 * invh2);
    t.emplace_back(k, k + 1, invh2);
  }
  t.emplace_back(N - 1, N - 1, -2.0 * invh2);
  t.emplace_back(N - 1, N - 2, 2.0 * invh2);
  SparseMatrix D(N, N);
  D.setFromTriplets(t.begin(), t.end());
  return D;
}

void write_field_csv(const std::string& path, const Field& u, const std::string& fingerprint) {
  std::ofstream os(path);
  if (!os) throw ValidationError("cannot open '" + path + "' for writing");
  if (!fingerprint.empty()) os << "# fingerprint=" << fingerprint << '\n';
  os << "xi";
  for (int i = 0; i < u.n; ++i) os << ",c" << (i + 1);
  os << '\n' << std::setprecision(17);
  for (int k = 0; k < u.points(); ++k) {
    os << u.grid.node(k);
    for (int i = 0; i < u.n; ++i) os << ',' << u.at(i, k);
    os << '\n';
  }
}

Field read_field_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ValidationError("cannot open '" + path + "'");
  std::string line;
  std::vector<std::vector<double>> rows;
  int n = -1;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (n < 0) {
      n = static_cast<int>(std::count(line.begin(), line.end(), ','));
      continue;
    }
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (static_cast<int>(row.size()) != n + 1) throw ValidationError("field csv: ragged row in '" + path + "'");
    rows.push_back(std::move(row));
  }
  if (n <= 0 || rows.size() < 16) throw ValidationError("field csv: '" + path + "' has too few rows");
  const int N = static_cast<int>(rows.size());
  const double L = -rows.front()[0];
  Grid grid(L, N);
  Field out(grid, n);
  for (int k = 0; k < N; ++k)
    for (int i = 0; i < n; ++i) out.at(i, k) = rows[k][i + 1];
  return out;
}

}  // namespace twlab
