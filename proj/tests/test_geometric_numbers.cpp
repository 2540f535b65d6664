#include <cmath>
#include <random>

#include "doctest.h"
#include "hm/numbers.hpp"
#include "hm/transport.hpp"

using namespace hm;

namespace {

Vec v1(double a) {
  Vec x(1);
  x << a;
  return x;
}

Vec v2(double a, double b) {
  Vec x(2);
  x << a, b;
  return x;
}

// Dense tableau simplex with Bland's rule for max c^T g, A g <= b, g >= 0, b >= 0.
double simplex_max(const std::vector<std::vector<double>>& A, const std::vector<double>& b,
                   const std::vector<double>& c) {
  const int m = static_cast<int>(A.size()), n = static_cast<int>(c.size());
  std::vector<std::vector<double>> T(m + 1, std::vector<double>(n + m + 1, 0.0));
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) T[i][j] = A[i][j];
    T[i][n + i] = 1.0;
    T[i][n + m] = b[i];
  }
  for (int j = 0; j < n; ++j) T[m][j] = -c[j];
  std::vector<int> basis(m);
  for (int i = 0; i < m; ++i) basis[i] = n + i;
  for (int it = 0; it < 100000; ++it) {
    int col = -1;
    for (int j = 0; j < n + m; ++j)
      if (T[m][j] < -1e-13) {
        col = j;
        break;
      }
    if (col < 0) break;
    int row = -1;
    double best = 0.0;
    for (int i = 0; i < m; ++i)
      if (T[i][col] > 1e-13) {
        double ratio = T[i][n + m] / T[i][col];
        if (row < 0 || ratio < best - 1e-15 || (std::abs(ratio - best) <= 1e-15 && basis[i] < basis[row]))
          row = i, best = ratio;
      }
    REQUIRE(row >= 0);
    double piv = T[row][col];
    for (double& v : T[row]) v /= piv;
    for (int i = 0; i <= m; ++i)
      if (i != row && T[i][col] != 0.0) {
        double f = T[i][col];
        for (int j = 0; j <= n + m; ++j) T[i][j] -= f * T[row][j];
      }
    basis[row] = col;
  }
  return T[m][n + m];
}

// sup sum c_i f_i with |f_i - f_j| <= |p_i - p_j|, |f_i| <= b_i, via g = f + b >= 0.
double lp_oracle(const TransportProblem& tp) {
  const int N = static_cast<int>(tp.points.size());
  std::vector<std::vector<double>> A;
  std::vector<double> rhs;
  for (int i = 0; i < N; ++i) {
    std::vector<double> row(N, 0.0);
    row[i] = 1.0;
    A.push_back(row);
    rhs.push_back(2.0 * tp.bound[i]);
    for (int j = 0; j < N; ++j) {
      if (i == j) continue;
      std::vector<double> r2(N, 0.0);
      r2[i] = 1.0;
      r2[j] = -1.0;
      A.push_back(r2);
      rhs.push_back((tp.points[i] - tp.points[j]).norm() + tp.bound[i] - tp.bound[j]);
    }
  }
  double shift = 0.0;
  for (int i = 0; i < N; ++i) shift += tp.coeff[i] * tp.bound[i];
  return simplex_max(A, rhs, tp.coeff) - shift;
}

DiscreteMeasure scaled(DiscreteMeasure m, double s) {
  for (double& w : m.weights) w *= s;
  return m;
}

}  // namespace

TEST_CASE("transport dual matches the primal simplex") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    TransportProblem tp;
    int N = 4 + trial % 8;
    for (int i = 0; i < N; ++i) {
      Vec p = v2(uni(rng), uni(rng)) * 0.7;
      tp.points.push_back(p);
      tp.coeff.push_back(uni(rng));
      tp.bound.push_back(std::max(0.0, 1.0 - p.norm()));
    }
    double oracle = lp_oracle(tp);
    TransportSolution sol = solve_transport(tp);
    CHECK(std::abs(sol.value - oracle) < 1e-10 * (1.0 + std::abs(oracle)));
  }
}

TEST_CASE("wasserstein basics") {
  auto g = LipschitzGraph::zero(1, 2);
  Vec z = v2(0.1, 0.0);
  double r = 0.8;
  DiscreteMeasure sigma = graph_atoms(g, z, r, r / 64);
  CHECK(sigma.min_weight() >= 0.0);
  CHECK(sigma.patch_excess(z, r) <= 0.0);
  CHECK(wasserstein_distance(1, z, r, sigma, sigma) == 0.0);

  double coarse = wasserstein_distance(1, z, r, scaled(sigma, 2.0), sigma);
  DiscreteMeasure fine = graph_atoms(g, z, r, r / 128);
  double finer = wasserstein_distance(1, z, r, scaled(fine, 2.0), fine);
  CHECK(std::abs(coarse - 1.0) < 0.05);
  CHECK(std::abs(finer - 1.0) < 0.05);
  CHECK(std::abs(finer - 1.0) <= std::abs(coarse - 1.0) + 1e-12);

  // tent closed form: sum_i (r - |p_i - z|) w_i / r^2
  double tent = 0.0;
  for (size_t i = 0; i < fine.points.size(); ++i) tent += (r - (fine.points[i] - z).norm()) * fine.weights[i];
  CHECK(std::abs(finer - tent / (r * r)) < 1e-12);
}

TEST_CASE("wasserstein triangle inequality") {
  auto g = LipschitzGraph::sinusoid(1, v1(0.1), v1(2.0));
  Vec z = eval_graph(g, v1(0.2));
  double r = 1.0, s = r / 24;
  DiscreteMeasure sigma = graph_atoms(g, z, r, s);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    auto make = [&]() {
      FlatMeasure mu;
      double th = 0.3 * (uni(rng) - 0.5);
      mu.point = z + v2(0.0, 0.1 * (uni(rng) - 0.5));
      mu.frame = Mat(2, 1);
      mu.frame << std::cos(th), std::sin(th);
      mu.c = 0.7 + 0.6 * uni(rng);
      return flat_atoms(g, mu, z, r, s);
    };
    DiscreteMeasure a = make(), b = make();
    double ab = wasserstein_distance(1, z, r, a, b);
    double as = wasserstein_distance(1, z, r, a, sigma);
    double sb = wasserstein_distance(1, z, r, sigma, b);
    CHECK(ab <= as + sb + 1e-12);
    CHECK(std::abs(ab - wasserstein_distance(1, z, r, b, a)) < 1e-12);
  }
}

TEST_CASE("flat measure structure") {
  auto g = LipschitzGraph::zero(2, 4);
  Mollifier m(2);
  DensityBump bump(2);
  FlatMeasure mu = replacement_measure(g, m, bump, v2(0.1, 0.2), 0.5);
  CHECK(mu.frame_error() < 1e-10);
  CHECK(mu.c > 0.0);
  Mat N = mu.normal();
  CHECK((mu.frame.transpose() * N).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((N.transpose() * N - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("alpha numbers on flat graphs") {
  for (auto [d, n] : {std::pair{1, 2}, std::pair{1, 3}, std::pair{2, 3}}) {
    auto g = LipschitzGraph::zero(d, n);
    Mollifier m(d);
    AlphaOptions opt;
    opt.atoms_per_radius = d == 1 ? 32 : 6;
    AlphaResult a = alpha_number(g, m, Vec::Zero(d), 0.25, opt);
    CHECK(a.value < 1e-6);
    opt.sigma_scale = 1.5;
    AlphaResult b = alpha_number(g, m, Vec::Zero(d), 0.25, opt);
    CHECK(b.value < 1e-3);
    CHECK(std::abs(b.best.c - 1.5) < 1e-2);
  }
}

TEST_CASE("alpha monotonicity under nesting") {
  auto g = LipschitzGraph::sinusoid(1, v2(0.1, 0.05), v1(1.5));
  Mollifier m(1);
  Vec z = eval_graph(g, v1(0.0));
  double R = 1.0;
  AlphaOptions opt;
  opt.spacing = R / 32;
  AlphaResult big = alpha_tilde(g, m, z, R, opt);
  CHECK(big.value <= big.seed_value);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  AlphaOptions small = opt;
  small.extra_seeds = {big.best};
  for (int k = 0; k < 4; ++k) {
    double s = R * (0.4 + 0.5 * uni(rng));
    Vec y = eval_graph(g, v1((R - s) * (2 * uni(rng) - 1) * 0.9));
    if ((y - z).norm() + s > R) continue;
    AlphaResult a = alpha_tilde(g, m, y, s, small);
    CHECK(a.value <= std::pow(R / s, 2) * big.value * (1 + 1e-12));
  }
}

TEST_CASE("beta numbers") {
  Mat slope(1, 1);
  slope << 0.3;
  auto aff = LipschitzGraph::affine(slope, v1(0.2));
  Mollifier m(1);
  CHECK(beta_number(aff, v1(0.4), 0.7) < 1e-9);
  CHECK(beta_eta_number(aff, m, v1(0.4), 0.7) < 1e-10);

  auto corner = LipschitzGraph::corner(v1(0.2));
  double b = beta_number(corner, v1(0.0), 1.0);
  // exhaustive oracle over (slope, offset)
  double oracle = 1e9;
  std::vector<Vec> ys = beta_samples(corner, v1(0.0), 1.0, 1025);
  for (int i = -100; i <= 100; ++i)
    for (int j = 0; j <= 200; ++j) {
      double L = 0.002 * i, c = 0.001 * j, worst = 0.0;
      for (const Vec& y : ys) worst = std::max(worst, std::abs(0.2 * std::abs(y(0)) - c - L * y(0)));
      oracle = std::min(oracle, worst);
    }
  CHECK(std::abs(oracle - 0.1) < 1e-12);
  CHECK(std::abs(b - 0.1) < 1e-8);
  double be = beta_eta_number(corner, m, v1(0.0), 1.0);
  CHECK(be >= 0.1 - 1e-12);
  CHECK(be <= 0.3);
  MESSAGE("corner beta_eta / beta = " << be / b);

  double A = 0.05, w = 1.0, r = 0.1;
  auto sn = LipschitzGraph::sinusoid(1, v1(A), v1(w));
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> uni(-3.0, 3.0);
  for (int k = 0; k < 10; ++k)
    CHECK(beta_number(sn, v1(uni(rng)), r) <= A * (w * r) * (w * r) / (2 * r) * 1.1);
  CHECK(beta_number(sn, v1(0.0), 0.5) <= sn.c0());
}

TEST_CASE("beta_eta dominates beta") {
  auto g = LipschitzGraph::fourier(1, 3, 4, 0.1, 7);
  Mollifier m(1);
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  BetaOptions opt;
  opt.samples = 129;
  double ratio = 0.0;
  for (int k = 0; k < 1000; ++k) {
    Vec x = v1(8 * uni(rng) - 4);
    double r = std::pow(2.0, -4 + 6 * uni(rng));
    double b = beta_number(g, x, r, opt), be = beta_eta_number(g, m, x, r, opt);
    CHECK(be >= b * (1 - 1e-9) - 1e-14);
    if (b > 1e-6) ratio = std::max(ratio, be / b);
  }
  MESSAGE("max beta_eta / beta = " << ratio);
  CHECK(ratio < 10.0);
}

TEST_CASE("beta in two dimensions") {
  Mat slope(2, 2);
  slope << 0.1, -0.2, 0.05, 0.1;
  auto aff = LipschitzGraph::affine(slope, v2(0.1, 0.0));
  CHECK(beta_number(aff, v2(0.3, 0.1), 0.5) < 1e-8);
  auto g = LipschitzGraph::fourier(2, 3, 3, 0.1, 1);
  double b = beta_number(g, v2(0.0, 0.0), 0.5);
  CHECK(b > 0.0);
  CHECK(b <= g.c0());
}

TEST_CASE("a series") {
  auto flat = LipschitzGraph::zero(1, 2);
  Mollifier m(1);
  AlphaOptions opt;
  opt.atoms_per_radius = 24;
  SeriesResult f = a_series(flat, m, v1(0.0), 0.25, 1.0, 2, opt);
  CHECK(f.value < 1e-6);

  auto g = LipschitzGraph::sinusoid(1, v1(0.05), v1(1.0));
  SeriesResult s = a_series(g, m, v1(0.3), 0.05, 1.0, 8, opt);
  REQUIRE(s.terms.size() == 9);
  CHECK(s.value >= s.terms[0]);
  double resum = 0.0;
  for (int k = 0; k <= 8; ++k) resum += std::pow(2.0, -k) * alpha_number(g, m, v1(0.3), 0.05 * std::ldexp(1.0, k), opt).value;
  CHECK(std::abs(resum - s.value) < 1e-12);
  CHECK(s.tail_bound >= 0.0);
}

TEST_CASE("replacement and plane residual constants") {
  auto g = LipschitzGraph::sinusoid(1, v1(0.05), v1(1.0));
  Mollifier m(1);
  auto p = SoftDistanceParams::make(1, 1.0);
  AlphaOptions opt;
  opt.atoms_per_radius = 24;
  double worst = 0.0, worst_d = 0.0;
  for (double x : {-0.8, 0.1, 0.7}) {
    double r = 0.5;
    double a = alpha_number(g, m, v1(x), r, opt).value;
    double rep = replacement_distance(g, m, v1(x), r, opt);
    worst = std::max(worst, rep / a);
    SeriesResult s = a_series(g, m, v1(x), r, 1.0, 3, opt);
    Vec z = eval_graph(g, v1(x)) + Vec::Unit(2, 1) * r;
    worst_d = std::max(worst_d, plane_residual(g, m, p, v1(x), r, z) / s.value);
  }
  MESSAGE("replacement constant " << worst << ", plane residual constant " << worst_d);
  CHECK(worst < 50.0);
  CHECK(std::isfinite(worst_d));
}
