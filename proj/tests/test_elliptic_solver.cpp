#include <chrono>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "hm/error.hpp"
#include "hm/rho.hpp"
#include "hm/solver.hpp"

using namespace hm;

namespace {

Mat identity3(const Vec&, const Vec&) { return Mat::Identity(3, 3); }

Mat flat_conjugated(const Vec&, const Vec&) {
  Mat A = Mat::Identity(3, 3);
  A(0, 0) = std::numbers::pi * std::numbers::pi;
  return A;
}

WeightedGrid grid(int Nx, int Nt, int n = 3) {
  GridParams p;
  p.n = n;
  p.Nx = Nx;
  p.Nt = Nt;
  return build_grid(p);
}

Vec v2(double a, double b) {
  Vec x(2);
  x << a, b;
  return x;
}

}  // namespace

TEST_CASE("grid construction") {
  WeightedGrid g = grid(64, 64);
  CHECK(g.cells == 64 * 64 * 64);
  CHECK(g.boundary_cells == 64);
  CHECK(g.reflection_error() < 1e-14);
  for (int c = 0; c < g.cells; c += 97) CHECK(g.t_of(c).norm() > 0.0);
  GridParams bad;
  bad.Nt = 7;
  CHECK_THROWS_AS(build_grid(bad), ConfigError);
  auto t0 = std::chrono::steady_clock::now();
  DiscreteOperator op = assemble(grid(8, 8), identity3);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(secs < 1.0);
  CHECK(op.A.rows == 512);
}

TEST_CASE("operator invariants") {
  for (auto coeff : {CoefficientField(identity3), CoefficientField(flat_conjugated)}) {
    DiscreteOperator op = assemble(grid(12, 12), coeff);
    CHECK(op.conservation_error() < 1e-12);
    CHECK(op.symmetric);
    CHECK(op.diagonal_coefficients);
    CHECK(op.min_transmissibility > 0.0);
    for (double v : op.B.val) CHECK(v > 0.0);
    for (int r = 0; r < op.A.rows; ++r)
      for (long k = op.A.ptr[r]; k < op.A.ptr[r + 1]; ++k)
        if (op.A.idx[k] != r) CHECK(op.A.val[k] <= 0.0);
  }
  GridParams p2;
  p2.n = 2;
  p2.Nx = 16;
  p2.Nt = 16;
  DiscreteOperator op2 = assemble(build_grid(p2), [](const Vec&, const Vec&) { return Mat::Identity(2, 2).eval(); });
  CHECK(op2.conservation_error() < 1e-12);
  CHECK(op2.symmetric);
}

TEST_CASE("dirichlet solves on the flat weighted operator") {
  DiscreteOperator op = assemble(grid(17, 16), identity3);
  std::vector<double> one(17, 1.0), zero(17, 0.0), half(17, 0.0);
  GridSolution u1 = solve_dirichlet(op, one);
  CHECK(u1.residual <= 1e-9);
  for (double v : u1.values) CHECK(std::abs(v - 1.0) < 1e-8);
  GridSolution u0 = solve_dirichlet(op, zero);
  for (double v : u0.values) CHECK(v == 0.0);
  for (int i = 0; i < 17; ++i) half[i] = op.grid.boundary_x(i) > 1e-12 ? 1.0 : (std::abs(op.grid.boundary_x(i)) < 1e-12 ? 0.5 : 0.0);
  GridSolution uh = solve_dirichlet(op, half);
  CHECK(uh.min_value >= -1e-8);
  CHECK(uh.max_value <= 1.0 + 1e-8);
  for (int c = 0; c < op.grid.cells; ++c)
    if (std::abs(op.grid.x_of(c)(0)) < 1e-12) CHECK(std::abs(uh.values[c] - 0.5) < 2e-2);
}

TEST_CASE("harmonic measure by the adjoint") {
  for (auto coeff : {CoefficientField(identity3), CoefficientField(flat_conjugated)}) {
    DiscreteOperator op = assemble(grid(17, 16), coeff);
    int pole = op.grid.locate(0.0, v2(0.3, 0.3));
    MeasureVector w = harmonic_measure(op, pole);
    CHECK(std::abs(w.total - 1.0) < 1e-8);
    CHECK(w.clipped >= -1e-10);
    for (int i = 0; i < 17; ++i) CHECK(std::abs(w.weights[i] - w.weights[16 - i]) < 1e-8);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::vector<double> data(17);
    for (double& v : data) v = uni(rng);
    GridSolution u = solve_dirichlet(op, data);
    double pairing = 0.0;
    for (int i = 0; i < 17; ++i) pairing += w.weights[i] * data[i];
    CHECK(std::abs(pairing - u.values[pole]) < 1e-8);
  }
}

TEST_CASE("conjugated operator of a sinusoid") {
  Vec a(2);
  a << 0.05, 0.0;
  Vec f(1);
  f << 1.0;
  auto g = LipschitzGraph::sinusoid(1, a, f);
  Mollifier m(1);
  ScaleField h(g, m, DistanceVariant::Soft, SoftDistanceParams::make(1, 1.0));
  RhoMap map(g, m, h);
  CoefficientField coeff = [&](const Vec& x, const Vec& t) { return conjugated_matrix(map, x, t).A; };
  DiscreteOperator op = assemble(grid(8, 8), coeff);
  CHECK(!op.diagonal_coefficients);
  CHECK(op.min_eigenvalue > 0.0);
  CHECK(op.conservation_error() < 1e-12);
  std::vector<double> one(8, 1.0);
  GridSolution u1 = solve_dirichlet(op, one);
  for (double v : u1.values) CHECK(std::abs(v - 1.0) < 1e-8);
  int pole = op.grid.locate(0.1, v2(0.4, 0.3));
  MeasureVector w = harmonic_measure(op, pole);
  CHECK(std::abs(w.total - 1.0) < 1e-8);
  std::vector<double> data = {0, 1, 0.5, 0.2, 0.9, 0.1, 0.3, 1};
  GridSolution u = solve_dirichlet(op, data);
  double pairing = 0.0;
  for (int i = 0; i < 8; ++i) pairing += w.weights[i] * data[i];
  CHECK(std::abs(pairing - u.values[pole]) < 1e-8);
  MESSAGE("sinusoid operator: solver " << u.method << ", min weight clipped " << w.clipped);
}

TEST_CASE("parallel kernels match serial references") {
  DiscreteOperator op = assemble(grid(16, 16), flat_conjugated);
  std::vector<double> x(op.A.rows), y1(op.A.rows), y2(op.A.rows);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd;
  for (double& v : x) v = nd(rng);
  kernels::spmv(op.A, x.data(), y1.data());
  kernels::serial::spmv(op.A, x.data(), y2.data());
  for (int i = 0; i < op.A.rows; ++i) CHECK(y1[i] == y2[i]);
  CHECK(kernels::dot(x.data(), y1.data(), x.size()) == kernels::serial::dot(x.data(), y1.data(), x.size()));
  Csr T = op.A.transpose();
  CHECK(T.transpose().val == op.A.val);
}
