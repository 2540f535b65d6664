#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "hm/error.hpp"
#include "hm/rho.hpp"

using namespace hm;

namespace {

constexpr double kPi = std::numbers::pi;

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

Vec v3(double a, double b, double c) {
  Vec x(3);
  x << a, b, c;
  return x;
}

struct Setup {
  LipschitzGraph g;
  Mollifier m;
  ScaleField h;
  RhoMap map;
  Setup(LipschitzGraph graph, DistanceVariant variant, double alpha = 1.0)
      : g(std::move(graph)),
        m(g.d()),
        h(g, m, variant, SoftDistanceParams::make(g.d(), alpha)),
        map(g, m, h) {}
};

LipschitzGraph sinusoid(double c0) { return LipschitzGraph::sinusoid(1, v2(c0, 0.0), v1(1.0)); }

// Central differences of rho in (x, t); row a = derivative in input coordinate a.
Mat fd_jacobian(const RhoMap& map, const Vec& x, const Vec& t, double step) {
  const int d = static_cast<int>(x.size()), n = d + static_cast<int>(t.size());
  Mat out(n, n);
  for (int a = 0; a < n; ++a) {
    Vec xp = x, xm = x, tp = t, tm = t;
    if (a < d) {
      xp(a) += step;
      xm(a) -= step;
    } else {
      tp(a - d) += step;
      tm(a - d) -= step;
    }
    out.row(a) = ((map(xp, tp) - map(xm, tm)) / (2.0 * step)).transpose();
  }
  return out;
}

}  // namespace

TEST_CASE("rho on flat graphs") {
  Setup soft(LipschitzGraph::zero(1, 3), DistanceVariant::Soft);
  Vec z = soft.map(v1(0.4), v2(0.3, -0.2));
  CHECK((z - v3(0.4, 0.3 * kPi, -0.2 * kPi)).norm() < 1e-6);

  Setup euc(LipschitzGraph::zero(1, 3), DistanceVariant::Euclidean);
  z = euc.map(v1(0.4), v2(0.3, -0.2));
  CHECK((z - v3(0.4, 0.3, -0.2)).norm() < 1e-14);
  CHECK_THROWS(euc.map(v1(0.0), v2(0.0, 0.0)));
}

TEST_CASE("rho reproduces its components") {
  Setup s(sinusoid(0.05), DistanceVariant::Soft);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  double lo = 10, hi = 0;
  for (int k = 0; k < 1000; ++k) {
    Vec x = v1(6 * uni(rng) - 3);
    double r = std::pow(2.0, -5 + 6 * uni(rng)), th = 2 * kPi * uni(rng);
    Vec t = v2(r * std::cos(th), r * std::sin(th));
    Vec z = s.map(x, t);
    Frame f = frame_at(s.g, s.m, x, r);
    double h = s.h.value(x, r);
    Vec comp = f.base + h * (t(0) * f.w[0] + t(1) * f.w[1]);
    CHECK((z - comp).norm() < 1e-12);
    double ratio = (z - eval_graph(s.g, x)).norm() / (r * h);
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
    if (k % 50 == 0) {
      double dist = euclidean_distance(s.g, z);
      CHECK(dist >= 0.9 * r * h);
    }
  }
  CHECK(lo >= 0.9);
  CHECK(hi <= 1.1);
}

TEST_CASE("jacobian bundle flat exact") {
  Setup soft(LipschitzGraph::zero(1, 3), DistanceVariant::Soft);
  JacobianBundle jb = jacobian_bundle(soft.map, v1(0.2), v2(0.3, 0.1));
  Mat expect = Mat::Identity(3, 3);
  expect(1, 1) = expect(2, 2) = kPi;
  CHECK((jb.Jac - expect).cwiseAbs().maxCoeff() < 1e-6);
  CHECK((jb.J - expect).cwiseAbs().maxCoeff() < 1e-6);
  CHECK((jb.Jprime - expect).cwiseAbs().maxCoeff() < 1e-6);
  CHECK(jb.H.cwiseAbs().maxCoeff() < 1e-6);
  CHECK(jb.M.cwiseAbs().maxCoeff() < 1e-12);
  CHECK(std::abs(jb.detJ - kPi * kPi) < 1e-5);

  Setup euc(LipschitzGraph::zero(1, 3), DistanceVariant::Euclidean);
  jb = jacobian_bundle(euc.map, v1(0.2), v2(0.3, 0.1));
  CHECK((jb.Jac - Mat::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(std::abs(jb.detJ - 1.0) < 1e-14);
}

TEST_CASE("jacobian bundle invariants on a sinusoid") {
  Setup s(sinusoid(0.05), DistanceVariant::Soft);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int k = 0; k < 12; ++k) {
    Vec x = v1(4 * uni(rng) - 2);
    double r = std::pow(2.0, -4 + 4 * uni(rng)), th = 2 * kPi * uni(rng);
    Vec t = v2(r * std::cos(th), r * std::sin(th));
    JacobianBundle jb = jacobian_bundle(s.map, x, t);
    CHECK(jb.jac_q_error() < 1e-8);
    CHECK(jb.decomposition_error() == 0.0);
    CHECK(jb.q_orthogonality_error() < 1e-10);
    double hm2 = jb.h * jb.h;
    CHECK(jb.detJ >= (1 - jb.epsilon) * hm2 * (1 - 1e-12));
    CHECK(jb.detJ <= (1 + jb.epsilon) * hm2 * (1 + 1e-12));
    CHECK(jb.epsilon < 0.2);
    CHECK(std::abs(jb.detJprime - jb.detJprime_product) < 1e-12 * hm2);

    Mat fd = fd_jacobian(s.map, x, t, 1e-3 * r);
    CHECK((jb.Jac - fd).cwiseAbs().maxCoeff() < 1e-5);
  }
}

TEST_CASE("jacobian matches chained finite differences in 2D") {
  auto g = LipschitzGraph::fourier(2, 3, 3, 0.05, 4);
  Setup s(g, DistanceVariant::Euclidean);
  Vec x = v2(0.3, -0.2);
  Vec t = v1(0.25);
  JacobianBundle jb = jacobian_bundle(s.map, x, t);
  CHECK(jb.jac_q_error() < 1e-8);
  CHECK((jb.Jac - fd_jacobian(s.map, x, t, 1e-4)).cwiseAbs().maxCoeff() < 1e-5);
}

TEST_CASE("rho inverse") {
  Setup flat(LipschitzGraph::zero(1, 3), DistanceVariant::Soft);
  InverseResult inv = rho_inverse(flat.map, v3(0.5, 0.6, -0.3));
  CHECK(std::abs(inv.x(0) - 0.5) < 1e-6);
  CHECK((inv.t - v2(0.6, -0.3) / kPi).norm() < 1e-6);
  CHECK_THROWS_AS(rho_inverse(flat.map, v3(0.5, 0.0, 0.0)), NumericalError);

  Setup s(sinusoid(0.05), DistanceVariant::Soft);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int k = 0; k < 10; ++k) {
    Vec x = v1(4 * uni(rng) - 2);
    double r = std::pow(2.0, -4 + 4 * uni(rng)), th = 2 * kPi * uni(rng);
    Vec t = v2(r * std::cos(th), r * std::sin(th));
    InverseResult back = rho_inverse(s.map, s.map(x, t));
    CHECK(std::abs(back.x(0) - x(0)) < 1e-8);
    CHECK((back.t - t).norm() < 1e-8);

    Vec Z = v3(4 * uni(rng) - 2, 2 * uni(rng) - 1, 2 * uni(rng) - 1);
    InverseResult z = rho_inverse(s.map, Z);
    CHECK((s.map(z.x, z.t) - Z).norm() <= 1e-8 * std::max(1.0, Z.norm()));
  }
}

TEST_CASE("conjugated matrix flat") {
  Setup soft(LipschitzGraph::zero(1, 3), DistanceVariant::Soft);
  ConjugatedMatrix cm = conjugated_matrix(soft.map, v1(0.1), v2(-0.2, 0.35));
  Mat expect = Mat::Identity(3, 3);
  expect(0, 0) = kPi * kPi;
  CHECK((cm.A - expect).cwiseAbs().maxCoeff() < 1e-5);
  CHECK(std::abs(cm.b - 1.0) < 1e-12);
  CHECK(std::abs(cm.f - 1.0) < 1e-6);
  CHECK(cm.C1.cwiseAbs().maxCoeff() < 1e-5);
  CHECK(cm.C2.cwiseAbs().maxCoeff() < 1e-5);
  CHECK(cm.C3.cwiseAbs().maxCoeff() < 1e-5);
  CHECK(cm.C4.cwiseAbs().maxCoeff() < 1e-5);
  CHECK((cm.reassemble() - cm.A).cwiseAbs().maxCoeff() == 0.0);

  Setup euc(LipschitzGraph::zero(1, 3), DistanceVariant::Euclidean);
  cm = conjugated_matrix(euc.map, v1(0.1), v2(-0.2, 0.35));
  CHECK((cm.A - Mat::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(std::abs(cm.b - 1.0) < 1e-14);
}

TEST_CASE("conjugated matrix on a sinusoid") {
  Vec x = v1(0.37);
  Vec t = v2(0.12, -0.21);
  double prev = 1e9;
  for (double c0 : {0.1, 0.05, 0.025}) {
    Setup s(sinusoid(c0), DistanceVariant::Soft);
    ConjugatedMatrix cm = conjugated_matrix(s.map, x, t);
    auto [lo, hi] = cm.ellipticity();
    CHECK(lo > 0.5);
    CHECK(hi < 2.0 * kPi * kPi);
    CHECK(cm.b > 0.8);
    CHECK(cm.b < 1.25);
    CHECK((cm.reassemble() - cm.A).cwiseAbs().maxCoeff() == 0.0);
    double blocks = cm.C1.norm() + cm.C2.norm() + cm.C3.norm() + cm.C4.norm();
    CHECK(blocks < prev);
    prev = blocks;
  }
}

TEST_CASE("b is smooth") {
  Setup s(sinusoid(0.05), DistanceVariant::Soft);
  Vec x = v1(0.2);
  Vec t = v2(0.3, 0.1);
  Vec g = b_gradient(s.map, x, t);
  CHECK(g.size() == 3);
  CHECK(std::abs(b_value(s.map, x, t) - conjugated_matrix(s.map, x, t).b) < 1e-14);
  CHECK(std::isfinite(g.norm()));
}
