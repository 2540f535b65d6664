#include "hm/mollifier.hpp"

#include <cmath>
#include <stdexcept>

#include "hm/error.hpp"
#include "hm/quadrature.hpp"

namespace hm {

namespace {

double bump(double s) { return s < 1.0 ? std::exp(-1.0 / (1.0 - s)) : 0.0; }

// E(s) = exp(-1/(1-s)) and its first two s-derivatives.
void bump_derivs(double s, double& e0, double& e1, double& e2) {
  if (s >= 1.0) {
    e0 = e1 = e2 = 0.0;
    return;
  }
  double q = 1.0 - s;
  e0 = std::exp(-1.0 / q);
  e1 = -e0 / (q * q);
  e2 = e0 * (2.0 * s - 1.0) / (q * q * q * q);
}

}  // namespace

Mollifier::Mollifier(int d, MollifierOptions opt) : d_(d), opt_(opt) {
  if (d < 1 || d > 2) throw std::invalid_argument("Mollifier: d must be 1 or 2");
  if (opt_.order < 8) throw std::invalid_argument("Mollifier: order too small");
  const Rule& rule = gauss_legendre(opt_.order);
  double total = 0.0;
  if (d == 1) {
    for (std::size_t q = 0; q < rule.size(); ++q) total += rule.w[q] * bump(rule.x[q] * rule.x[q]);
  } else {
    for (std::size_t a = 0; a < rule.size(); ++a)
      for (std::size_t b = 0; b < rule.size(); ++b)
        total += rule.w[a] * rule.w[b] * bump(rule.x[a] * rule.x[a] + rule.x[b] * rule.x[b]);
  }
  c_ = 1.0 / total;
  nodes_ = build(opt_.order);
  check_nodes_ = build(opt_.order + 32);

  double hat = 0.0, grad = 0.0, hess = 0.0, kr = 0.0;
  for (const auto& nd : build(opt_.order + 32)) {
    double un = nd.u.norm();
    hat += nd.w * std::abs(nd.hat) * un;
    grad += nd.w * nd.grad.norm();
    hess += nd.w * nd.hess.norm() * un;
    kr += nd.w * nd.kr.norm() * un;
  }
  (void)grad;
  jet_constant_ = hat + hess + kr;
}

Mollifier::Node Mollifier::node(const Vec& u, double w) const {
  Node nd;
  nd.u = u;
  nd.w = w;
  double s = u.squaredNorm(), e0, e1, e2;
  bump_derivs(s, e0, e1, e2);
  nd.eta = c_ * e0;
  nd.grad = c_ * 2.0 * e1 * u;
  nd.hess = c_ * (4.0 * e2 * u * u.transpose() + 2.0 * e1 * Mat::Identity(d_, d_));
  nd.hat = -d_ * nd.eta - u.dot(nd.grad);
  nd.kr = -((d_ + 1.0) * nd.grad + nd.hess * u);
  return nd;
}

namespace {

// Shift each derivative kernel by a + b.u so that its discrete zeroth and first
// moments equal the exact ones; the rule then reproduces affine maps exactly.
void correct_moments(std::vector<Mollifier::Node>& nodes, int d) {
  double W = 0.0;
  Vec S = Vec::Zero(d);
  for (const auto& nd : nodes) {
    W += nd.w;
    S += nd.w * nd.u.cwiseProduct(nd.u);
  }
  auto fix = [&](auto get, const Vec& m1_exact) {
    double m0 = 0.0;
    Vec m1 = Vec::Zero(d);
    for (auto& nd : nodes) {
      double k = get(nd);
      m0 += nd.w * k;
      m1 += nd.w * k * nd.u;
    }
    double a = -m0 / W;
    Vec b = (m1_exact - m1).cwiseQuotient(S);
    for (auto& nd : nodes) get(nd) += a + b.dot(nd.u);
  };
  Vec zero = Vec::Zero(d);
  for (int i = 0; i < d; ++i) {
    fix([i](Mollifier::Node& nd) -> double& { return nd.grad(i); }, Vec(-unit(d, i)));
    fix([i](Mollifier::Node& nd) -> double& { return nd.kr(i); }, zero);
    for (int l = 0; l < d; ++l) fix([i, l](Mollifier::Node& nd) -> double& { return nd.hess(i, l); }, zero);
  }
  fix([](Mollifier::Node& nd) -> double& { return nd.hat; }, zero);
}

}  // namespace

std::vector<Mollifier::Node> Mollifier::build(int order) const {
  const Rule& rule = gauss_legendre(order);
  std::vector<Node> out;
  if (d_ == 1) {
    for (std::size_t q = 0; q < rule.size(); ++q) {
      Vec u(1);
      u(0) = rule.x[q];
      out.push_back(node(u, rule.w[q]));
    }
  } else {
    for (std::size_t a = 0; a < rule.size(); ++a)
      for (std::size_t b = 0; b < rule.size(); ++b) {
        Vec u(2);
        u << rule.x[a], rule.x[b];
        if (u.squaredNorm() >= 1.0) continue;
        out.push_back(node(u, rule.w[a] * rule.w[b]));
      }
  }
  correct_moments(out, d_);
  return out;
}

double Mollifier::eta(const Vec& u) const { return c_ * bump(u.squaredNorm()); }

Vec Mollifier::grad_eta(const Vec& u) const {
  double e0, e1, e2;
  bump_derivs(u.squaredNorm(), e0, e1, e2);
  return c_ * 2.0 * e1 * u;
}

double Mollifier::eta_hat(const Vec& u) const { return -d_ * eta(u) - u.dot(grad_eta(u)); }

Vec Mollifier::eta_tilde(const Vec& u) const { return -eta(u) * u; }

double Mollifier::integral_check(int order) const {
  double total = 0.0;
  for (const auto& nd : build(order)) total += nd.w * nd.eta;
  return total;
}

double SmoothedJet::hess_norm() const {
  double s = 0.0;
  for (int a = 0; a <= d; ++a)
    for (int i = 0; i < d; ++i) s += hess[a][i].squaredNorm();
  return std::sqrt(s);
}

namespace {

void accumulate(const LipschitzGraph& g, const std::vector<Mollifier::Node>& nodes, const Vec& x, double r,
                SmoothedJet& jet) {
  const int d = g.d(), m = g.codim();
  jet.phi_r = Vec::Zero(m);
  jet.grad_x = Mat::Zero(m, d);
  jet.d_r = Vec::Zero(m);
  for (int a = 0; a <= d; ++a)
    for (int i = 0; i < d; ++i) jet.hess[a][i] = Vec::Zero(m);
  for (const auto& nd : nodes) {
    Vec p = g.phi(x - r * nd.u);
    jet.phi_r += nd.w * nd.eta * p;
    for (int i = 0; i < d; ++i) jet.grad_x.col(i) += (nd.w * nd.grad(i) / r) * p;
    jet.d_r += (nd.w * nd.hat / r) * p;
    for (int i = 0; i < d; ++i) {
      for (int l = 0; l < d; ++l) jet.hess[l][i] += (nd.w * nd.hess(l, i) / (r * r)) * p;
      jet.hess[d][i] += (nd.w * nd.kr(i) / (r * r)) * p;
    }
  }
}

}  // namespace

SmoothedJet smoothed_jet(const LipschitzGraph& g, const Mollifier& m, const Vec& x, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("smoothed_jet: r must be positive");
  if (m.d() != g.d()) throw std::invalid_argument("smoothed_jet: mollifier dimension mismatch");
  SmoothedJet jet;
  jet.d = g.d();
  jet.n = g.n();
  jet.r = r;
  jet.x = x;
  accumulate(g, m.nodes(), x, r, jet);
  jet.point = concat(x, jet.phi_r);
  if (m.options().check) {
    SmoothedJet fine;
    fine.d = g.d();
    accumulate(g, m.check_nodes(), x, r, fine);
    double err = (fine.phi_r - jet.phi_r).norm() + r * (fine.grad_x - jet.grad_x).norm() +
                 r * (fine.d_r - jet.d_r).norm();
    for (int a = 0; a <= g.d(); ++a)
      for (int i = 0; i < g.d(); ++i) err += r * r * (fine.hess[a][i] - jet.hess[a][i]).norm();
    double scale = 1.0 + jet.phi_r.norm() + r * jet.grad_x.norm();
    jet.quadrature_error = err;
    if (err > m.options().tolerance * scale)
      throw NumericalError("smoothed_jet", "quadrature did not converge", err);
  }
  return jet;
}

}  // namespace hm
