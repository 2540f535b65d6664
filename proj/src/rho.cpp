#include "hm/rho.hpp"

#include <algorithm>
#include <cmath>

#include "hm/error.hpp"

namespace hm {

RhoMap::RhoMap(const LipschitzGraph& g, const Mollifier& m, const ScaleField& h, FrameDerivativeOptions fd)
    : g_(g), m_(m), h_(h), fd_(fd) {}

Vec RhoMap::operator()(const Vec& x, const Vec& t) const {
  const double r = t.norm();
  if (!(r > 0.0)) throw std::invalid_argument("rho: t must be nonzero");
  Frame f = frame_at(g_, m_, x, r);
  const int d = g_.d();
  Vec u = Vec::Zero(g_.n());
  u.tail(g_.n() - d) = t;
  return f.base + h_.value(x, r) * apply_isometry(f, u);
}

double RhoMap::distance(const Vec& X) const {
  return distance_function(g_, m_, h_.variant(), h_.params(), X);
}

Vec rho(const RhoMap& map, const Vec& x, const Vec& t) { return map(x, t); }

double JacobianBundle::q_orthogonality_error() const {
  return (Q.transpose() * Q - Mat::Identity(n, n)).cwiseAbs().maxCoeff();
}

JacobianBundle jacobian_bundle(const RhoMap& map, const Vec& x, const Vec& t) {
  const LipschitzGraph& g = map.graph();
  const int d = g.d(), n = g.n(), m = n - d;
  const double r = t.norm();
  if (!(r > 0.0)) throw std::invalid_argument("jacobian_bundle: t must be nonzero");
  JacobianBundle jb;
  jb.d = d;
  jb.n = n;
  jb.jet = smoothed_jet(g, map.mollifier(), x, r);
  jb.frame = orthonormal_frame(raw_vectors(jb.jet), jb.jet.point);
  FrameDerivatives fd = frame_derivatives(g, map.mollifier(), x, r, map.fd_options());
  jb.h = map.scale().value(x, r);
  jb.grad_h = map.scale().gradient(x, t);
  const Frame& F = jb.frame;
  const double h = jb.h;

  Vec sum_w = Vec::Zero(n);
  for (int j = 0; j < m; ++j) sum_w += t(j) * F.w[j];
  // dW[a] = sum_j t_j d_a w^j, a = x_1..x_d, r.
  std::vector<Vec> dW(d + 1, Vec::Zero(n));
  for (int a = 0; a <= d; ++a)
    for (int j = 0; j < m; ++j) dW[a] += t(j) * fd.dw(a, j);
  Vec drPhi = Vec::Zero(n);
  drPhi.tail(m) = jb.jet.d_r;

  jb.Jac = Mat(n, n);
  for (int k = 0; k < d; ++k)
    jb.Jac.row(k) = (F.raw.v[k] + jb.grad_h(k) * sum_w + h * dW[k]).transpose();
  for (int k = 0; k < m; ++k) {
    double s = t(k) / r;
    jb.Jac.row(d + k) = (s * drPhi + h * F.w[k] + jb.grad_h(d + k) * sum_w + s * h * dW[d]).transpose();
  }
  jb.Q = F.basis;

  jb.Jprime = Mat::Zero(n, n);
  for (int k = 0; k < d; ++k)
    for (int l = 0; l < d; ++l) jb.Jprime(k, l) = F.raw.v[k].dot(F.v[l]);
  for (int k = d; k < n; ++k) jb.Jprime(k, k) = h;

  jb.H = Mat::Zero(n, n);
  for (int k = 0; k < n; ++k)
    for (int l = d; l < n; ++l) jb.H(k, l) = t(l - d) * jb.grad_h(k);

  jb.M = Mat(n, n);
  for (int l = 0; l < n; ++l) {
    const Vec& e = l < d ? F.v[l] : F.w[l - d];
    for (int k = 0; k < d; ++k) jb.M(k, l) = h * dW[k].dot(e);
    for (int k = d; k < n; ++k) jb.M(k, l) = (t(k - d) / r) * (drPhi.dot(e) + h * dW[d].dot(e));
  }
  jb.J = jb.Jprime + jb.H + jb.M;

  jb.Jpp = Mat::Identity(n, n);
  for (int k = d; k < n; ++k) jb.Jpp(k, k) = h;
  jb.detJ = jb.J.determinant();
  jb.detJprime = jb.Jprime.determinant();
  double prod = std::pow(h, m);
  for (int i = 0; i < d; ++i) prod *= F.raw.v[i].dot(F.v[i]);
  jb.detJprime_product = prod;
  jb.epsilon = std::abs(jb.detJ / std::pow(h, m) - 1.0);
  return jb;
}

InverseResult rho_inverse(const RhoMap& map, const Vec& Z, const InverseOptions& opt) {
  const LipschitzGraph& g = map.graph();
  const int d = g.d(), n = g.n(), m = n - d;
  Vec foot;
  double delta = euclidean_distance(g, Z, &foot);
  if (!(delta > 0.0)) throw NumericalError("rho_inverse", "point lies on the graph");
  const double scale = std::max(1.0, Z.norm());

  // Initial guess from the nearest point: |t| ~ dist / h, direction from the normal frame.
  Vec x = foot;
  double r = delta;
  for (int it = 0; it < 3; ++it) r = delta / map.scale().value(x, r);
  Frame f0 = frame_at(g, map.mollifier(), x, r);
  double h0 = map.scale().value(x, r);
  Vec t(m);
  for (int j = 0; j < m; ++j) t(j) = (Z - f0.base).dot(f0.w[j]) / h0;
  if (t.norm() == 0.0) t = r * unit(m, 0);
  const double C = 2.0 * std::max(h0, 1.0 / h0);
  const double t_lo = delta / (2.0 * C), t_hi = 2.0 * C * delta;

  InverseResult res;
  Vec F = map(x, t) - Z;
  double fn = F.norm();
  int it = 0;
  for (; it < opt.max_iterations && fn > opt.target * scale; ++it) {
    JacobianBundle jb = jacobian_bundle(map, x, t);
    Vec step = jb.Jac.transpose().partialPivLu().solve(-F);
    double lam = 1.0;
    bool accepted = false;
    for (int b = 0; b < 30; ++b) {
      Vec xn = x + lam * step.head(d);
      Vec tn = t + lam * step.tail(m);
      double tr = tn.norm();
      if (tr < t_lo || tr > t_hi) {
        lam *= 0.5;
        continue;
      }
      Vec Fn = map(xn, tn) - Z;
      if (Fn.norm() < fn) {
        x = xn;
        t = tn;
        F = Fn;
        fn = Fn.norm();
        accepted = true;
        break;
      }
      lam *= 0.5;
    }
    if (!accepted) break;
  }
  res.x = x;
  res.t = t;
  res.residual = fn;
  res.iterations = it;
  if (fn > opt.tolerance * scale)
    throw NumericalError("rho_inverse", "Newton iteration did not converge", fn);
  return res;
}

Mat ConjugatedMatrix::reassemble() const {
  Mat out(n, n);
  const int m = n - d;
  out.topLeftCorner(d, d) = A1 + C1;
  out.topRightCorner(d, m) = C2;
  out.bottomLeftCorner(m, d) = C3;
  out.bottomRightCorner(m, m) = b * Mat::Identity(m, m) + C4;
  return out;
}

std::pair<double, double> ConjugatedMatrix::ellipticity() const {
  Mat S = 0.5 * (A + A.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(S);
  return {es.eigenvalues()(0), es.eigenvalues()(n - 1)};
}

ConjugatedMatrix conjugated_matrix(const RhoMap& map, const JacobianBundle& jb, const Vec& t) {
  const int d = jb.d, n = jb.n, m = n - d;
  const double r = t.norm();
  if (std::abs(jb.detJ) < 1e-12 * std::pow(jb.h, m))
    throw NumericalError("conjugated_matrix", "Jacobian is singular", jb.detJ);
  ConjugatedMatrix cm;
  cm.d = d;
  cm.n = n;
  Vec Zp = map(jb.jet.x, t);
  double D = map.distance(Zp);
  cm.dist_ratio = r / D - 1.0;
  cm.f = std::pow(r / D, m - 1);
  Mat Jinv = jb.J.inverse();
  cm.A = cm.f * std::abs(jb.detJ) * Jinv.transpose() * Jinv;
  Mat J1 = jb.Jprime.topLeftCorner(d, d);
  Mat J1inv = J1.inverse();
  cm.A1 = jb.detJprime * J1inv.transpose() * J1inv;
  cm.b = std::pow(jb.h, m - 2) * J1.determinant();
  cm.C1 = cm.A.topLeftCorner(d, d) - cm.A1;
  cm.C2 = cm.A.topRightCorner(d, m);
  cm.C3 = cm.A.bottomLeftCorner(m, d);
  cm.C4 = cm.A.bottomRightCorner(m, m) - cm.b * Mat::Identity(m, m);
  return cm;
}

ConjugatedMatrix conjugated_matrix(const RhoMap& map, const Vec& x, const Vec& t) {
  return conjugated_matrix(map, jacobian_bundle(map, x, t), t);
}

double b_value(const RhoMap& map, const Vec& x, const Vec& t) {
  const LipschitzGraph& g = map.graph();
  const double r = t.norm();
  Frame f = frame_at(g, map.mollifier(), x, r);
  double det = 1.0;
  for (int i = 0; i < g.d(); ++i) det *= f.raw.v[i].dot(f.v[i]);
  return std::pow(map.scale().value(x, r), g.codim() - 2) * det;
}

Vec b_gradient(const RhoMap& map, const Vec& x, const Vec& t, double kappa) {
  const int d = map.graph().d(), n = map.graph().n();
  const double step = kappa * t.norm();
  Vec grad(n);
  for (int a = 0; a < n; ++a) {
    Vec xp = x, xm = x, tp = t, tm = t;
    if (a < d) {
      xp(a) += step;
      xm(a) -= step;
    } else {
      tp(a - d) += step;
      tm(a - d) -= step;
    }
    grad(a) = (b_value(map, xp, tp) - b_value(map, xm, tm)) / (2.0 * step);
  }
  return grad;
}

}  // namespace hm
