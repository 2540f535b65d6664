#include "hm/frames.hpp"

#include <algorithm>
#include <cmath>

#include "hm/error.hpp"

namespace hm {

RawVectors raw_vectors(const SmoothedJet& jet) {
  const int d = jet.d, n = jet.n, m = n - d;
  RawVectors raw;
  for (int i = 0; i < d; ++i) raw.v.push_back(concat(unit(d, i), jet.grad_x.col(i)));
  for (int j = 0; j < m; ++j) raw.w.push_back(concat(-jet.grad_x.row(j).transpose(), unit(m, j)));
  return raw;
}

namespace {

void gram_schmidt(const std::vector<Vec>& in, std::vector<Vec>& out, std::vector<double>& norms) {
  for (const Vec& a : in) {
    Vec t = a;
    for (const Vec& q : out) t -= a.dot(q) * q;
    double nt = t.norm();
    if (nt < 1.0 - 1e-6) throw NumericalError("orthonormal_frame", "degenerate raw vectors (norm below 1)", nt);
    norms.push_back(nt);
    out.push_back(t / nt);
  }
}

}  // namespace

Frame orthonormal_frame(const RawVectors& raw, const Vec& base) {
  Frame f;
  f.d = static_cast<int>(raw.v.size());
  f.n = f.d + static_cast<int>(raw.w.size());
  f.raw = raw;
  f.base = base;
  gram_schmidt(raw.v, f.v, f.gs_norms);
  gram_schmidt(raw.w, f.w, f.gs_norms);
  f.basis = Mat(f.n, f.n);
  for (int i = 0; i < f.d; ++i) f.basis.col(i) = f.v[i];
  for (int j = 0; j < f.n - f.d; ++j) f.basis.col(f.d + j) = f.w[j];
  return f;
}

Frame frame_at(const LipschitzGraph& g, const Mollifier& m, const Vec& x, double r) {
  SmoothedJet jet = smoothed_jet(g, m, x, r);
  return orthonormal_frame(raw_vectors(jet), jet.point);
}

Vec apply_isometry(const Frame& f, const Vec& u) { return f.basis * u; }

double Frame::gram_error() const {
  return (basis.transpose() * basis - Mat::Identity(n, n)).cwiseAbs().maxCoeff();
}

double Frame::raw_cross_error() const {
  double e = 0.0;
  for (const Vec& a : raw.v)
    for (const Vec& b : raw.w) e = std::max(e, std::abs(a.dot(b)));
  return e;
}

double Frame::triangularity_error() const {
  double e = 0.0;
  for (int k = 0; k < d; ++k)
    for (int l = k + 1; l < d; ++l) e = std::max(e, std::abs(raw.v[k].dot(v[l])));
  return e;
}

std::pair<double, double> Frame::diagonal_band() const {
  double lo = 1e300, hi = -1e300;
  for (int i = 0; i < d; ++i) {
    double s = raw.v[i].dot(v[i]);
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  return {lo, hi};
}

double Frame::max_w_deviation_sq() const {
  double e = 0.0;
  for (int j = 0; j < n - d; ++j) e = std::max(e, (w[j] - unit(n, d + j)).squaredNorm());
  return e;
}

double FrameDerivatives::norm() const {
  double s = 0.0;
  for (const Mat& D : dbasis) s += D.squaredNorm();
  return std::sqrt(s);
}

FrameDerivatives frame_derivatives(const LipschitzGraph& g, const Mollifier& m, const Vec& x, double r,
                                   const FrameDerivativeOptions& opt) {
  if (!(r > 0.0)) throw std::invalid_argument("frame_derivatives: r must be positive");
  const int d = g.d();
  FrameDerivatives out;
  out.d = d;
  out.step = opt.kappa * r;
  auto basis_at = [&](int a, double delta) {
    Vec xx = x;
    double rr = r;
    if (a < d)
      xx(a) += delta;
    else
      rr += delta;
    return frame_at(g, m, xx, rr).basis;
  };
  double gap = 0.0, scale = 1e-9 / r;
  for (int a = 0; a <= d; ++a) {
    const double h = out.step;
    Mat D1 = (basis_at(a, h) - basis_at(a, -h)) / (2.0 * h);
    Mat D2 = (basis_at(a, 0.5 * h) - basis_at(a, -0.5 * h)) / h;
    Mat R = (4.0 * D2 - D1) / 3.0;
    gap = std::max(gap, (D1 - D2).norm());
    scale = std::max(scale, R.norm());
    out.dbasis.push_back(R);
  }
  // relative to the largest axis derivative
  const double worst = gap / scale;
  out.disagreement = worst;
  out.consistent = worst <= opt.tolerance;
  if (!out.consistent && opt.throw_on_disagreement)
    throw NumericalError("frame_derivatives", "Richardson extrapolation disagrees with finite differences", worst);
  return out;
}

}  // namespace hm
