#include "hm/distance.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "hm/error.hpp"
#include "hm/quadrature.hpp"

namespace hm {

double sphere_area(int d) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
}

double normalizing_constant(int d, double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("normalizing_constant: alpha must be positive");
  boost::math::quadrature::tanh_sinh<double> ts;
  const double e = 0.5 * (d + alpha);
  auto inner = [&](double s) { return std::pow(s, d - 1) * std::pow(1.0 + s * s, -e); };
  // rho > 1 folded onto (0,1] by rho = 1/s.
  auto outer = [&](double s) { return std::pow(s, alpha - 1.0) * std::pow(1.0 + s * s, -e); };
  double a = ts.integrate(inner, 0.0, 1.0, 1e-15);
  double b = ts.integrate(outer, 0.0, 1.0, 1e-15);
  return sphere_area(d) * (a + b);
}

SoftDistanceParams SoftDistanceParams::make(int d, double alpha) {
  SoftDistanceParams p;
  p.alpha = alpha;
  p.c_alpha = normalizing_constant(d, alpha);
  return p;
}

namespace {

AdaptiveResult near_field(const LipschitzGraph& g, const SoftDistanceParams& p, const Vec& X, double ell,
                          double R) {
  const int d = g.d();
  const double expo = -0.5 * (d + p.alpha);
  std::vector<double> radial = geometric_edges(p.first_panel * ell, R);
  auto integrand = [&](const Vec& y) {
    return std::pow((X - eval_graph(g, y)).squaredNorm(), expo) * surface_density(g, y);
  };
  if (d == 1) {
    const double x0 = X(0);
    std::vector<double> edges;
    for (double e : radial) {
      edges.push_back(x0 - e);
      edges.push_back(x0 + e);
    }
    for (double b : g.breakpoints())
      if (std::abs(b - x0) < R) edges.push_back(b);
    Vec y(1);
    return adaptive_panels(
        [&](double s) {
          y(0) = s;
          return integrand(y);
        },
        edges, p.order, p.tolerance);
  }
  const int M = p.angular;
  return adaptive_panels(
      [&](double rho) {
        double s = 0.0;
        for (int a = 0; a < M; ++a) {
          double th = 2.0 * std::numbers::pi * (a + 0.5) / M;
          Vec y = X.head(2);
          y(0) += rho * std::cos(th);
          y(1) += rho * std::sin(th);
          s += integrand(y);
        }
        return rho * (2.0 * std::numbers::pi / M) * s;
      },
      radial, p.order, p.tolerance);
}

// Integral over |y - x0| > R of the tangent-plane surrogate, with v = (R/rho)^alpha.
double tangent_tail(const SmoothedJet& jet, const SoftDistanceParams& p, const Vec& X, double R) {
  const int d = jet.d;
  const double alpha = p.alpha, expo = -0.5 * (d + alpha);
  Mat G = jet.grad_x;
  double density = std::sqrt((Mat::Identity(d, d) + G.transpose() * G).determinant());
  Vec x0 = X.head(d);
  auto plane = [&](const Vec& y) { return concat(y, Vec(jet.phi_r + G * (y - jet.x))); };
  const Rule& rule = gauss_legendre(p.tail_order);
  std::vector<Vec> dirs;
  std::vector<double> dw;
  if (d == 1) {
    dirs = {unit(1, 0), Vec(-unit(1, 0))};
    dw = {1.0, 1.0};
  } else {
    for (int a = 0; a < p.angular; ++a) {
      double th = 2.0 * std::numbers::pi * (a + 0.5) / p.angular;
      Vec e(2);
      e << std::cos(th), std::sin(th);
      dirs.push_back(e);
      dw.push_back(2.0 * std::numbers::pi / p.angular);
    }
  }
  double total = 0.0;
  for (std::size_t k = 0; k < dirs.size(); ++k)
    for (std::size_t q = 0; q < rule.size(); ++q) {
      double v = 0.5 * (rule.x[q] + 1.0), wv = 0.5 * rule.w[q];
      double rho = R * std::pow(v, -1.0 / alpha);
      double jac = (R / alpha) * std::pow(v, -1.0 / alpha - 1.0);
      Vec y = x0 + rho * dirs[k];
      total += dw[k] * wv * jac * std::pow(rho, d - 1) * std::pow((X - plane(y)).squaredNorm(), expo);
    }
  return density * total;
}

}  // namespace

SoftDistanceResult d_alpha_detail(const LipschitzGraph& g, const Mollifier& m, const SoftDistanceParams& p,
                                  const Vec& X) {
  const int d = g.d();
  Vec x0 = X.head(d);
  double ell = (X.tail(g.codim()) - g.phi(x0)).norm();
  if (!(ell > 0.0)) throw NumericalError("d_alpha", "point lies on the graph");
  const double R = p.tail_radius * ell;
  SoftDistanceResult res;
  AdaptiveResult near = near_field(g, p, X, ell, R);
  res.near = near.value;
  res.tail = tangent_tail(smoothed_jet(g, m, x0, ell), p, X, R);
  double total = res.near + res.tail;
  res.error_estimate = near.error / total;
  res.tail_fraction = res.tail / total;
  if (res.error_estimate > p.tolerance)
    throw NumericalError("d_alpha", "near-field quadrature did not converge", res.error_estimate);
  res.value = std::pow(total, -1.0 / p.alpha);
  return res;
}

double d_alpha(const LipschitzGraph& g, const Mollifier& m, const SoftDistanceParams& p, const Vec& X) {
  return d_alpha_detail(g, m, p, X).value;
}

DensityBump::DensityBump(int d) : d_(d) {
  // theta = 1 on [0, 1/2], exact there; transition by composite Gauss.
  Rule rule = composite_rule(0.5, 1.0, 32, 8);
  double s = std::pow(0.5, d) / d;
  for (std::size_t q = 0; q < rule.size(); ++q) s += rule.w[q] * profile(rule.x[q]) * std::pow(rule.x[q], d - 1);
  a0_ = sphere_area(d) * s;
}

double DensityBump::profile(double s) const {
  if (s <= 0.5) return 1.0;
  if (s >= 1.0) return 0.0;
  double u = 2.0 * (s - 0.5);
  double a = std::exp(-1.0 / (1.0 - u)), b = std::exp(-1.0 / u);
  return a / (a + b);
}

double DensityBump::a0_check() const {
  auto f = [&](double s) { return profile(s) * std::pow(s, d_ - 1); };
  double err = 0.0;
  double v = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.5, 1.0, 20, 1e-14, &err);
  return sphere_area(d_) * (v + std::pow(0.5, d_) / d_);
}

double lambda_density(const LipschitzGraph& g, const DensityBump& bump, const SmoothedJet& jet,
                      const LambdaOptions& opt) {
  const int d = g.d();
  const double r = jet.r;
  const Vec& c = jet.point;
  auto integrand = [&](const Vec& y) {
    double th = bump((c - eval_graph(g, y)) / r);
    return th > 0.0 ? th * surface_density(g, y) : 0.0;
  };
  double total = 0.0;
  if (d == 1) {
    std::vector<double> edges;
    for (int k = 0; k <= opt.panels; ++k) edges.push_back(jet.x(0) - r + 2.0 * r * k / opt.panels);
    for (double b : g.breakpoints())
      if (std::abs(b - jet.x(0)) < r) edges.push_back(b);
    Rule rule = panel_rule(edges, opt.order);
    Vec y(1);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      y(0) = rule.x[q];
      total += rule.w[q] * integrand(y);
    }
  } else {
    Rule rule = composite_rule(0.0, r, opt.order, opt.panels);
    for (int a = 0; a < opt.angular; ++a) {
      double th = 2.0 * std::numbers::pi * (a + 0.5) / opt.angular;
      Vec dir(2);
      dir << std::cos(th), std::sin(th);
      for (std::size_t q = 0; q < rule.size(); ++q)
        total += rule.w[q] * rule.x[q] * (2.0 * std::numbers::pi / opt.angular) *
                 integrand(Vec(jet.x + rule.x[q] * dir));
    }
  }
  return total / (bump.a0() * std::pow(r, d));
}

double lambda_density(const LipschitzGraph& g, const Mollifier& m, const DensityBump& bump, const Vec& x, double r,
                      const LambdaOptions& opt) {
  return lambda_density(g, bump, smoothed_jet(g, m, x, r), opt);
}

double h_value(const LipschitzGraph& g, const Mollifier& m, const SoftDistanceParams& p, const DensityBump& bump,
               const Vec& x, const Vec& t) {
  double r = t.norm();
  if (!(r > 0.0)) throw std::invalid_argument("h_value: t must be nonzero");
  return std::pow(p.c_alpha * lambda_density(g, m, bump, x, r), 1.0 / p.alpha);
}

ScaleField::ScaleField(const LipschitzGraph& g, const Mollifier& m, DistanceVariant variant, SoftDistanceParams p,
                       double fd_kappa)
    : g_(g), m_(m), variant_(variant), p_(p), bump_(g.d()), kappa_(fd_kappa) {}

double ScaleField::direct(const Vec& x, double r) const {
  if (variant_ == DistanceVariant::Euclidean) return 1.0;
  return std::pow(p_.c_alpha * lambda_density(g_, m_, bump_, x, r), 1.0 / p_.alpha);
}

void ScaleField::build_cache(const LatticeSpec& spec) {
  if (variant_ == DistanceVariant::Euclidean) return;
  const int d = g_.d();
  if (spec.x_lo.size() != d || spec.x_hi.size() != d) throw ConfigError("scale lattice: box has wrong dimension");
  if (!(spec.r_lo > 0.0 && spec.r_hi > spec.r_lo)) throw ConfigError("scale lattice: need 0 < r_lo < r_hi");
  spec_ = spec;
  const int nx = spec.x_cells + 1, nr = spec.r_cells + 1;
  const long total = (d == 1 ? nx : static_cast<long>(nx) * nx) * nr;
  std::vector<double> values(total);
  const double llo = std::log(spec.r_lo), lhi = std::log(spec.r_hi);
#pragma omp parallel for schedule(dynamic, 16)
  for (long idx = 0; idx < total; ++idx) {
    long j = idx % nr, rest = idx / nr;
    Vec x(d);
    for (int a = d - 1; a >= 0; --a) {
      long i = rest % nx;
      rest /= nx;
      x(a) = spec.x_lo(a) + (spec.x_hi(a) - spec.x_lo(a)) * i / spec.x_cells;
    }
    double r = std::exp(llo + (lhi - llo) * j / spec.r_cells);
    values[idx] = direct(x, r);
  }
  cache_ = std::move(values);
}

bool ScaleField::inside(const Vec& x, double r) const {
  for (int a = 0; a < g_.d(); ++a)
    if (x(a) < spec_.x_lo(a) || x(a) > spec_.x_hi(a)) return false;
  return r >= spec_.r_lo && r <= spec_.r_hi;
}

double ScaleField::interpolate(const Vec& x, double r) const {
  const int d = g_.d(), nx = spec_.x_cells + 1, nr = spec_.r_cells + 1;
  int base[3];
  double frac[3];
  for (int a = 0; a < d; ++a) {
    double s = (x(a) - spec_.x_lo(a)) / (spec_.x_hi(a) - spec_.x_lo(a)) * spec_.x_cells;
    int i = std::clamp(static_cast<int>(std::floor(s)), 0, spec_.x_cells - 1);
    base[a] = i;
    frac[a] = s - i;
  }
  double s = (std::log(r) - std::log(spec_.r_lo)) / (std::log(spec_.r_hi) - std::log(spec_.r_lo)) * spec_.r_cells;
  int j = std::clamp(static_cast<int>(std::floor(s)), 0, spec_.r_cells - 1);
  base[d] = j;
  frac[d] = s - j;
  double out = 0.0;
  for (int corner = 0; corner < (1 << (d + 1)); ++corner) {
    double wgt = 1.0;
    long idx = 0;
    for (int a = 0; a <= d; ++a) {
      int bit = (corner >> a) & 1;
      wgt *= bit ? frac[a] : 1.0 - frac[a];
      int stride = a == d ? nr : nx;
      idx = idx * stride + base[a] + bit;
    }
    out += wgt * cache_[idx];
  }
  return out;
}

double ScaleField::value(const Vec& x, double r) const {
  if (variant_ == DistanceVariant::Euclidean) return 1.0;
  if (cached() && inside(x, r)) return interpolate(x, r);
  return direct(x, r);
}

Vec ScaleField::gradient(const Vec& x, const Vec& t) const {
  const int d = g_.d(), n = g_.n();
  Vec grad = Vec::Zero(n);
  if (variant_ == DistanceVariant::Euclidean) return grad;
  const double r = t.norm();
  double dr;
  if (cached() && inside(x, r)) {
    for (int a = 0; a < d; ++a) {
      double hx = (spec_.x_hi(a) - spec_.x_lo(a)) / spec_.x_cells;
      Vec xp = x, xm = x;
      xp(a) += hx;
      xm(a) -= hx;
      grad(a) = (value(xp, r) - value(xm, r)) / (2.0 * hx);
    }
    double dl = (std::log(spec_.r_hi) - std::log(spec_.r_lo)) / spec_.r_cells;
    double rp = r * std::exp(dl), rm = r * std::exp(-dl);
    dr = (value(x, rp) - value(x, rm)) / (rp - rm);
  } else {
    const double h = kappa_ * r;
    for (int a = 0; a < d; ++a) {
      Vec xp = x, xm = x;
      xp(a) += h;
      xm(a) -= h;
      grad(a) = (direct(xp, r) - direct(xm, r)) / (2.0 * h);
    }
    dr = (direct(x, r + h) - direct(x, r - h)) / (2.0 * h);
  }
  grad.tail(n - d) = dr * t / r;
  return grad;
}

double ScaleField::sample_interpolation_error(int samples, std::uint64_t seed) const {
  if (!cached()) return 0.0;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    Vec x(g_.d());
    for (int a = 0; a < g_.d(); ++a) x(a) = spec_.x_lo(a) + (spec_.x_hi(a) - spec_.x_lo(a)) * uni(rng);
    double r = spec_.r_lo * std::pow(spec_.r_hi / spec_.r_lo, uni(rng));
    double exact = direct(x, r);
    worst = std::max(worst, std::abs(interpolate(x, r) - exact) / exact);
  }
  return worst;
}

double distance_function(const LipschitzGraph& g, const Mollifier& m, DistanceVariant variant,
                         const SoftDistanceParams& p, const Vec& X) {
  if (variant == DistanceVariant::Euclidean) return euclidean_distance(g, X);
  return d_alpha(g, m, p, X);
}

}  // namespace hm
