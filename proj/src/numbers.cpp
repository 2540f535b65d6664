#include "hm/numbers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hm/error.hpp"
#include "hm/transport.hpp"

namespace hm {

double DiscreteMeasure::mass() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

double DiscreteMeasure::min_weight() const {
  double mn = std::numeric_limits<double>::infinity();
  for (double w : weights) mn = std::min(mn, w);
  return weights.empty() ? 0.0 : mn;
}

double DiscreteMeasure::patch_excess(const Vec& z, double R) const {
  double ex = -R;
  for (const Vec& p : points) ex = std::max(ex, (p - z).norm() - R);
  return ex;
}

double FlatMeasure::frame_error() const {
  const int d = static_cast<int>(frame.cols());
  return (frame.transpose() * frame - Mat::Identity(d, d)).cwiseAbs().maxCoeff();
}

Mat FlatMeasure::normal() const {
  const int n = static_cast<int>(frame.rows()), d = static_cast<int>(frame.cols());
  Eigen::HouseholderQR<Mat> qr(frame);
  Mat Q = qr.householderQ() * Mat::Identity(n, n);
  return Q.rightCols(n - d);
}

namespace {

// Calls fn(y) for each lattice parameter y with |y - c|_inf <= R.
template <class Fn>
void for_lattice(int d, const Vec& c, double R, double s, Fn fn) {
  int lo[2] = {0, 0}, hi[2] = {0, 0};
  for (int i = 0; i < d; ++i) {
    lo[i] = static_cast<int>(std::floor((c(i) - R) / s - 0.5)) - 1;
    hi[i] = static_cast<int>(std::ceil((c(i) + R) / s - 0.5)) + 1;
  }
  Vec y(d);
  if (d == 1) {
    for (int k = lo[0]; k <= hi[0]; ++k) {
      y(0) = (k + 0.5) * s;
      fn(y);
    }
  } else {
    for (int k = lo[0]; k <= hi[0]; ++k)
      for (int l = lo[1]; l <= hi[1]; ++l) {
        y << (k + 0.5) * s, (l + 0.5) * s;
        fn(y);
      }
  }
}

Mat graph_differential(const LipschitzGraph& g, const Vec& y) {
  const int d = g.d(), n = g.n();
  Mat D(n, d);
  D.topRows(d) = Mat::Identity(d, d);
  D.bottomRows(n - d) = g.dphi(y);
  return D;
}

Mat orthonormalize(const Mat& A) {
  const int n = static_cast<int>(A.rows()), d = static_cast<int>(A.cols());
  Mat U(n, d);
  for (int j = 0; j < d; ++j) {
    Vec v = A.col(j);
    for (int i = 0; i < j; ++i) v -= U.col(i).dot(v) * U.col(i);
    U.col(j) = v / v.norm();
  }
  return U;
}

}  // namespace

DiscreteMeasure graph_atoms(const LipschitzGraph& g, const Vec& z, double R, double spacing) {
  const int d = g.d();
  DiscreteMeasure mu;
  mu.provenance = "graph lattice s=" + std::to_string(spacing);
  const double vol = std::pow(spacing, d);
  for_lattice(d, z.head(d), R, spacing, [&](const Vec& y) {
    Vec p = eval_graph(g, y);
    if ((p - z).norm() < R) {
      mu.points.push_back(p);
      mu.weights.push_back(surface_density(g, y) * vol);
    }
  });
  return mu;
}

DiscreteMeasure flat_atoms(const LipschitzGraph& g, const FlatMeasure& mu, const Vec& z, double R, double spacing) {
  const int d = g.d();
  DiscreteMeasure out;
  out.provenance = "plane projection lattice s=" + std::to_string(spacing);
  const double vol = std::pow(spacing, d);
  const Mat& U = mu.frame;
  for_lattice(d, z.head(d), 2.0 * R, spacing, [&](const Vec& y) {
    Vec p = eval_graph(g, y);
    Vec q = mu.point + U * (U.transpose() * (p - mu.point));
    if ((q - z).norm() < R) {
      out.points.push_back(q);
      out.weights.push_back(mu.c * std::abs((U.transpose() * graph_differential(g, y)).determinant()) * vol);
    }
  });
  return out;
}

double wasserstein_distance(int d, const Vec& z, double r, const DiscreteMeasure& mu, const DiscreteMeasure& sigma) {
  TransportProblem tp;
  auto add = [&](const DiscreteMeasure& m, double sign) {
    for (size_t i = 0; i < m.points.size(); ++i) {
      double b = r - (m.points[i] - z).norm();
      if (b <= 0.0 || m.weights[i] == 0.0) continue;
      tp.points.push_back(m.points[i]);
      tp.coeff.push_back(sign * m.weights[i]);
      tp.bound.push_back(b);
    }
  };
  add(sigma, 1.0);
  add(mu, -1.0);
  return solve_transport(tp).value / std::pow(r, d + 1);
}

FlatMeasure replacement_measure(const LipschitzGraph& g, const Mollifier& m, const DensityBump& bump, const Vec& x,
                                double r) {
  SmoothedJet jet = smoothed_jet(g, m, x, r);
  Frame f = orthonormal_frame(raw_vectors(jet), jet.point);
  FlatMeasure mu;
  mu.point = jet.point;
  mu.frame = Mat(g.n(), g.d());
  for (int i = 0; i < g.d(); ++i) mu.frame.col(i) = f.v[i];
  mu.c = lambda_density(g, bump, jet);
  return mu;
}

namespace {

// Search parameters: orientation Theta ((n-d) x d), normal offsets o (n-d), log c.
struct FlatChart {
  FlatMeasure base;
  Mat N;
  double R;
  int d, n;

  int dim() const { return d * (n - d) + (n - d) + 1; }

  FlatMeasure at(const std::vector<double>& q) const {
    const int m = n - d;
    Mat A = base.frame;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < m; ++j) A.col(i) += q[i * m + j] * N.col(j);
    FlatMeasure mu;
    mu.frame = orthonormalize(A);
    mu.point = base.point;
    for (int j = 0; j < m; ++j) mu.point += q[d * m + j] * R * N.col(j);
    mu.c = base.c * std::exp(q[d * m + m]);
    return mu;
  }
};

struct NelderMeadResult {
  std::vector<double> x;
  double f;
  int evaluations;
  bool converged;
};

template <class Fn>
NelderMeadResult nelder_mead(Fn f, std::vector<double> x0, double step, int max_eval, double ftol) {
  const int p = static_cast<int>(x0.size());
  std::vector<std::vector<double>> S(p + 1, x0);
  std::vector<double> F(p + 1);
  for (int i = 0; i < p; ++i) S[i + 1][i] += step;
  int evals = 0;
  for (int i = 0; i <= p; ++i) F[i] = f(S[i]), ++evals;
  bool converged = false;
  auto lerp = [&](const std::vector<double>& a, const std::vector<double>& b, double t) {
    std::vector<double> out(p);
    for (int k = 0; k < p; ++k) out[k] = a[k] + t * (b[k] - a[k]);
    return out;
  };
  while (evals < max_eval) {
    std::vector<int> idx(p + 1);
    for (int i = 0; i <= p; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return F[a] < F[b]; });
    std::vector<std::vector<double>> S2(p + 1);
    std::vector<double> F2(p + 1);
    for (int i = 0; i <= p; ++i) S2[i] = S[idx[i]], F2[i] = F[idx[i]];
    S = S2;
    F = F2;
    if (F[p] - F[0] <= ftol * (std::abs(F[0]) + 1e-12)) {
      converged = true;
      break;
    }
    std::vector<double> c(p, 0.0);
    for (int i = 0; i < p; ++i)
      for (int k = 0; k < p; ++k) c[k] += S[i][k] / p;
    std::vector<double> xr = lerp(c, S[p], -1.0);
    double fr = f(xr);
    ++evals;
    if (fr < F[0]) {
      std::vector<double> xe = lerp(c, S[p], -2.0);
      double fe = f(xe);
      ++evals;
      if (fe < fr)
        S[p] = xe, F[p] = fe;
      else
        S[p] = xr, F[p] = fr;
    } else if (fr < F[p - 1]) {
      S[p] = xr, F[p] = fr;
    } else {
      bool outside = fr < F[p];
      std::vector<double> xc = outside ? lerp(c, xr, 0.5) : lerp(c, S[p], 0.5);
      double fc = f(xc);
      ++evals;
      if (fc < (outside ? fr : F[p])) {
        S[p] = xc, F[p] = fc;
      } else {
        for (int i = 1; i <= p; ++i) {
          S[i] = lerp(S[0], S[i], 0.5);
          F[i] = f(S[i]);
          ++evals;
        }
      }
    }
  }
  int best = static_cast<int>(std::min_element(F.begin(), F.end()) - F.begin());
  return {S[best], F[best], evals, converged};
}

}  // namespace

AlphaResult alpha_tilde(const LipschitzGraph& g, const Mollifier& m, const Vec& z, double R, const AlphaOptions& opt) {
  const int d = g.d(), n = g.n();
  AlphaResult res;
  res.spacing = opt.spacing > 0.0 ? opt.spacing : R / opt.atoms_per_radius;
  DiscreteMeasure sigma = graph_atoms(g, z, R, res.spacing);
  for (double& w : sigma.weights) w *= opt.sigma_scale;
  auto objective = [&](const FlatMeasure& mu) {
    return wasserstein_distance(d, z, R, flat_atoms(g, mu, z, R, res.spacing), sigma);
  };

  DensityBump bump(d);
  Vec x = z.head(d);
  std::vector<FlatMeasure> seeds = {replacement_measure(g, m, bump, x, R / 4.0),
                                    replacement_measure(g, m, bump, x, R)};
  for (const FlatMeasure& s : opt.extra_seeds) seeds.push_back(s);
  double best = std::numeric_limits<double>::infinity();
  FlatMeasure best_mu;
  for (const FlatMeasure& s : seeds) {
    double v = objective(s);
    ++res.evaluations;
    if (v < best) best = v, best_mu = s;
  }
  res.seed_value = best;

  double step = 0.05;
  for (int rs = 0; rs < opt.restarts && best > 1e-12; ++rs) {
    FlatChart chart{best_mu, best_mu.normal(), R, d, n};
    auto f = [&](const std::vector<double>& q) { return objective(chart.at(q)); };
    NelderMeadResult nm = nelder_mead(f, std::vector<double>(chart.dim(), 0.0), step, opt.max_evaluations,
                                      opt.tolerance);
    res.evaluations += nm.evaluations;
    res.converged = nm.converged;
    if (nm.f < best) {
      best = nm.f;
      best_mu = chart.at(nm.x);
    }
    step *= 0.5;
  }
  res.value = best;
  res.best = best_mu;
  return res;
}

AlphaResult alpha_number(const LipschitzGraph& g, const Mollifier& m, const Vec& x, double r, const AlphaOptions& opt) {
  return alpha_tilde(g, m, eval_graph(g, x), 4.0 * r, opt);
}

std::vector<Vec> beta_samples(const LipschitzGraph& g, const Vec& x, double r, int samples) {
  const int d = g.d();
  std::vector<Vec> out;
  if (d == 1) {
    for (int k = 0; k < samples; ++k) {
      Vec y(1);
      y << x(0) + r * (-1.0 + 2.0 * k / (samples - 1));
      out.push_back(y);
    }
    for (double b : g.breakpoints())
      if (std::abs(b - x(0)) <= r) {
        Vec y(1);
        y << b;
        out.push_back(y);
      }
  } else {
    int k1d = std::max(9, static_cast<int>(std::sqrt(static_cast<double>(samples))) * 2 + 1);
    for (int i = 0; i < k1d; ++i)
      for (int j = 0; j < k1d; ++j) {
        Vec u(2);
        u << -1.0 + 2.0 * i / (k1d - 1), -1.0 + 2.0 * j / (k1d - 1);
        if (u.norm() <= 1.0) out.push_back(x + r * u);
      }
    for (int k = 0; k < 4 * k1d; ++k) {
      double th = 2.0 * M_PI * k / (4 * k1d);
      Vec u(2);
      u << std::cos(th), std::sin(th);
      out.push_back(x + r * u);
    }
  }
  return out;
}

double beta_number(const LipschitzGraph& g, const Vec& x, double r, const BetaOptions& opt) {
  const int d = g.d(), m = g.codim();
  const int p = m * (d + 1);
  std::vector<Vec> ys = beta_samples(g, x, r, opt.samples);
  const Vec phix = g.phi(x);
  std::vector<Vec> vals, offs;
  for (const Vec& y : ys) {
    vals.push_back((g.phi(y) - phix) / r);
    offs.push_back((y - x) / r);
  }
  // q = (c, L) with residual e = val - c - L off.
  auto eval = [&](const Eigen::VectorXd& q, Eigen::VectorXd* grad) {
    double best = -1.0;
    int arg = 0;
    Vec e(m);
    for (size_t k = 0; k < ys.size(); ++k) {
      Vec ek = vals[k] - q.head(m);
      for (int i = 0; i < d; ++i) ek -= q.segment(m * (1 + i), m) * offs[k](i);
      double nk = ek.norm();
      if (nk > best) best = nk, arg = static_cast<int>(k), e = ek;
    }
    if (grad) {
      grad->setZero(p);
      if (best > 0.0) {
        Vec u = e / best;
        grad->head(m) = -u;
        for (int i = 0; i < d; ++i) grad->segment(m * (1 + i), m) = -u * offs[arg](i);
      }
    }
    return best;
  };
  Eigen::VectorXd q = Eigen::VectorXd::Zero(p), gr(p);
  double f0 = eval(q, nullptr);
  double radius = std::sqrt(static_cast<double>(p)) * (g.c0() + 3.0 * f0) + 1e-12;
  // Ellipsoid {q + B u : |u| <= 1}, kept in factored form.
  Eigen::MatrixXd B = radius * Eigen::MatrixXd::Identity(p, p);
  const double a1 = p / std::sqrt(double(p) * p - 1.0), a2 = p / (p + 1.0);
  double best = f0, lower = 0.0;
  for (int it = 0; it < opt.max_iterations; ++it) {
    double f = eval(q, &gr);
    best = std::min(best, f);
    Eigen::VectorXd bg = B.transpose() * gr;
    double s = bg.norm();
    if (!(s > 0.0)) break;
    lower = std::max(lower, f - s);
    if (best - lower <= opt.tolerance) break;
    bg /= s;
    Eigen::VectorXd Bbg = B * bg;
    q -= Bbg / (p + 1);
    B = a1 * B + (a2 - a1) * Bbg * bg.transpose();
  }
  return best;
}

double beta_eta_number(const LipschitzGraph& g, const Mollifier& m, const Vec& x, double r, const BetaOptions& opt) {
  SmoothedJet jet = smoothed_jet(g, m, x, r);
  double best = 0.0;
  for (const Vec& y : beta_samples(g, x, r, opt.samples)) {
    Vec a = jet.phi_r + jet.grad_x * (y - x);
    best = std::max(best, (g.phi(y) - a).norm());
  }
  return best / r;
}

SeriesResult a_series(const LipschitzGraph& g, const Mollifier& m, const Vec& x, double r, double alpha, int K,
                      const AlphaOptions& opt) {
  if (K < 1) throw std::invalid_argument("a_series: K must be at least 1");
  SeriesResult s;
  double sup = 0.0;
  for (int k = 0; k <= K; ++k) {
    double a = alpha_number(g, m, x, std::ldexp(r, k), opt).value;
    s.terms.push_back(a);
    s.value += std::pow(2.0, -alpha * k) * a;
    sup = std::max(sup, a);
  }
  s.tail_bound = std::pow(2.0, -alpha * K) * sup;
  return s;
}

double replacement_distance(const LipschitzGraph& g, const Mollifier& m, const Vec& x, double r,
                            const AlphaOptions& opt) {
  DensityBump bump(g.d());
  FlatMeasure mu = replacement_measure(g, m, bump, x, r);
  Vec z = eval_graph(g, x);
  double s = opt.spacing > 0.0 ? opt.spacing : r / opt.atoms_per_radius;
  return wasserstein_distance(g.d(), z, r, flat_atoms(g, mu, z, r, s), graph_atoms(g, z, r, s));
}

double plane_residual(const LipschitzGraph& g, const Mollifier& m, const SoftDistanceParams& p, const Vec& x, double r,
                      const Vec& z) {
  DensityBump bump(g.d());
  FlatMeasure mu = replacement_measure(g, m, bump, x, r);
  Vec off = z - mu.point;
  double dist = (off - mu.frame * (mu.frame.transpose() * off)).norm();
  double D = d_alpha(g, m, p, z);
  return std::pow(r, p.alpha) * std::abs(std::pow(D, -p.alpha) - p.c_alpha * mu.c * std::pow(dist, -p.alpha));
}

}  // namespace hm
