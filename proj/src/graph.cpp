#include "hm/graph.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include "hm/error.hpp"

namespace hm {

std::string to_string(GraphFamily f) {
  switch (f) {
    case GraphFamily::Zero: return "zero";
    case GraphFamily::Affine: return "affine";
    case GraphFamily::Sinusoid: return "sinusoid";
    case GraphFamily::Fourier: return "fourier";
    case GraphFamily::Corner: return "corner";
  }
  return "unknown";
}

GraphFamily graph_family_from_string(const std::string& s) {
  if (s == "zero" || s == "flat") return GraphFamily::Zero;
  if (s == "affine") return GraphFamily::Affine;
  if (s == "sinusoid") return GraphFamily::Sinusoid;
  if (s == "fourier") return GraphFamily::Fourier;
  if (s == "corner") return GraphFamily::Corner;
  throw ConfigError("unknown graph family '" + s + "'");
}

LipschitzGraph::LipschitzGraph(GraphSpec spec) : spec_(std::move(spec)) {
  const int d = spec_.d, m = spec_.n - spec_.d;
  if (d < 1 || d > 2) throw ConfigError("graph: d must be 1 or 2");
  if (spec_.n <= d || spec_.n > kMaxDim) throw ConfigError("graph: need d < n <= 4");
  double bound = 0.0;
  switch (spec_.family) {
    case GraphFamily::Zero:
      break;
    case GraphFamily::Affine: {
      if (spec_.slope.rows() != m || spec_.slope.cols() != d) throw ConfigError("affine: slope must be (n-d) x d");
      if (spec_.offset.size() == 0) spec_.offset = Vec::Zero(m);
      if (spec_.offset.size() != m) throw ConfigError("affine: offset must have n-d entries");
      Eigen::JacobiSVD<Mat> svd(spec_.slope);
      bound = svd.singularValues()(0);
      break;
    }
    case GraphFamily::Sinusoid:
      if (spec_.amplitude.size() != m) throw ConfigError("sinusoid: amplitude must have n-d entries");
      if (spec_.frequency.size() != d) throw ConfigError("sinusoid: frequency must have d entries");
      bound = spec_.amplitude.norm() * spec_.frequency.norm();
      break;
    case GraphFamily::Fourier: {
      if (spec_.modes < 1) throw ConfigError("fourier: need at least one mode");
      if (spec_.c0 <= 0.0) throw ConfigError("fourier: a positive c0 is required");
      std::mt19937_64 rng(spec_.seed);
      std::uniform_real_distribution<double> uni(0.0, 1.0);
      std::normal_distribution<double> gauss(0.0, 1.0);
      double total = 0.0;
      for (int k = 0; k < spec_.modes; ++k) {
        FourierMode mode;
        mode.frequency = Vec(d);
        double kabs = 0.5 + 2.5 * uni(rng);
        if (d == 1) {
          mode.frequency(0) = kabs;
        } else {
          double ang = 2.0 * std::numbers::pi * uni(rng);
          mode.frequency << kabs * std::cos(ang), kabs * std::sin(ang);
        }
        mode.amplitude = Vec(m);
        for (int j = 0; j < m; ++j) mode.amplitude(j) = gauss(rng);
        mode.amplitude *= (0.5 + 0.5 * uni(rng)) / mode.amplitude.norm();
        mode.phase = 2.0 * std::numbers::pi * uni(rng);
        total += mode.amplitude.norm() * kabs;
        modes_.push_back(mode);
      }
      for (auto& mode : modes_) mode.amplitude *= spec_.c0 / total;
      bound = spec_.c0;
      break;
    }
    case GraphFamily::Corner:
      if (d != 1) throw ConfigError("corner graphs require d = 1");
      if (spec_.amplitude.size() != m) throw ConfigError("corner: amplitude must have n-d entries");
      bound = spec_.amplitude.norm();
      break;
  }
  if (spec_.c0 < 0.0) {
    c0_ = bound;
  } else {
    if (spec_.c0 < bound * (1.0 - 1e-12)) throw ConfigError("graph: declared c0 is below the family's Lipschitz bound");
    c0_ = spec_.c0;
  }
}

LipschitzGraph LipschitzGraph::zero(int d, int n) {
  GraphSpec s;
  s.d = d;
  s.n = n;
  s.family = GraphFamily::Zero;
  return LipschitzGraph(s);
}

LipschitzGraph LipschitzGraph::affine(const Mat& slope, const Vec& offset) {
  GraphSpec s;
  s.d = static_cast<int>(slope.cols());
  s.n = static_cast<int>(slope.cols() + slope.rows());
  s.family = GraphFamily::Affine;
  s.slope = slope;
  s.offset = offset.size() ? offset : Vec(Vec::Zero(slope.rows()));
  return LipschitzGraph(s);
}

LipschitzGraph LipschitzGraph::sinusoid(int d, const Vec& amplitude, const Vec& frequency, double phase) {
  GraphSpec s;
  s.d = d;
  s.n = d + static_cast<int>(amplitude.size());
  s.family = GraphFamily::Sinusoid;
  s.amplitude = amplitude;
  s.frequency = frequency;
  s.phase = phase;
  return LipschitzGraph(s);
}

LipschitzGraph LipschitzGraph::fourier(int d, int n, int modes, double c0, std::uint64_t seed) {
  GraphSpec s;
  s.d = d;
  s.n = n;
  s.family = GraphFamily::Fourier;
  s.modes = modes;
  s.c0 = c0;
  s.seed = seed;
  return LipschitzGraph(s);
}

LipschitzGraph LipschitzGraph::corner(const Vec& amplitude) {
  GraphSpec s;
  s.d = 1;
  s.n = 1 + static_cast<int>(amplitude.size());
  s.family = GraphFamily::Corner;
  s.amplitude = amplitude;
  return LipschitzGraph(s);
}

Vec LipschitzGraph::phi(const Vec& x) const {
  const int m = codim();
  switch (spec_.family) {
    case GraphFamily::Zero:
      return Vec::Zero(m);
    case GraphFamily::Affine:
      return spec_.offset + spec_.slope * x;
    case GraphFamily::Sinusoid:
      return spec_.amplitude * std::sin(spec_.frequency.dot(x) + spec_.phase);
    case GraphFamily::Fourier: {
      Vec out = Vec::Zero(m);
      for (const auto& mode : modes_) out += mode.amplitude * std::sin(mode.frequency.dot(x) + mode.phase);
      return out;
    }
    case GraphFamily::Corner:
      return spec_.amplitude * std::abs(x(0));
  }
  return Vec::Zero(m);
}

Mat LipschitzGraph::dphi(const Vec& x) const {
  const int m = codim(), d = spec_.d;
  switch (spec_.family) {
    case GraphFamily::Zero:
      return Mat::Zero(m, d);
    case GraphFamily::Affine:
      return spec_.slope;
    case GraphFamily::Sinusoid:
      return spec_.amplitude * spec_.frequency.transpose() * std::cos(spec_.frequency.dot(x) + spec_.phase);
    case GraphFamily::Fourier: {
      Mat out = Mat::Zero(m, d);
      for (const auto& mode : modes_)
        out += mode.amplitude * mode.frequency.transpose() * std::cos(mode.frequency.dot(x) + mode.phase);
      return out;
    }
    case GraphFamily::Corner:
      if (x(0) == 0.0) throw NumericalError("dphi", "corner graph is not differentiable at x = 0");
      return spec_.amplitude * (x(0) > 0.0 ? 1.0 : -1.0);
  }
  return Mat::Zero(m, d);
}

std::vector<double> LipschitzGraph::breakpoints() const {
  if (spec_.family == GraphFamily::Corner) return {0.0};
  return {};
}

Vec eval_graph(const LipschitzGraph& g, const Vec& x) { return concat(x, g.phi(x)); }

double surface_density(const LipschitzGraph& g, const Vec& x) {
  Mat D = g.dphi(x);
  Mat G = Mat::Identity(g.d(), g.d()) + D.transpose() * D;
  return std::sqrt(G.determinant());
}

namespace {

double sq_dist(const LipschitzGraph& g, const Vec& X, const Vec& y) { return (X - eval_graph(g, y)).squaredNorm(); }

double distance_1d(const LipschitzGraph& g, const Vec& X, double R, Vec* foot) {
  const double x0 = X(0);
  const int grid = 64;
  std::vector<double> ys(grid + 1);
  std::vector<double> fs(grid + 1);
  Vec y(1);
  for (int k = 0; k <= grid; ++k) {
    ys[k] = x0 - R + 2.0 * R * k / grid;
    y(0) = ys[k];
    fs[k] = sq_dist(g, X, y);
  }
  double best = std::numeric_limits<double>::infinity();
  double best_y = x0;
  auto consider = [&](double yy) {
    y(0) = yy;
    double f = sq_dist(g, X, y);
    if (f < best) {
      best = f;
      best_y = yy;
    }
  };
  consider(x0);
  for (double b : g.breakpoints())
    if (std::abs(b - x0) <= R) consider(b);
  for (int k = 0; k <= grid; ++k) {
    bool left = k == 0 || fs[k] <= fs[k - 1];
    bool right = k == grid || fs[k] <= fs[k + 1];
    if (!(left && right)) continue;
    double a = ys[std::max(k - 1, 0)], b = ys[std::min(k + 1, grid)];
    auto f = [&](double t) {
      Vec yy(1);
      yy(0) = t;
      return sq_dist(g, X, yy);
    };
    std::uintmax_t iters = 200;
    auto res = boost::math::tools::brent_find_minima(f, a, b, std::numeric_limits<double>::digits, iters);
    consider(res.first);
  }
  if (foot) {
    *foot = Vec(1);
    (*foot)(0) = best_y;
  }
  return std::sqrt(best);
}

double distance_nd(const LipschitzGraph& g, const Vec& X, double R, Vec* foot) {
  const int d = g.d();
  Vec x0 = X.head(d);
  const int grid = 8;
  std::vector<std::pair<double, Vec>> starts;
  for (int i = 0; i <= grid; ++i)
    for (int j = 0; j <= grid; ++j) {
      Vec y = x0;
      y(0) += R * (2.0 * i / grid - 1.0);
      y(1) += R * (2.0 * j / grid - 1.0);
      starts.emplace_back(sq_dist(g, X, y), y);
    }
  std::sort(starts.begin(), starts.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  double best = sq_dist(g, X, x0);
  Vec best_y = x0;
  for (int s = 0; s < 4; ++s) {
    Vec y = starts[s].second;
    double f = starts[s].first;
    for (int it = 0; it < 60; ++it) {
      Mat Jg(g.n(), d);
      Jg.topRows(d) = Mat::Identity(d, d);
      Jg.bottomRows(g.codim()) = g.dphi(y);
      Vec res = X - eval_graph(g, y);
      Vec step = (Jg.transpose() * Jg).ldlt().solve(Jg.transpose() * res);
      double lam = 1.0;
      bool moved = false;
      for (int b = 0; b < 30; ++b) {
        Vec trial = y + lam * step;
        double ft = sq_dist(g, X, trial);
        if (ft < f) {
          y = trial;
          f = ft;
          moved = true;
          break;
        }
        lam *= 0.5;
      }
      if (!moved || step.norm() < 1e-15 * (1.0 + y.norm())) break;
    }
    if (f < best) {
      best = f;
      best_y = y;
    }
  }
  if (foot) *foot = best_y;
  return std::sqrt(best);
}

}  // namespace

double euclidean_distance(const LipschitzGraph& g, const Vec& X, Vec* foot) {
  if (X.size() != g.n()) throw std::invalid_argument("euclidean_distance: point has wrong dimension");
  Vec x0 = X.head(g.d());
  double R = (X - eval_graph(g, x0)).norm();
  if (R == 0.0) {
    if (foot) *foot = x0;
    return 0.0;
  }
  return g.d() == 1 ? distance_1d(g, X, R, foot) : distance_nd(g, X, R, foot);
}

double sampled_lipschitz(const LipschitzGraph& g, int samples, std::uint64_t seed, double spread) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    Vec x(g.d()), dir(g.d());
    for (int i = 0; i < g.d(); ++i) {
      x(i) = spread * uni(rng);
      dir(i) = uni(rng);
    }
    if (dir.norm() == 0.0) continue;
    double sep = std::pow(10.0, -3.0 + 3.3 * (0.5 + 0.5 * uni(rng)));
    Vec y = x + sep * dir.normalized();
    worst = std::max(worst, (g.phi(x) - g.phi(y)).norm() / (x - y).norm());
  }
  return worst;
}

}  // namespace hm
