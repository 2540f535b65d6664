#include "hm/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace hm {

namespace {

Rule compute_gauss_legendre(int n) {
  Rule rule;
  rule.x.resize(n);
  rule.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.x[i] = -z;
    rule.x[n - 1 - i] = z;
    rule.w[i] = w;
    rule.w[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.x[n / 2] = 0.0;
  return rule;
}

void append_panel(Rule& out, double a, double b, const Rule& ref) {
  double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (std::size_t q = 0; q < ref.size(); ++q) {
    out.x.push_back(mid + half * ref.x[q]);
    out.w.push_back(half * ref.w[q]);
  }
}

}  // namespace

const Rule& gauss_legendre(int order) {
  if (order < 1) throw std::invalid_argument("gauss_legendre: order must be positive");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<Rule>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[order];
  if (!slot) slot = std::make_unique<Rule>(compute_gauss_legendre(order));
  return *slot;
}

Rule composite_rule(double a, double b, int order, int panels, const std::vector<double>& breakpoints) {
  const Rule& ref = gauss_legendre(order);
  std::vector<double> cuts{a};
  for (double c : breakpoints)
    if (c > a && c < b) cuts.push_back(c);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  Rule out;
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    double len = (cuts[s + 1] - cuts[s]) / panels;
    for (int p = 0; p < panels; ++p) append_panel(out, cuts[s] + p * len, cuts[s] + (p + 1) * len, ref);
  }
  return out;
}

Rule geometric_rule(double h0, double R, int order) {
  const Rule& ref = gauss_legendre(order);
  Rule out;
  double a = 0.0, b = std::min(h0, R);
  while (a < R) {
    append_panel(out, a, b, ref);
    a = b;
    b = std::min(2.0 * b, R);
  }
  return out;
}

}  // namespace hm

namespace hm {

Rule panel_rule(std::vector<double> edges, int order) {
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  const Rule& ref = gauss_legendre(order);
  Rule out;
  for (std::size_t s = 0; s + 1 < edges.size(); ++s) append_panel(out, edges[s], edges[s + 1], ref);
  return out;
}

std::vector<double> geometric_edges(double h0, double R) {
  std::vector<double> e{0.0};
  double b = std::min(h0, R);
  while (e.back() < R) {
    e.push_back(b);
    b = std::min(2.0 * b, R);
  }
  return e;
}

}  // namespace hm

namespace hm {

AdaptiveResult adaptive_panels(const std::function<double(double)>& f, std::vector<double> edges, int order,
                               double rel_tol, int max_depth) {
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  const Rule& hi = gauss_legendre(order);
  const Rule& lo = gauss_legendre(std::max(2, order / 2));
  auto apply = [&](const Rule& rule, double a, double b) {
    double mid = 0.5 * (a + b), half = 0.5 * (b - a), s = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) s += rule.w[q] * f(mid + half * rule.x[q]);
    return half * s;
  };
  struct Panel {
    double a, b, v, e;
    int depth;
  };
  std::vector<Panel> done, work;
  for (std::size_t s = 0; s + 1 < edges.size(); ++s) {
    double v = apply(hi, edges[s], edges[s + 1]);
    work.push_back({edges[s], edges[s + 1], v, std::abs(v - apply(lo, edges[s], edges[s + 1])), 0});
  }
  double total_abs = 0.0;
  for (const auto& p : work) total_abs += std::abs(p.v);
  while (!work.empty()) {
    Panel p = work.back();
    work.pop_back();
    if (p.e <= rel_tol * total_abs / std::max<std::size_t>(1, edges.size()) || p.depth >= max_depth) {
      done.push_back(p);
      continue;
    }
    double m = 0.5 * (p.a + p.b);
    double v1 = apply(hi, p.a, m), v2 = apply(hi, m, p.b);
    total_abs += std::abs(v1) + std::abs(v2) - std::abs(p.v);
    work.push_back({p.a, m, v1, std::abs(v1 - apply(lo, p.a, m)), p.depth + 1});
    work.push_back({m, p.b, v2, std::abs(v2 - apply(lo, m, p.b)), p.depth + 1});
  }
  std::sort(done.begin(), done.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
  AdaptiveResult res;
  for (const auto& p : done) {
    res.value += p.v;
    res.error += p.e;
  }
  res.panels = static_cast<int>(done.size());
  return res;
}

}  // namespace hm
