#pragma once

#include <vector>

namespace hm {

struct Rule {
  std::vector<double> x;
  std::vector<double> w;
  std::size_t size() const { return x.size(); }
};

// Gauss-Legendre nodes and weights on [-1, 1]. Results are memoized.
const Rule& gauss_legendre(int order);

// Composite Gauss-Legendre rule on [a, b]: the interval is split at every
// breakpoint inside (a, b) and each piece into `panels` equal panels.
Rule composite_rule(double a, double b, int order, int panels,
                    const std::vector<double>& breakpoints = {});

// Geometric panels on [0, R]: [0, h0], [h0, 2h0], [2h0, 4h0], ... up to R.
Rule geometric_rule(double h0, double R, int order);

}  // namespace hm

namespace hm {

// Gauss-Legendre rule of the given order on each consecutive pair of edges.
Rule panel_rule(std::vector<double> edges, int order);

// Geometric edges 0, h0, 2h0, 4h0, ..., R.
std::vector<double> geometric_edges(double h0, double R);

}  // namespace hm

#include <functional>

namespace hm {

struct AdaptiveResult {
  double value = 0.0;
  double error = 0.0;  // sum of per-panel |Q_order - Q_order/2|
  int panels = 0;
};

// Panel-adaptive Gauss-Legendre: each panel between consecutive edges is
// bisected until the order and order/2 rules agree to rel_tol of the total.
AdaptiveResult adaptive_panels(const std::function<double(double)>& f, std::vector<double> edges, int order,
                               double rel_tol, int max_depth = 14);

}  // namespace hm
