#include "hm/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hm/error.hpp"

namespace hm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

// Successive shortest paths with Johnson potentials on the dense bipartite
// graph sources (positive coefficients + ground) -> sinks (negative + ground).
TransportSolution solve_transport(const TransportProblem& p) {
  const int N = static_cast<int>(p.points.size());
  std::vector<int> src, snk;
  double total = 0.0;
  for (int i = 0; i < N; ++i) {
    if (p.coeff[i] > 0.0) src.push_back(i);
    if (p.coeff[i] < 0.0) snk.push_back(i);
    total += std::abs(p.coeff[i]);
  }
  TransportSolution sol;
  if (total == 0.0) return sol;
  const int S = static_cast<int>(src.size()) + 1;
  const int T = static_cast<int>(snk.size()) + 1;
  const int gs = S - 1, gt = T - 1;

  std::vector<double> supply(S), demand(T);
  double sum_src = 0.0, sum_snk = 0.0;
  for (int a = 0; a < S - 1; ++a) sum_src += supply[a] = p.coeff[src[a]];
  for (int b = 0; b < T - 1; ++b) sum_snk += demand[b] = -p.coeff[snk[b]];
  supply[gs] = sum_snk;
  demand[gt] = sum_src;

  std::vector<double> cost(static_cast<size_t>(S) * T);
  for (int a = 0; a < S; ++a)
    for (int b = 0; b < T; ++b) {
      double c;
      if (a == gs && b == gt)
        c = 0.0;
      else if (a == gs)
        c = p.bound[snk[b]];
      else if (b == gt)
        c = p.bound[src[a]];
      else
        c = (p.points[src[a]] - p.points[snk[b]]).norm();
      cost[static_cast<size_t>(a) * T + b] = c;
    }
  std::vector<double> flow(static_cast<size_t>(S) * T, 0.0);
  auto C = [&](int a, int b) { return cost[static_cast<size_t>(a) * T + b]; };
  auto F = [&](int a, int b) -> double& { return flow[static_cast<size_t>(a) * T + b]; };

  // Potentials: pi_s for sources, pi_t for sinks; reduced cost C + pi_s - pi_t >= 0.
  std::vector<double> pis(S, 0.0), pit(T, 0.0);
  for (int b = 0; b < T; ++b) {
    double mn = kInf;
    for (int a = 0; a < S; ++a) mn = std::min(mn, C(a, b));
    pit[b] = mn;
  }
  const double eps = 1e-14 * total;
  std::vector<double> ds(S), dt(T);
  std::vector<int> pred_t(T), pred_s(S);
  std::vector<char> vis_s(S), vis_t(T);
  auto rc = [&](int a, int b) { return std::max(0.0, C(a, b) + pis[a] - pit[b]); };

  const int max_rounds = 50 * (S + T) + 64;
  for (int round = 0; round < max_rounds; ++round) {
    bool any_supply = false, any_demand = false;
    for (int a = 0; a < S; ++a) any_supply |= supply[a] > eps;
    for (int b = 0; b < T; ++b) any_demand |= demand[b] > eps;
    if (!any_supply || !any_demand) break;

    std::fill(ds.begin(), ds.end(), kInf);
    std::fill(dt.begin(), dt.end(), kInf);
    std::fill(vis_s.begin(), vis_s.end(), 0);
    std::fill(vis_t.begin(), vis_t.end(), 0);
    for (int a = 0; a < S; ++a)
      if (supply[a] > eps) {
        ds[a] = std::max(0.0, -pis[a]);
        pred_s[a] = -1;
      }
    for (;;) {
      double best = kInf;
      int node = -1;
      bool is_src = true;
      for (int a = 0; a < S; ++a)
        if (!vis_s[a] && ds[a] < best) best = ds[a], node = a, is_src = true;
      for (int b = 0; b < T; ++b)
        if (!vis_t[b] && dt[b] < best) best = dt[b], node = b, is_src = false;
      if (node < 0) break;
      if (is_src) {
        vis_s[node] = 1;
        for (int b = 0; b < T; ++b) {
          if (vis_t[b]) continue;
          double cand = best + rc(node, b);
          if (cand < dt[b]) dt[b] = cand, pred_t[b] = node;
        }
      } else {
        vis_t[node] = 1;
        for (int a = 0; a < S; ++a) {
          if (vis_s[a] || F(a, node) <= eps) continue;
          double cand = best;  // reverse arcs carry flow, so their reduced cost is zero
          if (cand < ds[a]) ds[a] = cand, pred_s[a] = node;
        }
      }
    }
    int target = -1;
    double best_true = kInf;
    for (int b = 0; b < T; ++b)
      if (demand[b] > eps && dt[b] < kInf && dt[b] + pit[b] < best_true) best_true = dt[b] + pit[b], target = b;
    if (target < 0) throw NumericalError("solve_transport", "no augmenting path");

    double dmax = 0.0;
    for (int a = 0; a < S; ++a)
      if (ds[a] < kInf) dmax = std::max(dmax, ds[a]);
    for (int b = 0; b < T; ++b)
      if (dt[b] < kInf) dmax = std::max(dmax, dt[b]);
    for (int a = 0; a < S; ++a) pis[a] += std::min(ds[a], dmax);
    for (int b = 0; b < T; ++b) pit[b] += std::min(dt[b], dmax);

    double push = demand[target];
    int b = target;
    for (;;) {
      int a = pred_t[b];
      if (pred_s[a] < 0) {
        push = std::min(push, supply[a]);
        break;
      }
      push = std::min(push, F(a, pred_s[a]));
      b = pred_s[a];
    }
    b = target;
    demand[target] -= push;
    for (;;) {
      int a = pred_t[b];
      F(a, b) += push;
      if (pred_s[a] < 0) {
        supply[a] -= push;
        break;
      }
      F(a, pred_s[a]) -= push;
      b = pred_s[a];
    }
    ++sol.augmentations;
  }
  double value = 0.0, left = 0.0;
  for (int a = 0; a < S; ++a) {
    left += std::max(0.0, supply[a]);
    for (int bb = 0; bb < T; ++bb) value += C(a, bb) * F(a, bb);
  }
  sol.value = value;
  sol.residual = left;
  if (left > 1e-10 * total) throw NumericalError("solve_transport", "transport did not route all mass", left);
  return sol;
}

}  // namespace hm
