#pragma once

#include <vector>

#include "hm/graph.hpp"
#include "hm/linalg.hpp"

namespace hm {

struct MollifierOptions {
  int order = 96;             // Gauss-Legendre points per axis
  double tolerance = 1e-9;    // accepted quadrature error estimate (when checked)
  bool check = false;         // recompute on a finer rule and compare
};

// eta(x) = c exp(-1/(1-|x|^2)) on the unit ball of R^d, normalized so that
// the tensor rule integrates it to one.
class Mollifier {
 public:
  struct Node {
    Vec u;
    double w;
    double eta;
    Vec grad;    // grad eta
    Mat hess;    // Hessian of eta
    double hat;  // eta_hat = -d eta - u . grad eta
    Vec kr;      // -( (d+1) d_i eta + u . grad d_i eta ), kernel of r d_r d_i phi_r
  };

  explicit Mollifier(int d, MollifierOptions opt = {});

  int d() const { return d_; }
  const MollifierOptions& options() const { return opt_; }
  double normalization() const { return c_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Node>& check_nodes() const { return check_nodes_; }

  double eta(const Vec& u) const;
  Vec grad_eta(const Vec& u) const;
  double eta_hat(const Vec& u) const;
  Vec eta_tilde(const Vec& u) const;

  // Re-quadrature of the integral of eta on a finer rule.
  double integral_check(int order) const;
  // Bound C with |d_r phi_r| + r|grad grad phi_r| <= C c0, from kernel moments.
  double jet_constant() const { return jet_constant_; }

 private:
  std::vector<Node> build(int order) const;
  Node node(const Vec& u, double w) const;

  int d_;
  MollifierOptions opt_;
  double c_ = 1.0;
  std::vector<Node> nodes_;
  std::vector<Node> check_nodes_;
  double jet_constant_ = 0.0;
};

struct SmoothedJet {
  int d = 1;
  int n = 3;
  double r = 0.0;
  Vec x;
  Vec point;   // Phi_r(x)
  Vec phi_r;   // phi_r(x)
  Mat grad_x;  // (n-d) x d, column i is d_{x_i} phi_r
  Vec d_r;     // d_r phi_r
  // hess[a][i] = d_a d_{x_i} phi_r for a in {x_1..x_d, r}.
  Vec hess[3][2];
  double quadrature_error = 0.0;

  double hess_norm() const;
};

SmoothedJet smoothed_jet(const LipschitzGraph& g, const Mollifier& m, const Vec& x, double r);

}  // namespace hm
