#pragma once

#include "hm/distance.hpp"
#include "hm/frames.hpp"

namespace hm {

// The change of variables rho(x,t) = Phi_r(x) + h(x,t) R_{x,r}(0,t), r = |t|.
class RhoMap {
 public:
  RhoMap(const LipschitzGraph& g, const Mollifier& m, const ScaleField& h, FrameDerivativeOptions fd = {});

  const LipschitzGraph& graph() const { return g_; }
  const Mollifier& mollifier() const { return m_; }
  const ScaleField& scale() const { return h_; }
  DistanceVariant variant() const { return h_.variant(); }
  const FrameDerivativeOptions& fd_options() const { return fd_; }

  Vec operator()(const Vec& x, const Vec& t) const;
  // D(X) for the map's distance variant.
  double distance(const Vec& X) const;

 private:
  const LipschitzGraph& g_;
  const Mollifier& m_;
  const ScaleField& h_;
  FrameDerivativeOptions fd_;
};

Vec rho(const RhoMap& map, const Vec& x, const Vec& t);

struct JacobianBundle {
  int d = 1;
  int n = 3;
  double h = 1.0;
  Vec grad_h;  // (d_x h, d_t h)
  Mat Jac;     // rows: derivatives of rho in x_1..x_d, t_{d+1}..t_n
  Mat Q;       // columns: v^1..v^d, w^{d+1}..w^n
  Mat J, Jprime, H, M, Jpp;
  double detJ = 0.0;
  double detJprime = 0.0;
  double detJprime_product = 0.0;  // h^{n-d} prod <v_hat^i, v^i>
  double epsilon = 0.0;            // |det J / h^{n-d} - 1|
  Frame frame;
  SmoothedJet jet;

  double jac_q_error() const { return (J - Jac * Q).cwiseAbs().maxCoeff(); }
  double decomposition_error() const { return (J - (Jprime + H + M)).cwiseAbs().maxCoeff(); }
  double q_orthogonality_error() const;
};

JacobianBundle jacobian_bundle(const RhoMap& map, const Vec& x, const Vec& t);

struct InverseOptions {
  int max_iterations = 50;
  double tolerance = 1e-8;  // relative to max(1, |Z|)
  double target = 1e-13;
};

struct InverseResult {
  Vec x, t;
  double residual = 0.0;
  int iterations = 0;
};

InverseResult rho_inverse(const RhoMap& map, const Vec& Z, const InverseOptions& opt = {});

struct ConjugatedMatrix {
  int d = 1;
  int n = 3;
  Mat A;
  double b = 1.0;
  double f = 1.0;
  Mat A1;                  // d x d
  Mat C1, C2, C3, C4;      // residual blocks
  double dist_ratio = 0;   // |t| / D(rho(x,t)) - 1

  Mat reassemble() const;
  // Eigenvalue band of the symmetric part.
  std::pair<double, double> ellipticity() const;
};

ConjugatedMatrix conjugated_matrix(const RhoMap& map, const Vec& x, const Vec& t);
ConjugatedMatrix conjugated_matrix(const RhoMap& map, const JacobianBundle& jb, const Vec& t);

// b(x,t) = h^{n-d-2} det(J'_1) and its (x,t) gradient by central differences.
double b_value(const RhoMap& map, const Vec& x, const Vec& t);
Vec b_gradient(const RhoMap& map, const Vec& x, const Vec& t, double kappa = 1e-3);

}  // namespace hm
