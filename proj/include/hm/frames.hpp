#pragma once

#include <vector>

#include "hm/linalg.hpp"
#include "hm/mollifier.hpp"

namespace hm {

struct RawVectors {
  std::vector<Vec> v;  // v_hat^i = (e^i, d_{x_i} phi_r), i = 1..d
  std::vector<Vec> w;  // w_hat^j = (-grad_x phi_r^j, e^j), j = d+1..n
};

struct Frame {
  int d = 1;
  int n = 3;
  std::vector<Vec> v;
  std::vector<Vec> w;
  Vec base;
  RawVectors raw;
  std::vector<double> gs_norms;  // |v_tilde^i| then |w_tilde^j|
  Mat basis;                     // columns v^1..v^d, w^{d+1}..w^n

  // Frame invariant residuals.
  double gram_error() const;
  double raw_cross_error() const;        // max |<v_hat^i, w_hat^j>|
  double triangularity_error() const;    // max |<v_hat^k, v^l>|, k < l
  // min and max of <v_hat^i, v^i>.
  std::pair<double, double> diagonal_band() const;
  double max_w_deviation_sq() const;     // max |w^j - e^j|^2
};

RawVectors raw_vectors(const SmoothedJet& jet);
Frame orthonormal_frame(const RawVectors& raw, const Vec& base);
Frame frame_at(const LipschitzGraph& g, const Mollifier& m, const Vec& x, double r);

// R_{x,r} u = sum_i u_i v^i + sum_j u_j w^j.
Vec apply_isometry(const Frame& f, const Vec& u);

struct FrameDerivatives {
  int d = 1;
  // dbasis[a] holds the derivative of the basis matrix in direction a, with
  // a = 0..d-1 for x_1..x_d and a = d for r. Column order as Frame::basis.
  std::vector<Mat> dbasis;
  double step = 0.0;
  double disagreement = 0.0;  // Richardson consistency residual (relative)
  bool consistent = true;

  Vec dv(int a, int i) const { return dbasis[a].col(i); }
  Vec dw(int a, int j) const { return dbasis[a].col(d + j); }
  double norm() const;
};

struct FrameDerivativeOptions {
  double kappa = 1e-3;
  double tolerance = 1e-4;
  bool throw_on_disagreement = true;
};

FrameDerivatives frame_derivatives(const LipschitzGraph& g, const Mollifier& m, const Vec& x, double r,
                                   const FrameDerivativeOptions& opt = {});

}  // namespace hm
