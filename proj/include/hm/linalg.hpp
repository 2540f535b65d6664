#pragma once

#include <Eigen/Dense>

namespace hm {

// Small dense types. Ambient dimension never exceeds 4, so storage is inline.
inline constexpr int kMaxDim = 4;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;

inline Vec unit(int n, int k) {
  Vec e = Vec::Zero(n);
  e(k) = 1.0;
  return e;
}

inline Vec concat(const Vec& a, const Vec& b) {
  Vec out(a.size() + b.size());
  out << a, b;
  return out;
}

}  // namespace hm
