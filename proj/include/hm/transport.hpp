#pragma once

#include <vector>

#include "hm/linalg.hpp"

namespace hm {

// Value of sup { sum_i f_i c_i } over f with |f_i - f_j| <= |p_i - p_j| and |f_i| <= b_i.
// Solved through its dual, an uncapacitated transportation problem in which
// positive and negative coefficients may also be routed to a ground node at cost b_i.
struct TransportProblem {
  std::vector<Vec> points;
  std::vector<double> coeff;
  std::vector<double> bound;
};

struct TransportSolution {
  double value = 0.0;
  int augmentations = 0;
  double residual = 0.0;  // unrouted mass
};

TransportSolution solve_transport(const TransportProblem& p);

}  // namespace hm
