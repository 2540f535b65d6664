#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hm/carleson.hpp"
#include "hm/solver.hpp"

namespace hm {

struct ConeParams {
  double aperture = 1.0;
};

// Interval Q = [center - side/2, center + side/2) in R^d (d = 1).
struct BoundaryCube {
  double center = 0.0;
  double side = 0.25;
};

// Smallest integer k0 with gamma^{2Q}(x) inside k0 Q for all x in Q: ceil(1 + 4a).
int enlargement_factor(double aperture);

// Central-difference gradients per cell (one-sided at missing neighbors), n-vectors.
std::vector<Vec> cell_gradients(const WeightedGrid& g, const std::vector<double>& u);

struct BoundaryValues {
  std::vector<int> cells;  // boundary cells meeting Q
  std::vector<double> values;
  std::vector<double> overlap;  // |cell ∩ Q|, the L^2(Q) quadrature weight

  double l2_squared() const;
  double clipped_fraction = 0.0;  // boundary cells whose cone leaves the grid
};

// Cone membership: |y - x| < a |s| and 0 < |s| < height.
BoundaryValues square_function(const WeightedGrid& g, const std::vector<double>& u, const BoundaryCube& Q,
                               double height, const ConeParams& cone = {});
BoundaryValues nontangential_max(const WeightedGrid& g, const std::vector<double>& u, const BoundaryCube& Q,
                                 double height, const ConeParams& cone = {});

struct SqfnRatio {
  double value = 0.0;
  double numerator = 0.0;    // ||S^Q u||^2_{L^2(Q)}
  double denominator = 0.0;  // ||N^{2Q} u||^2_{L^2(k0 Q)}
  int k0 = 0;
  bool degenerate = false;
  double clipped_fraction = 0.0;
};

SqfnRatio sqfn_ratio(const WeightedGrid& g, const std::vector<double>& u, const BoundaryCube& Q,
                     const ConeParams& cone = {});

struct SolutionCarleson {
  CarlesonReport report;
  double square_sup = 0.0;  // sup_Q |Q|^-1 ||S^Q u||^2 over sub-cubes of the window
  double constant = 0.0;    // report.norm / square_sup
};

// Carleson norm of |t| grad_h u (piecewise constant on cells).
SolutionCarleson solution_carleson(const WeightedGrid& g, const std::vector<double>& u, const CarlesonWindow& w,
                                   const CarlesonSettings& opt = {}, const ConeParams& cone = {});

// Pole A_Delta = (center, r e_1).
int corkscrew_cell(const WeightedGrid& g, double center, double r);

double doubling_ratio(const DiscreteOperator& op, double center, double r, const SolverOptions& opt = {});
double nondegeneracy(const DiscreteOperator& op, double center, double r, const SolverOptions& opt = {});

struct Band {
  double lo = 0.0;
  double hi = 0.0;
  int samples = 0;
};

// (omega^Y(E) / omega^Y(Delta)) / omega^{A_Delta}(E) over random unions E of cells
// of Delta = [center - r, center + r] and the given poles Y.
Band change_of_pole_band(const DiscreteOperator& op, double center, double r, const std::vector<int>& poles,
                         int sets, std::uint64_t seed, const SolverOptions& opt = {});

// sup_B u / inf_B u over cells with centers in the ball B((x, t), radius).
double harnack_ratio(const WeightedGrid& g, const std::vector<double>& u, double x, const Vec& t, double radius);

struct HolderFit {
  double exponent = 0.0;
  double constant = 0.0;  // sup u(B(x,0;s)) ~ constant (s/r)^exponent
  std::vector<double> radii;
  std::vector<double> sups;
};

// Least-squares fit of log sup_{B((x,0),s)} |u| against log s for s = r 2^-k, k = 0..levels-1.
HolderFit boundary_holder(const WeightedGrid& g, const std::vector<double>& u, double x, double r, int levels);

// RMS over coarse cells of u_coarse minus the mean of the fine cells centered in each coarse cell.
double refinement_difference(const WeightedGrid& coarse, const std::vector<double>& uc, const WeightedGrid& fine,
                             const std::vector<double>& uf);

struct AinftyPair {
  double delta = 0.0;
  double epsilon = 0.0;
  std::string family;
};

struct AinftyFamily {
  std::vector<double> centers = {0.0};
  std::vector<double> radii = {0.25};
  int sub_balls = 3;      // nested Delta' per Delta
  int random_sets = 16;   // random unions per Delta'
  std::uint64_t seed = 1;
};

struct AinftyScatter {
  std::vector<AinftyPair> pairs;
  std::vector<double> decile_max_epsilon;  // max epsilon over pairs with delta in [k/10, (k+1)/10)
  std::string description;

  double max_epsilon_below(double delta) const;
  std::string csv() const;
};

AinftyScatter ainfty_scatter(const DiscreteOperator& op, const AinftyFamily& family, const SolverOptions& opt = {});

}  // namespace hm
