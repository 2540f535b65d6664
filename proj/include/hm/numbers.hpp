#pragma once

#include <string>
#include <vector>

#include "hm/distance.hpp"
#include "hm/frames.hpp"

namespace hm {

struct DiscreteMeasure {
  std::vector<Vec> points;
  std::vector<double> weights;
  std::string provenance;

  double mass() const;
  // Minimum weight (must be nonnegative).
  double min_weight() const;
  // Largest excess of |p - z| over R among atoms.
  double patch_excess(const Vec& z, double R) const;
};

// c times d-dimensional Hausdorff measure on the plane point + span(frame).
struct FlatMeasure {
  Vec point;
  Mat frame;  // n x d, orthonormal columns
  double c = 1.0;

  double frame_error() const;
  // n x (n-d) orthonormal complement.
  Mat normal() const;
};

// Atoms of sigma in B(z,R): Phi of the global parameter lattice ((k+1/2) s)^d
// with weight surface_density * s^d.
DiscreteMeasure graph_atoms(const LipschitzGraph& g, const Vec& z, double R, double spacing);

// Atoms of a flat measure in B(z,R): orthogonal projections of the same lattice
// onto the plane, weighted by c |det(U^T DPhi)| s^d, so mu is discretized as a
// pushforward of Lebesgue measure on the parameter lattice.
DiscreteMeasure flat_atoms(const LipschitzGraph& g, const FlatMeasure& mu, const Vec& z, double R, double spacing);

// r^{-d-1} sup over 1-Lipschitz f vanishing off B(z,r) of |int f dsigma - int f dmu|.
double wasserstein_distance(int d, const Vec& z, double r, const DiscreteMeasure& mu, const DiscreteMeasure& sigma);

// Plane P(x,r) through Phi_r(x) spanned by the v-frame, weighted by lambda(x,r).
FlatMeasure replacement_measure(const LipschitzGraph& g, const Mollifier& m, const DensityBump& bump, const Vec& x,
                                double r);

struct AlphaOptions {
  int atoms_per_radius = 32;  // lattice spacing R / atoms_per_radius when spacing == 0
  double spacing = 0.0;
  int restarts = 3;
  int max_evaluations = 160;  // per restart
  double tolerance = 1e-4;    // relative simplex spread
  double sigma_scale = 1.0;  // compare flat measures against sigma_scale * sigma
  std::vector<FlatMeasure> extra_seeds;
};

struct AlphaResult {
  double value = 0.0;
  FlatMeasure best;
  double seed_value = 0.0;
  double spacing = 0.0;
  int evaluations = 0;
  bool converged = false;
};

// Distance from sigma to flat measures in B(z,R); seeds from the replacement
// measures at x = z_x, scales R and R/4.
AlphaResult alpha_tilde(const LipschitzGraph& g, const Mollifier& m, const Vec& z, double R,
                        const AlphaOptions& opt = {});

// alpha(x,r) = alpha_tilde(Phi(x), 4r).
AlphaResult alpha_number(const LipschitzGraph& g, const Mollifier& m, const Vec& x, double r,
                         const AlphaOptions& opt = {});

struct BetaOptions {
  int samples = 1025;  // per axis
  int max_iterations = 20000;
  double tolerance = 1e-11;
};

double beta_number(const LipschitzGraph& g, const Vec& x, double r, const BetaOptions& opt = {});
double beta_eta_number(const LipschitzGraph& g, const Mollifier& m, const Vec& x, double r,
                       const BetaOptions& opt = {});
// Sample points of B(x,r) used for the sup in both beta numbers.
std::vector<Vec> beta_samples(const LipschitzGraph& g, const Vec& x, double r, int samples);

struct SeriesResult {
  double value = 0.0;
  double tail_bound = 0.0;
  std::vector<double> terms;
};

SeriesResult a_series(const LipschitzGraph& g, const Mollifier& m, const Vec& x, double r, double alpha, int K = 8,
                      const AlphaOptions& opt = {});

// dist_{Phi(x),r}(lambda(x,r) mu_{P(x,r)}, sigma).
double replacement_distance(const LipschitzGraph& g, const Mollifier& m, const Vec& x, double r,
                            const AlphaOptions& opt = {});

// r^alpha |D(z)^{-alpha} - c_alpha lambda(x,r) dist(z,P(x,r))^{-alpha}|.
double plane_residual(const LipschitzGraph& g, const Mollifier& m, const SoftDistanceParams& p, const Vec& x, double r,
                      const Vec& z);

}  // namespace hm
