#pragma once

#include <memory>
#include <vector>

#include "hm/graph.hpp"
#include "hm/mollifier.hpp"

namespace hm {

// Integral over R^d of (1+|x|^2)^{-(d+alpha)/2}.
double normalizing_constant(int d, double alpha);

// |S^{d-1}|.
double sphere_area(int d);

struct SoftDistanceParams {
  double alpha = 1.0;
  double c_alpha = 0.0;
  double tail_radius = 64.0;
  int order = 16;              // Gauss points per near-field panel
  double first_panel = 0.25;   // first panel width, in units of the vertical distance
  int angular = 32;            // angular points when d = 2
  int tail_order = 24;
  double tolerance = 1e-8;     // relative near-field quadrature tolerance

  static SoftDistanceParams make(int d, double alpha);
};

struct SoftDistanceResult {
  double value = 0.0;
  double near = 0.0;
  double tail = 0.0;
  double error_estimate = 0.0;  // relative
  double tail_fraction = 0.0;
};

SoftDistanceResult d_alpha_detail(const LipschitzGraph& g, const Mollifier& m, const SoftDistanceParams& p,
                                  const Vec& X);
double d_alpha(const LipschitzGraph& g, const Mollifier& m, const SoftDistanceParams& p, const Vec& X);

// Radial C^infinity bump: 1 on B(0,1/2), 0 outside B(0,1).
class DensityBump {
 public:
  explicit DensityBump(int d);
  double profile(double s) const;
  double operator()(const Vec& X) const { return profile(X.norm()); }
  double a0() const { return a0_; }
  int d() const { return d_; }
  // a0 recomputed with Gauss-Kronrod, for re-quadrature checks.
  double a0_check() const;

 private:
  int d_;
  double a0_;
};

struct LambdaOptions {
  int order = 16;
  int panels = 8;
  int angular = 32;
};

double lambda_density(const LipschitzGraph& g, const Mollifier& m, const DensityBump& bump, const Vec& x, double r,
                      const LambdaOptions& opt = {});
double lambda_density(const LipschitzGraph& g, const DensityBump& bump, const SmoothedJet& jet,
                      const LambdaOptions& opt = {});

double h_value(const LipschitzGraph& g, const Mollifier& m, const SoftDistanceParams& p, const DensityBump& bump,
               const Vec& x, const Vec& t);

enum class DistanceVariant { Soft, Euclidean };

struct LatticeSpec {
  Vec x_lo, x_hi;    // parameter box
  double r_lo = 1e-3, r_hi = 2.0;
  int x_cells = 64;  // per axis
  int r_cells = 48;  // in log r
};

// The scale function h(x,t) = (c_alpha lambda(x,|t|))^{1/alpha}, or h = 1 for
// the Euclidean variant. Optionally backed by an (x, log r) lattice.
class ScaleField {
 public:
  ScaleField(const LipschitzGraph& g, const Mollifier& m, DistanceVariant variant, SoftDistanceParams p,
             double fd_kappa = 1e-3);

  void build_cache(const LatticeSpec& spec);
  bool cached() const { return !cache_.empty(); }

  double value(const Vec& x, double r) const;
  double direct(const Vec& x, double r) const;
  // Gradient in (x, t), length n.
  Vec gradient(const Vec& x, const Vec& t) const;
  // Max relative interpolation error at random off-lattice points.
  double sample_interpolation_error(int samples, std::uint64_t seed) const;

  DistanceVariant variant() const { return variant_; }
  const SoftDistanceParams& params() const { return p_; }
  const DensityBump& bump() const { return bump_; }
  const LatticeSpec& lattice() const { return spec_; }

 private:
  double interpolate(const Vec& x, double r) const;
  bool inside(const Vec& x, double r) const;

  const LipschitzGraph& g_;
  const Mollifier& m_;
  DistanceVariant variant_;
  SoftDistanceParams p_;
  DensityBump bump_;
  double kappa_;
  LatticeSpec spec_;
  std::vector<double> cache_;
};

// D(X): the soft distance for the soft variant, dist(X, Gamma) otherwise.
double distance_function(const LipschitzGraph& g, const Mollifier& m, DistanceVariant variant,
                         const SoftDistanceParams& p, const Vec& X);

}  // namespace hm
