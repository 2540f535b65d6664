#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "hm/linalg.hpp"
#include "hm/quadrature.hpp"

namespace hm {

enum class GraphFamily { Zero, Affine, Sinusoid, Fourier, Corner };

std::string to_string(GraphFamily f);
GraphFamily graph_family_from_string(const std::string& s);

struct FourierMode {
  Vec amplitude;  // in R^{n-d}
  Vec frequency;  // in R^d
  double phase = 0.0;
};

// Declarative description of a Lipschitz graph Gamma = {(x, phi(x))} in R^n.
struct GraphSpec {
  int d = 1;
  int n = 3;
  GraphFamily family = GraphFamily::Zero;
  Vec offset;     // affine: phi(0)
  Mat slope;      // affine: (n-d) x d
  Vec amplitude;  // sinusoid, corner (direction times c)
  Vec frequency;  // sinusoid
  double phase = 0.0;
  int modes = 4;           // fourier
  std::uint64_t seed = 1;  // fourier
  double c0 = -1.0;        // declared bound; negative means derive from parameters
};

class LipschitzGraph {
 public:
  explicit LipschitzGraph(GraphSpec spec);

  static LipschitzGraph zero(int d, int n);
  static LipschitzGraph affine(const Mat& slope, const Vec& offset);
  static LipschitzGraph sinusoid(int d, const Vec& amplitude, const Vec& frequency, double phase = 0.0);
  static LipschitzGraph fourier(int d, int n, int modes, double c0, std::uint64_t seed);
  static LipschitzGraph corner(const Vec& amplitude);

  int d() const { return spec_.d; }
  int n() const { return spec_.n; }
  int codim() const { return spec_.n - spec_.d; }
  double c0() const { return c0_; }
  GraphFamily family() const { return spec_.family; }
  const GraphSpec& spec() const { return spec_; }
  const std::vector<FourierMode>& modes() const { return modes_; }

  Vec phi(const Vec& x) const;
  // (n-d) x d Jacobian of phi. Throws at a non-differentiability point.
  Mat dphi(const Vec& x) const;
  // Coordinates where phi fails to be smooth (d = 1 only); used as quadrature cuts.
  std::vector<double> breakpoints() const;
  bool smooth() const { return spec_.family != GraphFamily::Corner; }

 private:
  GraphSpec spec_;
  std::vector<FourierMode> modes_;
  double c0_ = 0.0;
};

// Phi(x) = (x, phi(x)).
Vec eval_graph(const LipschitzGraph& g, const Vec& x);

// Area-formula density sqrt(det(I + Dphi^T Dphi)).
double surface_density(const LipschitzGraph& g, const Vec& x);

// dist(X, Gamma) by multi-start local minimization over the parameter.
double euclidean_distance(const LipschitzGraph& g, const Vec& X, Vec* foot = nullptr);

// Largest sampled difference quotient |phi(x)-phi(y)|/|x-y| over a random cloud.
double sampled_lipschitz(const LipschitzGraph& g, int samples, std::uint64_t seed, double spread = 4.0);

}  // namespace hm
