#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hm/linalg.hpp"

namespace hm {

// Sub-balls Delta(y,s) with s = r 2^-k, k = 0..depth, centered on a lattice of
// spacing s inside the window Delta(x,r).
struct CarlesonWindow {
  Vec x;
  double r = 1.0;
  int depth = 4;
};

struct CarlesonSettings {
  int shells_per_octave = 4;
  int angles = 8;          // samples on |s'| = const when n - d = 2; 1 for radial fields
  int phi_nodes = 8;       // Gauss nodes per shell in the chord angle
  int cells_per_shell = 4; // y cells per inner shell radius
  int extra_octaves = 1;   // radial shells below the smallest scale
  bool fine_centers = false;  // center spacing s/2
};

struct CarlesonBox {
  Vec center;
  double scale = 0.0;
  int component = 0;
  double value = 0.0;
};

struct CarlesonReport {
  double norm = 0.0;
  int argmax_component = 0;
  std::vector<double> component_norms;
  std::vector<double> profile;  // max box value per scale k
  std::vector<double> partial;  // cumulative top-box integral, one entry per radial octave from the top
  long box_count = 0;
  long evaluations = 0;
  CarlesonSettings settings;
  std::vector<CarlesonBox> boxes;

  std::string summary_json() const;
  std::string boxes_csv() const;
};

// Field components at (y, s'); each component is reduced separately and the
// norm is the max over components (entrywise convention for matrix fields).
using VectorField = std::function<Eigen::VectorXd(const Vec& y, const Vec& s)>;
using ScalarField = std::function<double(const Vec& y, const Vec& s)>;
using MatrixField = std::function<Mat(const Vec& y, const Vec& s)>;

// sup over boxes of s^-d \iint_{B((y,0),s)} |f|^2 dy' ds' / |s'|^{n-d}.
CarlesonReport carleson_norm(const VectorField& f, int d, int n, const CarlesonWindow& w,
                             const CarlesonSettings& opt = {});
CarlesonReport carleson_norm(const ScalarField& f, int d, int n, const CarlesonWindow& w,
                             const CarlesonSettings& opt = {});
CarlesonReport carleson_norm(const MatrixField& f, int d, int n, const CarlesonWindow& w,
                             const CarlesonSettings& opt = {});

}  // namespace hm
