#include "hm/carleson.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "hm/quadrature.hpp"
#include "json.hpp"

namespace hm {

namespace {

// One radial shell [ra, rb] with its own uniform y lattice over the window.
struct Shell {
  double ra, rb, rho;
  double dy;
  int cells;                   // per axis
  std::vector<double> prefix;  // per component: d=1 cumulative along y; d=2 row-wise cumulative
};

double sphere_measure(int m) { return m == 1 ? 2.0 : 2.0 * std::numbers::pi; }

// Directions on |s'| = rho with quadrature weights summing to the sphere measure.
void sphere_rule(int m, int angles, std::vector<Vec>& dirs, std::vector<double>& wts) {
  if (angles <= 1) {
    dirs.push_back(unit(m, 0));
    wts.push_back(sphere_measure(m));
    return;
  }
  if (m == 1) {
    dirs.push_back(unit(1, 0));
    dirs.push_back(-unit(1, 0));
    wts.assign(2, 1.0);
    return;
  }
  if (m != 2) throw std::invalid_argument("carleson: codimension must be 1 or 2");
  for (int k = 0; k < angles; ++k) {
    double th = 2.0 * std::numbers::pi * (k + 0.5) / angles;
    Vec u(2);
    u << std::cos(th), std::sin(th);
    dirs.push_back(u);
    wts.push_back(2.0 * std::numbers::pi / angles);
  }
}

}  // namespace

CarlesonReport carleson_norm(const VectorField& f, int d, int n, const CarlesonWindow& w,
                             const CarlesonSettings& opt) {
  if (!(w.r > 0.0) || w.depth < 1) throw std::invalid_argument("carleson: need r > 0 and depth >= 1");
  if (d < 1 || d > 2 || n <= d) throw std::invalid_argument("carleson: unsupported dimensions");
  const int m = n - d;
  const double r = w.r;
  const double lo_edge = std::ldexp(r, -(w.depth + opt.extra_octaves));
  const int nshell = opt.shells_per_octave * (w.depth + opt.extra_octaves);
  std::vector<Vec> dirs;
  std::vector<double> dwts;
  sphere_rule(m, opt.angles, dirs, dwts);
  const Rule& gl = gauss_legendre(opt.phi_nodes);

  // Shell lattices: spacing r 2^-p <= ra / cells_per_shell.
  std::vector<Shell> shells(nshell);
  for (int j = 0; j < nshell; ++j) {
    Shell& sh = shells[j];
    sh.ra = lo_edge * std::pow(2.0, double(j) / opt.shells_per_octave);
    sh.rb = lo_edge * std::pow(2.0, double(j + 1) / opt.shells_per_octave);
    sh.rho = std::sqrt(sh.ra * sh.rb);
    int p = static_cast<int>(std::ceil(std::log2(r * opt.cells_per_shell / sh.ra) - 1e-12));
    sh.dy = std::ldexp(r, -std::max(p, 0));
    sh.cells = static_cast<int>(std::lround(2.0 * r / sh.dy));
  }

  // Probe component count.
  int ncomp = static_cast<int>(f(w.x, shells.back().rho * dirs[0]).size());
  if (ncomp < 1) throw std::invalid_argument("carleson: field has no components");

  CarlesonReport rep;
  rep.settings = opt;
  for (int j = 0; j < nshell; ++j) {
    Shell& sh = shells[j];
    const int N = sh.cells;
    const long ncell = d == 1 ? N : static_cast<long>(N) * N;
    std::vector<double> val(static_cast<size_t>(ncell) * ncomp, 0.0);
#pragma omp parallel for schedule(dynamic)
    for (long c = 0; c < ncell; ++c) {
      Vec y = w.x;
      y(0) += -r + (static_cast<double>(c % N) + 0.5) * sh.dy;
      if (d == 2) y(1) += -r + (static_cast<double>(c / N) + 0.5) * sh.dy;
      for (size_t a = 0; a < dirs.size(); ++a) {
        Eigen::VectorXd v = f(y, sh.rho * dirs[a]);
        for (int q = 0; q < ncomp; ++q) val[static_cast<size_t>(c) * ncomp + q] += dwts[a] * v(q) * v(q);
      }
    }
    rep.evaluations += ncell * static_cast<long>(dirs.size());
    // Prefix sums along y_1 (row-wise when d = 2), with cell width dy.
    sh.prefix.assign(static_cast<size_t>(ncomp) * (d == 1 ? N + 1 : static_cast<size_t>(N) * (N + 1)), 0.0);
    const int rows = d == 1 ? 1 : N;
    for (int q = 0; q < ncomp; ++q)
      for (int row = 0; row < rows; ++row) {
        double* P = &sh.prefix[(static_cast<size_t>(q) * rows + row) * (N + 1)];
        for (int i = 0; i < N; ++i)
          P[i + 1] = P[i] + val[(static_cast<size_t>(row) * N + i) * ncomp + q] * sh.dy;
      }
  }

  // Integral of the cell-constant angular density over a y_1 interval [a, b].
  auto line = [&](const Shell& sh, int q, int row, double a, double b) {
    const int N = sh.cells;
    const int rows = d == 1 ? 1 : N;
    const double* P = &sh.prefix[(static_cast<size_t>(q) * rows + row) * (N + 1)];
    auto at = [&](double y) {
      double u = (y - (w.x(0) - r)) / sh.dy;
      u = std::clamp(u, 0.0, static_cast<double>(N));
      int i = std::min(static_cast<int>(u), N - 1);
      return P[i] + (u - i) * (P[i + 1] - P[i]);
    };
    return at(b) - at(a);
  };
  // Integral over the d-ball of radius h centered at y.
  auto slab = [&](const Shell& sh, int q, const Vec& y, double h) {
    if (d == 1) return line(sh, q, 0, y(0) - h, y(0) + h);
    const int N = sh.cells;
    double total = 0.0;
    double y2lo = w.x(1) - r;
    int r0 = std::max(0, static_cast<int>(std::floor((y(1) - h - y2lo) / sh.dy)));
    int r1 = std::min(N - 1, static_cast<int>(std::floor((y(1) + h - y2lo) / sh.dy)));
    for (int row = r0; row <= r1; ++row) {
      double a = std::max(y2lo + row * sh.dy, y(1) - h), b = std::min(y2lo + (row + 1) * sh.dy, y(1) + h);
      if (b <= a) continue;
      // chord half-width averaged over the row slice by the midpoint of the overlap
      double yc = 0.5 * (a + b) - y(1);
      double c = std::sqrt(std::max(0.0, h * h - yc * yc));
      total += line(sh, q, row, y(0) - c, y(0) + c) * (b - a) / sh.dy;
    }
    return total;
  };

  // Box value: s^-d sum_shells \int_{ra}^{min(rb,s)} slab(s cos phi) dphi cot(phi), rho = s sin phi.
  auto box = [&](const Vec& y, double s, int q, std::vector<double>* octave) {
    double total = 0.0;
    for (int j = nshell - 1; j >= 0; --j) {
      const Shell& sh = shells[j];
      if (sh.ra >= s) continue;
      double p0 = std::asin(sh.ra / s), p1 = std::asin(std::min(sh.rb, s) / s);
      double part = 0.0;
      for (size_t k = 0; k < gl.size(); ++k) {
        double ph = 0.5 * (p0 + p1) + 0.5 * (p1 - p0) * gl.x[k];
        double wk = 0.5 * (p1 - p0) * gl.w[k];
        part += wk * std::cos(ph) / std::sin(ph) * slab(sh, q, y, s * std::cos(ph));
      }
      total += part;
      if (octave) octave->push_back(total / std::pow(s, d));
    }
    return total / std::pow(s, d);
  };

  rep.component_norms.assign(ncomp, 0.0);
  rep.profile.assign(w.depth + 1, 0.0);
  for (int k = 0; k <= w.depth; ++k) {
    const double s = std::ldexp(r, -k);
    const double step = opt.fine_centers ? 0.5 * s : s;
    const int J = static_cast<int>(std::floor((r - s) / step + 1e-9));
    std::vector<Vec> centers;
    if (d == 1) {
      for (int i = -J; i <= J; ++i) {
        Vec y = w.x;
        y(0) += i * step;
        centers.push_back(y);
      }
    } else {
      for (int i = -J; i <= J; ++i)
        for (int l = -J; l <= J; ++l) {
          Vec y = w.x;
          y(0) += i * step;
          y(1) += l * step;
          centers.push_back(y);
        }
    }
    std::vector<double> vals(centers.size() * ncomp);
#pragma omp parallel for schedule(dynamic)
    for (long c = 0; c < static_cast<long>(centers.size()); ++c)
      for (int q = 0; q < ncomp; ++q) vals[c * ncomp + q] = box(centers[c], s, q, nullptr);
    for (size_t c = 0; c < centers.size(); ++c)
      for (int q = 0; q < ncomp; ++q) {
        double v = vals[c * ncomp + q];
        rep.boxes.push_back({centers[c], s, q, v});
        rep.profile[k] = std::max(rep.profile[k], v);
        if (v > rep.component_norms[q]) rep.component_norms[q] = v;
      }
    rep.box_count += static_cast<long>(centers.size());
  }
  for (int q = 0; q < ncomp; ++q)
    if (rep.component_norms[q] > rep.norm) rep.norm = rep.component_norms[q], rep.argmax_component = q;

  // Cumulative top-box integral per octave for the dominant component.
  std::vector<double> shellwise;
  box(w.x, r, rep.argmax_component, &shellwise);
  for (size_t j = 0; j < shellwise.size(); ++j)
    if ((j + 1) % opt.shells_per_octave == 0 || j + 1 == shellwise.size()) rep.partial.push_back(shellwise[j]);
  return rep;
}

CarlesonReport carleson_norm(const ScalarField& f, int d, int n, const CarlesonWindow& w,
                             const CarlesonSettings& opt) {
  VectorField g = [&](const Vec& y, const Vec& s) {
    Eigen::VectorXd v(1);
    v(0) = f(y, s);
    return v;
  };
  return carleson_norm(g, d, n, w, opt);
}

CarlesonReport carleson_norm(const MatrixField& f, int d, int n, const CarlesonWindow& w,
                             const CarlesonSettings& opt) {
  VectorField g = [&](const Vec& y, const Vec& s) {
    Mat M = f(y, s);
    Eigen::VectorXd v(M.size());
    for (Eigen::Index i = 0; i < M.size(); ++i) v(i) = M.data()[i];
    return v;
  };
  return carleson_norm(g, d, n, w, opt);
}

std::string CarlesonReport::summary_json() const {
  nlohmann::json j;
  j["norm"] = norm;
  j["argmax_component"] = argmax_component;
  j["boxes"] = box_count;
  j["evaluations"] = evaluations;
  j["profile"] = profile;
  j["partial"] = partial;
  j["component_norms"] = component_norms;
  return j.dump();
}

std::string CarlesonReport::boxes_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "center_x1,center_x2,scale,component,value\n";
  for (const CarlesonBox& b : boxes)
    os << b.center(0) << "," << (b.center.size() > 1 ? b.center(1) : 0.0) << "," << b.scale << "," << b.component
       << "," << b.value << "\n";
  return os.str();
}

}  // namespace hm
