#include "hm/diagnostics.hpp"
#include "hm/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace hm {

int enlargement_factor(double aperture) {
  if (!(aperture > 0.0)) throw std::invalid_argument("cone aperture must be positive");
  return static_cast<int>(std::ceil(1.0 + 4.0 * aperture - 1e-12));
}

std::vector<Vec> cell_gradients(const WeightedGrid& g, const std::vector<double>& u) {
  const int n = g.p.n, Nx = g.p.Nx, Nt = g.p.Nt, half = Nt / 2;
  std::vector<Vec> out(g.cells);
  const double h[3] = {g.hx, g.ht, g.ht};
#pragma omp parallel for schedule(static)
  for (int c = 0; c < g.cells; ++c) {
    int ijk[3];
    g.unpack(c, ijk[0], ijk[1], ijk[2]);
    Vec grad(n);
    for (int a = 0; a < n; ++a) {
      int lim = a == 0 ? Nx : Nt;
      auto nb = [&](int dir) {
        int v[3] = {ijk[0], ijk[1], ijk[2]};
        v[a] += dir;
        if (v[a] < 0 || v[a] >= lim) return -1;
        if (n == 2 && a == 1 && ((ijk[1] == half - 1 && dir == 1) || (ijk[1] == half && dir == -1))) return -1;
        return g.index(v[0], v[1], v[2]);
      };
      int lo = nb(-1), hi = nb(1);
      if (lo >= 0 && hi >= 0)
        grad(a) = (u[hi] - u[lo]) / (2.0 * h[a]);
      else if (hi >= 0)
        grad(a) = (u[hi] - u[c]) / h[a];
      else if (lo >= 0)
        grad(a) = (u[c] - u[lo]) / h[a];
      else
        grad(a) = 0.0;
    }
    out[c] = grad;
  }
  return out;
}

double BoundaryValues::l2_squared() const {
  double sum = 0.0;
  for (size_t i = 0; i < values.size(); ++i) sum += values[i] * values[i] * overlap[i];
  return sum;
}

namespace {

// Boundary cells meeting Q with their overlap lengths.
std::vector<int> cube_cells(const WeightedGrid& g, const BoundaryCube& Q, std::vector<double>& overlap) {
  std::vector<int> out;
  overlap.clear();
  double a = Q.center - 0.5 * Q.side, b = Q.center + 0.5 * Q.side;
  for (int i = 0; i < g.boundary_cells; ++i) {
    double x = g.boundary_x(i);
    double len = std::min(b, x + 0.5 * g.hx) - std::max(a, x - 0.5 * g.hx);
    if (len > 1e-12 * g.hx) {
      out.push_back(i);
      overlap.push_back(len);
    }
  }
  return out;
}

// Calls fn(cell, |s|, |Y - (x,0)|) for cells in the cone over x.
template <class Fn>
bool for_cone(const WeightedGrid& g, double x, double height, double aperture, Fn fn) {
  bool clipped = x - aperture * height < -g.p.Lx || x + aperture * height > g.p.Lx || height > g.p.Lt;
  int i0 = std::max(0, static_cast<int>(std::floor((x - aperture * height + g.p.Lx) / g.hx)) - 1);
  int i1 = std::min(g.p.Nx - 1, static_cast<int>(std::floor((x + aperture * height + g.p.Lx) / g.hx)) + 1);
  const int Nt = g.p.Nt;
  const int kmax = g.p.n == 3 ? Nt : 1;
  for (int k = 0; k < kmax; ++k)
    for (int j = 0; j < Nt; ++j) {
      double t1 = -g.p.Lt + (j + 0.5) * g.ht;
      double t2 = g.p.n == 3 ? -g.p.Lt + (k + 0.5) * g.ht : 0.0;
      double s = std::hypot(t1, t2);
      if (!(s < height)) continue;
      for (int i = i0; i <= i1; ++i) {
        double y = g.boundary_x(i);
        if (!(std::abs(y - x) < aperture * s)) continue;
        fn(g.index(i, j, k), s, std::hypot(y - x, s));
      }
    }
  return clipped;
}

}  // namespace

BoundaryValues square_function(const WeightedGrid& g, const std::vector<double>& u, const BoundaryCube& Q,
                               double height, const ConeParams& cone) {
  std::vector<Vec> grad = cell_gradients(g, u);
  BoundaryValues bv;
  bv.cells = cube_cells(g, Q, bv.overlap);
  bv.values.assign(bv.cells.size(), 0.0);
  const double vol = g.cell_volume();
  const int expo = g.p.n - 2;
  int clipped = 0;
  for (size_t q = 0; q < bv.cells.size(); ++q) {
    double x = g.boundary_x(bv.cells[q]), sum = 0.0;
    clipped += for_cone(g, x, height, cone.aperture, [&](int c, double, double dist) {
      sum += grad[c].squaredNorm() * vol / std::pow(dist, expo);
    });
    bv.values[q] = std::sqrt(sum);
  }
  bv.clipped_fraction = bv.cells.empty() ? 0.0 : double(clipped) / bv.cells.size();
  return bv;
}

BoundaryValues nontangential_max(const WeightedGrid& g, const std::vector<double>& u, const BoundaryCube& Q,
                                 double height, const ConeParams& cone) {
  BoundaryValues bv;
  bv.cells = cube_cells(g, Q, bv.overlap);
  bv.values.assign(bv.cells.size(), 0.0);
  int clipped = 0;
  for (size_t q = 0; q < bv.cells.size(); ++q) {
    double x = g.boundary_x(bv.cells[q]), best = 0.0;
    clipped += for_cone(g, x, height, cone.aperture, [&](int c, double, double) { best = std::max(best, std::abs(u[c])); });
    bv.values[q] = best;
  }
  bv.clipped_fraction = bv.cells.empty() ? 0.0 : double(clipped) / bv.cells.size();
  return bv;
}

SqfnRatio sqfn_ratio(const WeightedGrid& g, const std::vector<double>& u, const BoundaryCube& Q,
                     const ConeParams& cone) {
  SqfnRatio r;
  r.k0 = enlargement_factor(cone.aperture);
  BoundaryValues S = square_function(g, u, Q, Q.side, cone);
  BoundaryCube big{Q.center, r.k0 * Q.side};
  BoundaryValues N = nontangential_max(g, u, big, 2.0 * Q.side, cone);
  r.numerator = S.l2_squared();
  r.denominator = N.l2_squared();
  r.clipped_fraction = std::max(S.clipped_fraction, N.clipped_fraction);
  if (r.denominator == 0.0) {
    r.degenerate = true;
    r.value = 0.0;
  } else {
    r.value = r.numerator / r.denominator;
  }
  return r;
}

SolutionCarleson solution_carleson(const WeightedGrid& g, const std::vector<double>& u, const CarlesonWindow& w,
                                   const CarlesonSettings& opt, const ConeParams& cone) {
  std::vector<Vec> grad = cell_gradients(g, u);
  ScalarField field = [&](const Vec& y, const Vec& s) {
    int c = g.locate(y(0), s);
    return s.norm() * grad[c].norm();
  };
  SolutionCarleson out;
  out.report = carleson_norm(field, g.p.d, g.p.n, w, opt);
  // sup over dyadic sub-cubes of the window of |Q|^-1 ||S^Q u||^2
  for (int k = 0; k <= w.depth; ++k) {
    double side = std::ldexp(2.0 * w.r, -k);
    int count = 1 << k;
    for (int q = 0; q < count; ++q) {
      BoundaryCube Q{w.x(0) - w.r + (q + 0.5) * side, side};
      BoundaryValues S = square_function(g, u, Q, side, cone);
      out.square_sup = std::max(out.square_sup, S.l2_squared() / side);
    }
  }
  out.constant = out.square_sup > 0.0 ? out.report.norm / out.square_sup : 0.0;
  return out;
}

int corkscrew_cell(const WeightedGrid& g, double center, double r) {
  Vec t = Vec::Zero(g.p.n - g.p.d);
  t(0) = r;
  return g.locate(center, t);
}

double doubling_ratio(const DiscreteOperator& op, double center, double r, const SolverOptions& opt) {
  MeasureVector w = harmonic_measure(op, corkscrew_cell(op.grid, center, r), opt);
  double one = measure_of_interval(op.grid, w, center - r, center + r);
  double two = measure_of_interval(op.grid, w, center - 2 * r, center + 2 * r);
  return two / one;
}

double nondegeneracy(const DiscreteOperator& op, double center, double r, const SolverOptions& opt) {
  MeasureVector w = harmonic_measure(op, corkscrew_cell(op.grid, center, r), opt);
  return measure_of_interval(op.grid, w, center - r, center + r);
}

double AinftyScatter::max_epsilon_below(double delta) const {
  double best = 0.0;
  for (const AinftyPair& p : pairs)
    if (p.delta < delta) best = std::max(best, p.epsilon);
  return best;
}

std::string AinftyScatter::csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "delta,epsilon,family\n";
  for (const AinftyPair& p : pairs) os << p.delta << "," << p.epsilon << "," << p.family << "\n";
  return os.str();
}

AinftyScatter ainfty_scatter(const DiscreteOperator& op, const AinftyFamily& fam, const SolverOptions& opt) {
  const WeightedGrid& g = op.grid;
  AinftyScatter sc;
  std::mt19937_64 rng(fam.seed);
  std::ostringstream desc;
  desc << "balls=" << fam.centers.size() * fam.radii.size() << " sub_balls=" << fam.sub_balls
       << " random_sets=" << fam.random_sets << " seed=" << fam.seed;
  sc.description = desc.str();
  for (double c : fam.centers)
    for (double r : fam.radii) {
      MeasureVector w = harmonic_measure(op, corkscrew_cell(g, c, r), opt);
      for (int sb = 0; sb < fam.sub_balls; ++sb) {
        // nested Delta' sharing the center band of Delta
        double rp = r * std::ldexp(1.0, -sb);
        double cp = c + (sb % 2 == 0 ? 0.0 : 0.5 * (r - rp));
        std::vector<int> cells;
        for (int i = 0; i < g.boundary_cells; ++i) {
          double x = g.boundary_x(i);
          if (x >= cp - rp && x <= cp + rp) cells.push_back(i);
        }
        if (cells.empty()) continue;
        double wD = 0.0;
        for (int i : cells) wD += w.weights[i];
        if (!(wD > 0.0)) continue;
        const double size = static_cast<double>(cells.size());
        auto push = [&](const std::vector<int>& E, const char* name) {
          double wE = 0.0;
          for (int i : E) wE += w.weights[i];
          sc.pairs.push_back({wE / wD, E.size() / size, name});
        };
        push({}, "empty");
        push(cells, "full");
        // adversarial: prefixes of the cells sorted by increasing weight
        std::vector<int> order = cells;
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return w.weights[a] < w.weights[b]; });
        for (size_t m = 1; m < order.size(); ++m) push(std::vector<int>(order.begin(), order.begin() + m), "adversarial");
        // nested sub-intervals from the left end
        for (size_t m = 1; m < cells.size(); m = 2 * m) push(std::vector<int>(cells.begin(), cells.begin() + m), "nested");
        std::bernoulli_distribution coin(0.5);
        for (int rs = 0; rs < fam.random_sets; ++rs) {
          std::vector<int> E;
          double p = std::ldexp(1.0, -(rs % 5));
          std::bernoulli_distribution pick(p);
          for (int i : cells)
            if (pick(rng)) E.push_back(i);
          push(E, "random");
        }
      }
    }
  sc.decile_max_epsilon.assign(10, 0.0);
  for (const AinftyPair& p : sc.pairs) {
    int k = std::min(9, static_cast<int>(p.delta * 10.0));
    sc.decile_max_epsilon[k] = std::max(sc.decile_max_epsilon[k], p.epsilon);
  }
  return sc;
}

Band change_of_pole_band(const DiscreteOperator& op, double center, double r, const std::vector<int>& poles,
                         int sets, std::uint64_t seed, const SolverOptions& opt) {
  const WeightedGrid& g = op.grid;
  std::vector<int> cells;
  for (int i = 0; i < g.boundary_cells; ++i)
    if (std::abs(g.boundary_x(i) - center) <= r) cells.push_back(i);
  if (cells.empty()) throw std::invalid_argument("change_of_pole_band: Delta contains no boundary cells");
  MeasureVector base = harmonic_measure(op, corkscrew_cell(g, center, r), opt);
  std::vector<MeasureVector> far;
  for (int p : poles) far.push_back(harmonic_measure(op, p, opt));
  std::mt19937_64 rng(seed);
  Band band{1e300, 0.0, 0};
  for (int s = 0; s < sets; ++s) {
    std::bernoulli_distribution pick(std::ldexp(1.0, -(s % 4) - 1));
    std::vector<int> E;
    for (int i : cells)
      if (pick(rng)) E.push_back(i);
    if (E.empty()) continue;
    double wE = 0.0;
    for (int i : E) wE += base.weights[i];
    if (!(wE > 0.0)) continue;
    for (const MeasureVector& w : far) {
      double yE = 0.0, yD = 0.0;
      for (int i : E) yE += w.weights[i];
      for (int i : cells) yD += w.weights[i];
      if (!(yD > 0.0)) continue;
      double ratio = (yE / yD) / wE;
      band.lo = std::min(band.lo, ratio);
      band.hi = std::max(band.hi, ratio);
      ++band.samples;
    }
  }
  if (band.samples == 0) band.lo = 0.0;
  return band;
}

double harnack_ratio(const WeightedGrid& g, const std::vector<double>& u, double x, const Vec& t, double radius) {
  double lo = 1e300, hi = -1e300;
  for (int c = 0; c < g.cells; ++c) {
    double dx = g.x_of(c)(0) - x;
    double dist = std::sqrt(dx * dx + (g.t_of(c) - t).squaredNorm());
    if (dist >= radius) continue;
    lo = std::min(lo, u[c]);
    hi = std::max(hi, u[c]);
  }
  if (hi < lo) throw std::invalid_argument("harnack_ratio: ball contains no cells");
  if (!(lo > 0.0)) throw NumericalError("harnack_ratio", "solution is not positive on the ball", lo);
  return hi / lo;
}

HolderFit boundary_holder(const WeightedGrid& g, const std::vector<double>& u, double x, double r, int levels) {
  HolderFit fit;
  for (int k = 0; k < levels; ++k) {
    double s = std::ldexp(r, -k), best = 0.0;
    int count = 0;
    for (int c = 0; c < g.cells; ++c) {
      double dx = g.x_of(c)(0) - x;
      if (dx * dx + g.t_of(c).squaredNorm() < s * s) {
        best = std::max(best, std::abs(u[c]));
        ++count;
      }
    }
    if (count == 0) break;
    fit.radii.push_back(s);
    fit.sups.push_back(best);
  }
  const size_t m = fit.radii.size();
  if (m < 2) throw std::invalid_argument("boundary_holder: need at least two resolved radii");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t k = 0; k < m; ++k) {
    double lx = std::log(fit.radii[k] / r), ly = std::log(std::max(fit.sups[k], 1e-300));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  fit.exponent = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  fit.constant = std::exp((sy - fit.exponent * sx) / m);
  return fit;
}

double refinement_difference(const WeightedGrid& coarse, const std::vector<double>& uc, const WeightedGrid& fine,
                             const std::vector<double>& uf) {
  std::vector<double> sum(coarse.cells, 0.0);
  std::vector<int> count(coarse.cells, 0);
  for (int f = 0; f < fine.cells; ++f) {
    int c = coarse.locate(fine.x_of(f)(0), fine.t_of(f));
    sum[c] += uf[f];
    ++count[c];
  }
  double err = 0.0, vol = 0.0;
  for (int c = 0; c < coarse.cells; ++c) {
    if (count[c] == 0) continue;
    double d = uc[c] - sum[c] / count[c];
    err += d * d * coarse.cell_volume();
    vol += coarse.cell_volume();
  }
  if (vol == 0.0) throw NumericalError("refinement_difference", "grids do not overlap", 0.0);
  return std::sqrt(err / vol);
}

}  // namespace hm
