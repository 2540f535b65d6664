// Acceptance suite: one PASS/FAIL line per criterion.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hm/diagnostics.hpp"
#include "hm/distance.hpp"
#include "hm/fields.hpp"
#include "hm/frames.hpp"
#include "hm/numbers.hpp"
#include "hm/rho.hpp"
#include "hm/solver.hpp"

using namespace hm;

namespace {

constexpr double kPi = std::numbers::pi;

Vec v1(double a) { return Vec::Constant(1, a); }
Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

struct Outcome {
  bool pass = true;
  std::ostringstream log;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      log << "  failed: " << what << "\n";
    }
  }
  template <class T>
  void note(const std::string& key, const T& value) {
    log << "  " << key << " = " << value << "\n";
  }
};

// Graph, mollifier, scale field and map kept together.
struct Model {
  LipschitzGraph g;
  Mollifier m;
  ScaleField h;
  RhoMap map;
  Model(LipschitzGraph graph, DistanceVariant v, double alpha = 1.0)
      : g(std::move(graph)), m(g.d()), h(g, m, v, SoftDistanceParams::make(g.d(), alpha)), map(g, m, h) {}
};

LipschitzGraph sinusoid(double c0) { return LipschitzGraph::sinusoid(1, v2(c0, 0.0), v1(1.0)); }

void random_t(std::mt19937_64& rng, double r, Vec& t) {
  std::normal_distribution<double> gauss;
  for (int i = 0; i < t.size(); ++i) t(i) = gauss(rng);
  t *= r / t.norm();
}

double rel_spread(const std::vector<double>& v) {
  double lo = *std::min_element(v.begin(), v.end()), hi = *std::max_element(v.begin(), v.end());
  return hi / lo - 1.0;
}

std::string join(const std::vector<double>& v) {
  std::ostringstream os;
  os.precision(6);
  for (size_t i = 0; i < v.size(); ++i) os << (i ? " " : "") << v[i];
  return os.str();
}

// ---------------------------------------------------------------------------

void criterion1(Outcome& out) {
  out.check(std::abs(normalizing_constant(1, 1.0) - kPi) < 1e-10, "c_1 = pi");
  out.check(std::abs(normalizing_constant(1, 2.0) - 2.0) < 1e-10, "c_2 = 2");
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (double alpha : {1.0, 2.0}) {
    Model md(LipschitzGraph::zero(1, 3), DistanceVariant::Soft, alpha);
    const double c = md.h.params().c_alpha, h0 = std::pow(c, 1.0 / alpha);
    double dmax = 0, hmax = 0, rmax = 0, amax = 0, cmax = 0, qmax = 0;
    for (int k = 0; k < 200; ++k) {
      Vec x = v1(4 * uni(rng) - 2), t(2);
      random_t(rng, std::pow(2.0, -8 + 9 * uni(rng)), t);
      double D = d_alpha(md.g, md.m, md.h.params(), concat(x, t));
      dmax = std::max(dmax, std::abs(D / (std::pow(c, -1.0 / alpha) * t.norm()) - 1.0));
      hmax = std::max(hmax, std::abs(md.h.value(x, t.norm()) / h0 - 1.0));
      rmax = std::max(rmax, (md.map(x, t) - concat(x, h0 * t)).norm() / std::max(1.0, t.norm()));
      ConjugatedMatrix cm = conjugated_matrix(md.map, x, t);
      Mat expect = Mat::Identity(3, 3);
      expect(0, 0) = h0 * h0;
      amax = std::max(amax, (cm.A - expect).cwiseAbs().maxCoeff());
      cmax = std::max({cmax, cm.C1.cwiseAbs().maxCoeff(), cm.C2.cwiseAbs().maxCoeff(), cm.C3.cwiseAbs().maxCoeff(),
                       cm.C4.cwiseAbs().maxCoeff()});
      qmax = std::max(qmax, std::abs(cm.dist_ratio));
    }
    std::string a = "alpha=" + std::to_string(int(alpha)) + " ";
    out.note(a + "max rel |D - c^{-1/a}|t||", dmax);
    out.note(a + "max |A - diag(h^2,1,1)|", amax);
    out.note(a + "max |C blocks|", cmax);
    out.note(a + "max ||t|/D(rho) - 1|", qmax);
    out.check(dmax <= 1e-4, a + "D_alpha flat");
    out.check(hmax <= 1e-10, a + "h = c^{1/alpha}");
    out.check(rmax <= 1e-10, a + "rho diagonal stretch");
    out.check(amax <= 1e-6, a + "conjugated matrix");
    out.check(cmax <= 1e-6, a + "C blocks");
    out.check(qmax <= 1e-6, a + "|t|/D(rho) - 1");
  }
}

void criterion2(Outcome& out) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const std::pair<int, int> dims[] = {{1, 2}, {1, 3}, {2, 3}, {2, 4}};
  std::vector<Mollifier> moll = {Mollifier(1), Mollifier(2)};
  double gram = 0, tri = 0, band = 0, wdev = -1;
  int count = 0;
  for (int k = 0; k < 10000; ++k) {
    auto [d, n] = dims[k % 4];
    double c0 = 0.2 * (0.05 + 0.95 * uni(rng));
    auto g = LipschitzGraph::fourier(d, n, 4, c0, 1000 + k);
    Vec x(d);
    for (int i = 0; i < d; ++i) x(i) = 4 * uni(rng) - 2;
    double r = std::pow(2.0, -8 + 10 * uni(rng));
    Frame f = frame_at(g, moll[d - 1], x, r);
    gram = std::max(gram, f.gram_error());
    tri = std::max(tri, f.triangularity_error());
    auto [lo, hi] = f.diagonal_band();
    // <v_hat^i, v^i> - 1 must lie in [1/sqrt(1+c0^2) - 1, sqrt(1+c0^2) - 1] within [-c0^2/2, c0^2/2]
    double lo_b = 1.0 / std::sqrt(1 + c0 * c0), hi_b = std::sqrt(1 + c0 * c0);
    band = std::max({band, lo_b - lo, hi - hi_b, std::abs(lo - 1.0) - c0 * c0 / 2, std::abs(hi - 1.0) - c0 * c0 / 2});
    wdev = std::max(wdev, f.max_w_deviation_sq() - c0 * c0);
    ++count;
  }
  out.note("samples", count);
  out.note("max Gram error", gram);
  out.note("max <v_hat^k, v^l> (k<l)", tri);
  out.note("max sandwich excess", band);
  out.note("max |w-e|^2 - c0^2", wdev);
  out.check(gram <= 1e-10, "Gram = I");
  out.check(tri <= 1e-10, "triangularity");
  out.check(band <= 1e-14, "diagonal sandwich");
  out.check(wdev <= 0.0, "|w - e|^2 <= c0^2");
}

void criterion3(Outcome& out) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  double trip = 0, fd = 0, eps = 0, sandwich = 0;
  int trips = 0, fds = 0;
  for (double c0 : {0.01, 0.025, 0.05}) {
    Model md(sinusoid(c0), DistanceVariant::Soft);
    for (int scale = 0; scale < 6; ++scale) {
      const double r = std::ldexp(0.5, -scale);
      for (int k = 0; k < 556; ++k) {
        Vec x = v1(4 * uni(rng) - 2), t(2);
        random_t(rng, r, t);
        InverseResult inv = rho_inverse(md.map, md.map(x, t));
        trip = std::max(trip, std::max(std::abs(inv.x(0) - x(0)), (inv.t - t).norm()));
        ++trips;
        if (k % 8 == 0) {
          JacobianBundle jb = jacobian_bundle(md.map, x, t);
          const double step = 1e-3 * r;
          Mat J(3, 3);
          for (int a = 0; a < 3; ++a) {
            Vec xp = x, xm = x, tp = t, tm = t;
            if (a == 0) {
              xp(0) += step;
              xm(0) -= step;
            } else {
              tp(a - 1) += step;
              tm(a - 1) -= step;
            }
            J.row(a) = ((md.map(xp, tp) - md.map(xm, tm)) / (2 * step)).transpose();
          }
          fd = std::max(fd, (jb.Jac - J).cwiseAbs().maxCoeff());
          eps = std::max(eps, jb.epsilon);
          double hm = jb.h * jb.h;
          sandwich = std::max({sandwich, (1 - jb.epsilon) * hm - jb.detJ, jb.detJ - (1 + jb.epsilon) * hm});
          ++fds;
        }
      }
    }
  }
  out.note("round trips", trips);
  out.note("max round-trip error", trip);
  out.note("Jacobian samples", fds);
  out.note("max |Jac - FD|", fd);
  out.note("max epsilon", eps);
  out.check(trips >= 10000, "10^4 round trips");
  out.check(trip <= 1e-8, "round trip");
  out.check(fd <= 1e-5, "Jacobian vs FD");
  out.check(eps <= 0.2, "epsilon <= 0.2");
  out.check(sandwich <= 1e-12, "det sandwich");
}

void criterion4(Outcome& out) {
  const std::vector<double> c0s = {0.05, 0.1, 0.2};
  const std::vector<std::string> fields = {"m-matrix", "beta-eta", "dist-ratio"};
  BetaOptions bo;
  bo.samples = 257;
  for (const std::string& f : fields) {
    std::vector<double> scaled;
    for (double c0 : c0s) {
      Model md(sinusoid(c0), DistanceVariant::Soft);
      CarlesonWindow w;
      w.x = v1(0.0);
      w.r = 1.0;
      w.depth = 4;
      double n4 = carleson_of_named_field(f, md.map, w, {}, bo).norm;
      w.depth = 5;
      double n5 = carleson_of_named_field(f, md.map, w, {}, bo).norm;
      out.note(f + " c0=" + std::to_string(c0).substr(0, 4) + " norm(depth 4, 5)", join({n4, n5}));
      out.check(std::isfinite(n5) && n5 > 0.0, f + " finite");
      out.check(std::abs(n5 / n4 - 1.0) <= 0.25, f + " depth stability");
      scaled.push_back(n5 / (c0 * c0));
    }
    out.note(f + " norm / c0^2", join(scaled));
    out.check(rel_spread(scaled) + 1.0 <= 2.0, f + " c0^2 scaling within a factor 2");
  }
}

void criterion5(Outcome& out) {
  {
    auto g = LipschitzGraph::zero(1, 3);
    Mollifier m(1);
    AlphaResult a = alpha_tilde(g, m, Vec::Zero(3), 0.5);
    out.note("flat alpha_tilde", a.value);
    out.check(a.value <= 1e-10, "flat alpha_tilde = 0");
  }
  {
    auto g = LipschitzGraph::zero(1, 2);
    Vec z = v2(0.1, 0.0);
    const double r = 0.8;
    std::vector<double> err;
    for (int atoms : {64, 128}) {
      DiscreteMeasure s = graph_atoms(g, z, r, r / atoms), s2 = s;
      for (double& w : s2.weights) w *= 2.0;
      err.push_back(std::abs(wasserstein_distance(1, z, r, s2, s) - 1.0));
    }
    out.note("|dist(2 sigma, sigma) - 1| at 64, 128 atoms", join(err));
    out.check(err[1] <= 0.05, "dist(lambda, 2 lambda) = 1 within 5%");
    out.check(err[1] <= err[0] + 1e-12, "improves under doubling");
  }
  {
    auto g = LipschitzGraph::sinusoid(1, v2(0.1, 0.05), v1(1.5));
    Mollifier m(1);
    std::mt19937_64 rng(51);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    int nestings = 0;
    double worst = 0.0;
    for (int outer = 0; outer < 10; ++outer) {
      Vec z = eval_graph(g, v1(2 * uni(rng) - 1));
      const double R = 0.6 + 0.4 * uni(rng);
      AlphaOptions opt;
      opt.spacing = R / 24;
      opt.restarts = 2;
      AlphaResult big = alpha_tilde(g, m, z, R, opt);
      AlphaOptions small = opt;
      small.extra_seeds = {big.best};
      for (int inner = 0; inner < 10; ++inner) {
        double s = R * (0.3 + 0.6 * uni(rng));
        Vec y;
        do {
          y = eval_graph(g, v1(z(0) + (R - s) * (2 * uni(rng) - 1)));
        } while ((y - z).norm() + s > R);
        AlphaResult a = alpha_tilde(g, m, y, s, small);
        worst = std::max(worst, a.value / (std::pow(R / s, 2) * big.value));
        ++nestings;
      }
    }
    out.note("nestings", nestings);
    out.note("max alpha(y,s) / ((R/s)^2 alpha(z,R))", worst);
    out.check(nestings == 100, "100 nestings");
    out.check(worst <= 1.0 + 1e-12, "monotonicity under nesting");
  }
  {
    auto g = LipschitzGraph::sinusoid(1, v1(0.05), v1(1.0));
    Mollifier m(1);
    auto p = SoftDistanceParams::make(1, 1.0);
    std::vector<double> crep, cres;
    for (int atoms : {16, 32}) {
      AlphaOptions opt;
      opt.atoms_per_radius = atoms;
      double rep = 0.0, res = 0.0;
      for (double x : {-0.8, 0.1, 0.7}) {
        const double r = 0.5;
        double a = alpha_number(g, m, v1(x), r, opt).value;
        rep = std::max(rep, replacement_distance(g, m, v1(x), r, opt) / a);
        SeriesResult s = a_series(g, m, v1(x), r, 1.0, 3, opt);
        Vec zz = eval_graph(g, v1(x)) + Vec::Unit(2, 1) * r;
        res = std::max(res, plane_residual(g, m, p, v1(x), r, zz) / s.value);
      }
      crep.push_back(rep);
      cres.push_back(res);
    }
    out.note("replacement constant (16, 32 atoms/radius)", join(crep));
    out.note("plane residual constant (16, 32 atoms/radius)", join(cres));
    out.check(std::abs(crep[1] / crep[0] - 1.0) <= 0.25, "replacement constant stable");
    out.check(std::abs(cres[1] / cres[0] - 1.0) <= 0.25, "plane residual constant stable");
  }
}

Mat identity3(const Vec&, const Vec&) { return Mat::Identity(3, 3); }

DiscreteOperator flat_operator(int Nx, int Nt) {
  GridParams p;
  p.Nx = Nx;
  p.Nt = Nt;
  return assemble(build_grid(p), identity3);
}

std::vector<double> half_line(const WeightedGrid& g) {
  std::vector<double> data(g.boundary_cells);
  for (int i = 0; i < g.boundary_cells; ++i) {
    double x = g.boundary_x(i);
    data[i] = x > 1e-12 ? 1.0 : (std::abs(x) <= 1e-12 ? 0.5 : 0.0);
  }
  return data;
}

void criterion6(Outcome& out) {
  DiscreteOperator op = flat_operator(64, 64);
  const WeightedGrid& g = op.grid;
  GridSolution u = solve_dirichlet(op, half_line(g));
  out.note("half-line solve", u.method + " iterations " + std::to_string(u.iterations));
  out.check(u.min_value >= -1e-8 && u.max_value <= 1.0 + 1e-8, "max principle");
  double refl = 0.0;
  for (int c = 0; c < g.cells; ++c) {
    int i, j, k;
    g.unpack(c, i, j, k);
    refl = std::max(refl, std::abs(u.values[c] + u.values[g.index(g.p.Nx - 1 - i, j, k)] - 1.0));
  }
  out.note("max |u(x) + u(-x) - 1|", refl);
  out.check(refl <= 1e-8, "x-reflection symmetry");

  int pole = g.locate(0.2, v2(0.3, 0.1));
  int pi, pj, pk;
  g.unpack(pole, pi, pj, pk);
  MeasureVector w = harmonic_measure(op, pole);
  MeasureVector wr = harmonic_measure(op, g.index(g.p.Nx - 1 - pi, pj, pk));
  double msym = 0.0;
  for (int i = 0; i < g.boundary_cells; ++i)
    msym = std::max(msym, std::abs(w.weights[i] - wr.weights[g.boundary_cells - 1 - i]));
  out.note("|omega - 1|", std::abs(w.total - 1.0));
  out.note("reflected pole measure mismatch", msym);
  out.check(std::abs(w.total - 1.0) <= 1e-8, "total measure 1");
  out.check(w.clipped >= -1e-8, "nonnegative measure");
  out.check(msym <= 1e-8, "measure reflection symmetry");

  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::vector<double> data(g.boundary_cells);
  for (double& v : data) v = uni(rng);
  GridSolution ur = solve_dirichlet(op, data);
  double pairing = 0.0;
  for (int i = 0; i < g.boundary_cells; ++i) pairing += w.weights[i] * data[i];
  out.note("adjoint pairing error", std::abs(pairing - ur.values[pole]));
  out.check(std::abs(pairing - ur.values[pole]) <= 1e-8, "adjoint consistency");
  double dmin = *std::min_element(data.begin(), data.end()), dmax = *std::max_element(data.begin(), data.end());
  out.check(ur.min_value >= dmin - 1e-8 && ur.max_value <= dmax + 1e-8, "max principle, random data");

  DiscreteOperator odd = flat_operator(65, 64);
  GridSolution uo = solve_dirichlet(odd, half_line(odd.grid));
  double mid = 0.0;
  for (int c = 0; c < odd.grid.cells; ++c)
    if (std::abs(odd.grid.x_of(c)(0)) < 1e-12) mid = std::max(mid, std::abs(uo.values[c] - 0.5));
  out.note("max |u(0,t) - 1/2| (65 x 64 x 64)", mid);
  out.check(mid <= 2e-2, "midline value");

  std::vector<double> dbl, nd;
  for (int N : {32, 64}) {
    DiscreteOperator o = N == 64 ? std::move(op) : flat_operator(N, N);
    dbl.push_back(doubling_ratio(o, 0.0, 0.25));
    nd.push_back(nondegeneracy(o, 0.0, 0.25));
  }
  out.note("doubling (32, 64)", join(dbl));
  out.note("nondegeneracy (32, 64)", join(nd));
  out.check(std::abs(dbl[1] / dbl[0] - 1.0) <= 0.2, "doubling stable");
  out.check(std::abs(nd[1] / nd[0] - 1.0) <= 0.2, "nondegeneracy stable");
}

void criterion7(Outcome& out) {
  Model md(sinusoid(0.05), DistanceVariant::Soft);
  CoefficientField conj = [&md](const Vec& x, const Vec& t) { return conjugated_matrix(md.map, x, t).A; };
  const std::vector<int> Ns = {32, 48, 64};
  const BoundaryCube Q{0.0, 0.2};
  CarlesonWindow w;
  w.x = v1(0.0);
  w.r = 0.5;
  // smallest box spans at least two cells of the coarsest grid
  const double coarse_hx = 2.0 * GridParams{}.Lx / Ns.front();
  w.depth = static_cast<int>(std::floor(std::log2(w.r / (2.0 * coarse_hx))));
  CarlesonWindow deep = w;
  deep.depth = w.depth + 2;
  AinftyFamily fam;
  fam.centers = {-0.25, 0.0, 0.25};
  fam.radii = {0.125, 0.25};
  fam.random_sets = 24;
  for (const char* which : {"flat", "conjugated"}) {
    std::vector<double> K, C, Cdeep, E;
    for (int N : Ns) {
      GridParams p;
      p.Nx = N;
      p.Nt = N;
      DiscreteOperator op = std::string(which) == "flat" ? assemble(build_grid(p), identity3)
                                                          : assemble(build_grid(p), conj);
      GridSolution u = solve_dirichlet(op, half_line(op.grid));
      SqfnRatio r = sqfn_ratio(op.grid, u.values, Q);
      out.check(!r.degenerate && std::isfinite(r.value), std::string(which) + " K finite");
      out.check(r.clipped_fraction == 0.0, std::string(which) + " cones inside the grid");
      K.push_back(r.value);
      C.push_back(solution_carleson(op.grid, u.values, w).report.norm);
      Cdeep.push_back(solution_carleson(op.grid, u.values, deep).report.norm);
      E.push_back(ainfty_scatter(op, fam).max_epsilon_below(0.05));
    }
    std::string s = which;
    out.note(s + " K (32, 48, 64)", join(K));
    out.note(s + " Carleson |t| grad u, depth " + std::to_string(w.depth) + " (32, 48, 64)", join(C));
    out.note(s + " Carleson |t| grad u, depth " + std::to_string(deep.depth) + ", not checked (32, 48, 64)", join(Cdeep));
    out.note(s + " max eps with delta < 0.05 (32, 48, 64)", join(E));
    out.check(rel_spread(K) <= 0.25, s + " K stable within 25%");
    out.check(rel_spread(C) <= 0.25, s + " Carleson norm stable within 25%");
    for (double c : C) out.check(std::isfinite(c), s + " Carleson norm finite");
    for (double e : E) out.check(e < 0.5, s + " A-infinity envelope below 0.5");
    for (size_t i = 1; i < E.size(); ++i) out.check(E[i] <= E[i - 1] + 1e-12, s + " envelope non-increasing");
  }
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria = {
      {"flat-case exactness", criterion1},   {"frames", criterion2},           {"change of variables", criterion3},
      {"Carleson scaling law", criterion4},  {"Wasserstein and alpha", criterion5}, {"solver", criterion6},
      {"S/N and A-infinity", criterion7}};
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
  bool all = true;
  for (size_t k = 0; k < criteria.size(); ++k) {
    if (!only.empty() && std::find(only.begin(), only.end(), int(k + 1)) == only.end()) continue;
    Outcome out;
    auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[k].second(out);
    } catch (const std::exception& e) {
      out.check(false, std::string("exception: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %zu (%s) %.1fs\n%s", out.pass ? "PASS" : "FAIL", k + 1, criteria[k].first, secs,
                out.log.str().c_str());
    std::fflush(stdout);
    all = all && out.pass;
  }
  return all ? 0 : 1;
}
