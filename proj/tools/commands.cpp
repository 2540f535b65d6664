#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "hm/distance.hpp"
#include "hm/error.hpp"
#include "hm/fields.hpp"
#include "hm/frames.hpp"

namespace hmcli {

using hm::Mat;
using hm::Vec;

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class Csv {
 public:
  explicit Csv(const std::vector<std::string>& header) {
    for (size_t i = 0; i < header.size(); ++i) os_ << (i ? "," : "") << header[i];
    os_ << "\n";
  }
  Csv& row(const std::vector<double>& v) {
    for (size_t i = 0; i < v.size(); ++i) os_ << (i ? "," : "") << fmt(v[i]);
    os_ << "\n";
    return *this;
  }
  std::string str() const { return os_.str(); }

 private:
  std::ostringstream os_;
};

std::filesystem::path out_dir(const json& cfg) {
  std::filesystem::path dir = cfg.at("output").at("dir").get<std::string>();
  std::filesystem::create_directories(dir);
  return dir;
}

std::string write_file(const json& cfg, const std::string& name, const std::string& text) {
  std::filesystem::path p = out_dir(cfg) / name;
  std::ofstream f(p, std::ios::binary);
  if (!f) throw hm::ConfigError("cannot write " + p.string());
  f << text;
  return p.string();
}

struct Sample {
  Vec x;
  Vec t;
  double r;
};

std::vector<Sample> samples(const json& cfg, int d, int n) {
  const json& s = cfg.at("sampling");
  const int count = s.at("count");
  const double X = s.at("x_range"), rmin = s.at("r_min"), rmax = s.at("r_max");
  std::mt19937_64 rng(cfg.at("seed").get<std::uint64_t>());
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Sample> out;
  for (int k = 0; k < count; ++k) {
    Sample sm;
    sm.x = Vec(d);
    for (int i = 0; i < d; ++i) sm.x(i) = X * (2.0 * uni(rng) - 1.0);
    sm.r = rmin * std::pow(rmax / rmin, uni(rng));
    sm.t = Vec(n - d);
    for (int i = 0; i < n - d; ++i) sm.t(i) = gauss(rng);
    sm.t *= sm.r / sm.t.norm();
    out.push_back(sm);
  }
  return out;
}

std::vector<std::string> coord_names(const std::string& p, int k) {
  std::vector<std::string> v;
  for (int i = 0; i < k; ++i) v.push_back(p + std::to_string(i + 1));
  return v;
}

std::vector<std::string> cat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

// Builds one CSV row from scalars and vectors in order.
struct Row {
  std::vector<double> v;
  Row& operator<<(double x) {
    v.push_back(x);
    return *this;
  }
  Row& operator<<(const Vec& x) {
    for (int i = 0; i < x.size(); ++i) v.push_back(x(i));
    return *this;
  }
};

json base_summary(const std::string& name, const json& cfg) {
  json s;
  s["command"] = name;
  s["config"] = cfg;
  s["artifacts"] = json::array();
  return s;
}

// ---------------------------------------------------------------------------

json cmd_graph(const json& cfg) {
  json s = base_summary("graph", cfg);
  Model model(cfg);
  const hm::LipschitzGraph& g = model.graph;
  const int d = g.d(), m = g.codim();
  const double X = cfg.at("sampling").at("x_range");
  const int N = cfg.at("sampling").at("count");
  Csv csv(cat(cat(coord_names("x", d), coord_names("phi", m)), {"density"}));
  auto emit = [&](const Vec& x) { csv.row((Row() << x << g.phi(x) << hm::surface_density(g, x)).v); };
  if (d == 1) {
    for (int i = 0; i <= N; ++i) emit(Vec::Constant(1, -X + 2.0 * X * i / N));
  } else {
    for (int i = 0; i <= N; ++i)
      for (int j = 0; j <= N; ++j) {
        Vec x(2);
        x << -X + 2.0 * X * i / N, -X + 2.0 * X * j / N;
        emit(x);
      }
  }
  s["artifacts"].push_back(write_file(cfg, "graph.csv", csv.str()));
  s["family"] = hm::to_string(g.family());
  s["c0"] = g.c0();
  double sampled = hm::sampled_lipschitz(g, 4096, cfg.at("seed"));
  s["sampled_lipschitz"] = sampled;
  s["lipschitz_ok"] = sampled <= g.c0() * (1.0 + 1e-9) + 1e-15;
  return s;
}

json cmd_frames(const json& cfg) {
  json s = base_summary("frames", cfg);
  Model model(cfg);
  const hm::LipschitzGraph& g = model.graph;
  const int d = g.d(), n = g.n();
  Csv csv(cat(coord_names("x", d), {"r", "gram_error", "triangularity", "max_w_deviation_sq", "band_lo", "band_hi",
                                    "derivative_norm", "derivative_disagreement"}));
  double gram = 0, tri = 0, wdev = 0, lo = 1e300, hi = 0, dis = 0;
  hm::FrameDerivativeOptions fo = frame_options(cfg);
  fo.throw_on_disagreement = false;
  for (const Sample& sm : samples(cfg, d, n)) {
    hm::Frame f = hm::frame_at(g, model.mollifier, sm.x, sm.r);
    hm::FrameDerivatives fd = hm::frame_derivatives(g, model.mollifier, sm.x, sm.r, fo);
    auto band = f.diagonal_band();
    csv.row((Row() << sm.x << sm.r << f.gram_error() << f.triangularity_error() << f.max_w_deviation_sq()
                   << band.first << band.second << fd.norm() << fd.disagreement)
                .v);
    gram = std::max(gram, f.gram_error());
    tri = std::max(tri, f.triangularity_error());
    wdev = std::max(wdev, f.max_w_deviation_sq());
    lo = std::min(lo, band.first);
    hi = std::max(hi, band.second);
    dis = std::max(dis, fd.disagreement);
  }
  s["artifacts"].push_back(write_file(cfg, "frames.csv", csv.str()));
  s["max_gram_error"] = gram;
  s["max_triangularity_error"] = tri;
  s["max_w_deviation_sq"] = wdev;
  s["c0_sq"] = g.c0() * g.c0();
  s["diagonal_band"] = {lo, hi};
  s["max_derivative_disagreement"] = dis;
  s["derivative_tolerance"] = fo.tolerance;
  return s;
}

json cmd_dist(const json& cfg) {
  json s = base_summary("dist", cfg);
  Model model(cfg);
  const hm::LipschitzGraph& g = model.graph;
  const int d = g.d(), n = g.n();
  Csv csv(cat(cat(coord_names("x", d), coord_names("t", n - d)),
              {"D", "euclidean", "ratio", "error_estimate", "tail_fraction"}));
  double lo = 1e300, hi = 0, err = 0;
  for (const Sample& sm : samples(cfg, d, n)) {
    Vec X(n);
    X << sm.x, g.phi(sm.x) + sm.t;
    hm::SoftDistanceResult r = hm::d_alpha_detail(g, model.mollifier, model.params, X);
    double e = hm::euclidean_distance(g, X);
    double ratio = r.value / e;
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
    err = std::max(err, r.error_estimate);
    csv.row((Row() << sm.x << sm.t << r.value << e << ratio << r.error_estimate << r.tail_fraction).v);
  }
  s["artifacts"].push_back(write_file(cfg, "dist.csv", csv.str()));
  s["alpha"] = model.params.alpha;
  s["c_alpha"] = model.params.c_alpha;
  s["ratio_band"] = {lo, hi};
  s["max_error_estimate"] = err;
  return s;
}

json cmd_rho(const json& cfg) {
  json s = base_summary("rho", cfg);
  Model model(cfg);
  const hm::LipschitzGraph& g = model.graph;
  const int d = g.d(), n = g.n();
  hm::InverseOptions io = inverse_options(cfg);
  Csv csv(cat(cat(coord_names("x", d), coord_names("t", n - d)),
              {"h", "roundtrip", "inverse_residual", "epsilon", "decomposition_error", "dist_ratio"}));
  double trip = 0, eps = 0, dec = 0, dr = 0;
  for (const Sample& sm : samples(cfg, d, n)) {
    Vec Z = model.map(sm.x, sm.t);
    hm::InverseResult inv = hm::rho_inverse(model.map, Z, io);
    double rt = std::max((inv.x - sm.x).norm(), (inv.t - sm.t).norm()) / std::max(1.0, hm::concat(sm.x, sm.t).norm());
    hm::JacobianBundle jb = hm::jacobian_bundle(model.map, sm.x, sm.t);
    double ratio = sm.t.norm() / model.map.distance(Z) - 1.0;
    trip = std::max(trip, rt);
    eps = std::max(eps, jb.epsilon);
    dec = std::max(dec, jb.decomposition_error());
    dr = std::max(dr, std::abs(ratio));
    csv.row((Row() << sm.x << sm.t << jb.h << rt << inv.residual << jb.epsilon << jb.decomposition_error() << ratio).v);
  }
  s["artifacts"].push_back(write_file(cfg, "rho.csv", csv.str()));
  s["max_roundtrip"] = trip;
  s["max_epsilon"] = eps;
  s["max_decomposition_error"] = dec;
  s["max_abs_dist_ratio"] = dr;
  return s;
}

json cmd_numbers(const json& cfg) {
  json s = base_summary("numbers", cfg);
  Model model(cfg);
  const hm::LipschitzGraph& g = model.graph;
  const int d = g.d();
  const json& nj = cfg.at("numbers");
  std::vector<double> xs = nj.at("x").get<std::vector<double>>();
  std::vector<double> rs = nj.at("r").get<std::vector<double>>();
  if (static_cast<int>(xs.size()) % d != 0) throw hm::ConfigError("/numbers/x: length must be a multiple of d");
  hm::AlphaOptions ao = alpha_options(cfg);
  hm::BetaOptions bo = beta_options(cfg);
  const double salpha = nj.at("series_alpha");
  const int K = nj.at("series_terms");
  Csv csv(cat(coord_names("x", d), {"r", "beta", "beta_eta", "alpha_tilde", "a", "a_tail_bound"}));
  double amax = 0, bmax = 0;
  for (size_t k = 0; k < xs.size(); k += d) {
    Vec x(d);
    for (int i = 0; i < d; ++i) x(i) = xs[k + i];
    for (double r : rs) {
      double beta = hm::beta_number(g, x, r, bo);
      double beta_eta = hm::beta_eta_number(g, model.mollifier, x, r, bo);
      hm::AlphaResult al = hm::alpha_number(g, model.mollifier, x, r, ao);
      hm::SeriesResult a = hm::a_series(g, model.mollifier, x, r, salpha, K, ao);
      amax = std::max(amax, al.value);
      bmax = std::max(bmax, beta);
      csv.row((Row() << x << r << beta << beta_eta << al.value << a.value << a.tail_bound).v);
    }
  }
  s["artifacts"].push_back(write_file(cfg, "numbers.csv", csv.str()));
  s["max_alpha"] = amax;
  s["max_beta"] = bmax;
  return s;
}

json cmd_carleson(const json& cfg) {
  json s = base_summary("carleson", cfg);
  Model model(cfg);
  hm::CarlesonWindow w = carleson_window(cfg, model.graph.d());
  std::string field = cfg.at("carleson").at("field");
  hm::CarlesonReport rep =
      hm::carleson_of_named_field(field, model.map, w, carleson_settings(cfg), beta_options(cfg));
  s["artifacts"].push_back(write_file(cfg, "carleson_boxes.csv", rep.boxes_csv()));
  Csv prof({"k", "scale", "max_box"});
  for (size_t k = 0; k < rep.profile.size(); ++k) prof.row({double(k), std::ldexp(w.r, -int(k)), rep.profile[k]});
  s["artifacts"].push_back(write_file(cfg, "carleson_profile.csv", prof.str()));
  s["field"] = field;
  s["report"] = json::parse(rep.summary_json());
  s["norm"] = rep.norm;
  return s;
}

hm::DiscreteOperator build_operator(const json& cfg, const Model& model) {
  hm::GridParams gp = grid_params(cfg);
  hm::WeightedGrid grid = hm::build_grid(gp);
  std::string kind = cfg.at("operator").at("kind");
  const int n = gp.n;
  hm::CoefficientField coeff;
  if (kind == "flat")
    coeff = [n](const Vec&, const Vec&) { return Mat(Mat::Identity(n, n)); };
  else if (kind == "conjugated")
    coeff = [&model](const Vec& x, const Vec& t) { return hm::conjugated_matrix(model.map, x, t).A; };
  else
    throw hm::ConfigError("/operator/kind: expected flat or conjugated, got '" + kind + "'");
  return hm::assemble(grid, coeff, assembly_options(cfg));
}

std::vector<double> boundary_data(const json& cfg, const hm::WeightedGrid& g) {
  std::string kind = cfg.at("data").at("kind");
  const double value = cfg.at("data").at("value");
  std::vector<double> data(g.boundary_cells);
  std::mt19937_64 rng(cfg.at("seed").get<std::uint64_t>());
  std::uniform_real_distribution<double> uni(0.0, value);
  for (int i = 0; i < g.boundary_cells; ++i) {
    double x = g.boundary_x(i);
    if (kind == "half-line")
      data[i] = x > 1e-12 ? value : (std::abs(x) <= 1e-12 ? 0.5 * value : 0.0);
    else if (kind == "constant")
      data[i] = value;
    else if (kind == "random")
      data[i] = uni(rng);
    else
      throw hm::ConfigError("/data/kind: expected half-line, constant or random, got '" + kind + "'");
  }
  return data;
}

json grid_json(const hm::DiscreteOperator& op) {
  json j;
  j["d"] = op.grid.p.d;
  j["n"] = op.grid.p.n;
  j["Nx"] = op.grid.p.Nx;
  j["Nt"] = op.grid.p.Nt;
  j["Lx"] = op.grid.p.Lx;
  j["Lt"] = op.grid.p.Lt;
  j["cells"] = op.grid.cells;
  j["boundary_cells"] = op.grid.boundary_cells;
  j["nnz"] = op.A.nnz();
  j["symmetric"] = op.symmetric;
  j["min_eigenvalue"] = op.min_eigenvalue;
  j["max_eigenvalue"] = op.max_eigenvalue;
  j["conservation_error"] = op.conservation_error();
  return j;
}

json cmd_solve(const json& cfg) {
  json s = base_summary("solve", cfg);
  Model model(cfg);
  hm::DiscreteOperator op = build_operator(cfg, model);
  std::vector<double> data = boundary_data(cfg, op.grid);
  hm::GridSolution u = hm::solve_dirichlet(op, data, solver_options(cfg));
  const int d = op.grid.p.d, n = op.grid.p.n;
  Csv csv(cat(cat({"cell"}, cat(coord_names("x", d), coord_names("t", n - d))), {"u"}));
  for (int c = 0; c < op.grid.cells; ++c)
    csv.row((Row() << double(c) << op.grid.x_of(c) << op.grid.t_of(c) << u.values[c]).v);
  s["artifacts"].push_back(write_file(cfg, "solution.csv", csv.str()));
  double dmin = *std::min_element(data.begin(), data.end()), dmax = *std::max_element(data.begin(), data.end());
  s["grid"] = grid_json(op);
  s["method"] = u.method;
  s["iterations"] = u.iterations;
  s["residual"] = u.residual;
  s["min"] = u.min_value;
  s["max"] = u.max_value;
  s["max_principle_violation"] = std::max({0.0, dmin - u.min_value, u.max_value - dmax});
  return s;
}

json cmd_measure(const json& cfg) {
  json s = base_summary("measure", cfg);
  Model model(cfg);
  hm::DiscreteOperator op = build_operator(cfg, model);
  const double c = cfg.at("pole").at("center"), r = cfg.at("pole").at("radius");
  hm::SolverOptions so = solver_options(cfg);
  int pole = hm::corkscrew_cell(op.grid, c, r);
  hm::MeasureVector w = hm::harmonic_measure(op, pole, so);
  Csv csv({"boundary_cell", "x", "weight"});
  for (int i = 0; i < op.grid.boundary_cells; ++i) csv.row({double(i), op.grid.boundary_x(i), w.weights[i]});
  s["artifacts"].push_back(write_file(cfg, "measure.csv", csv.str()));
  s["grid"] = grid_json(op);
  s["pole_cell"] = pole;
  s["pole"] = (Row() << op.grid.x_of(pole) << op.grid.t_of(pole)).v;
  s["total"] = w.total;
  s["clipped"] = w.clipped;
  s["iterations"] = w.iterations;
  double one = hm::measure_of_interval(op.grid, w, c - r, c + r);
  double two = hm::measure_of_interval(op.grid, w, c - 2 * r, c + 2 * r);
  s["nondegeneracy"] = one;
  s["doubling"] = two / one;
  return s;
}

json cmd_sqfn(const json& cfg) {
  json s = base_summary("sqfn", cfg);
  Model model(cfg);
  hm::DiscreteOperator op = build_operator(cfg, model);
  hm::GridSolution u = hm::solve_dirichlet(op, boundary_data(cfg, op.grid), solver_options(cfg));
  hm::BoundaryCube Q = cube(cfg);
  hm::ConeParams cone = cone_params(cfg);
  hm::SqfnRatio K = hm::sqfn_ratio(op.grid, u.values, Q, cone);
  hm::BoundaryValues S = hm::square_function(op.grid, u.values, Q, Q.side, cone);
  hm::BoundaryValues N = hm::nontangential_max(op.grid, u.values, Q, Q.side, cone);
  Csv csv({"boundary_cell", "x", "S", "N"});
  for (size_t i = 0; i < S.cells.size(); ++i)
    csv.row({double(S.cells[i]), op.grid.boundary_x(S.cells[i]), S.values[i], N.values[i]});
  s["artifacts"].push_back(write_file(cfg, "sqfn.csv", csv.str()));
  hm::CarlesonWindow w = carleson_window(cfg, op.grid.p.d);
  hm::SolutionCarleson sc = hm::solution_carleson(op.grid, u.values, w, carleson_settings(cfg), cone);
  s["grid"] = grid_json(op);
  s["ratio"] = {{"value", K.value},         {"numerator", K.numerator}, {"denominator", K.denominator},
                {"k0", K.k0},               {"degenerate", K.degenerate},
                {"clipped_fraction", K.clipped_fraction}};
  s["solution_carleson"] = {{"norm", sc.report.norm}, {"square_sup", sc.square_sup}, {"C_a", sc.constant},
                            {"report", json::parse(sc.report.summary_json())}};
  return s;
}

json cmd_ainfty(const json& cfg) {
  json s = base_summary("ainfty", cfg);
  Model model(cfg);
  hm::DiscreteOperator op = build_operator(cfg, model);
  hm::AinftyScatter sc = hm::ainfty_scatter(op, ainfty_family(cfg), solver_options(cfg));
  s["artifacts"].push_back(write_file(cfg, "ainfty.csv", sc.csv()));
  s["grid"] = grid_json(op);
  s["family"] = sc.description;
  s["pairs"] = sc.pairs.size();
  s["decile_max_epsilon"] = sc.decile_max_epsilon;
  json env = json::array();
  for (double delta : {0.01, 0.02, 0.05, 0.1, 0.2, 0.5})
    env.push_back({{"delta", delta}, {"max_epsilon", sc.max_epsilon_below(delta)}});
  s["envelope"] = env;
  return s;
}

struct Checks {
  json list = json::array();
  bool all = true;
  void add(const std::string& name, double value, double tolerance) {
    bool pass = std::isfinite(value) && value <= tolerance;
    all = all && pass;
    list.push_back({{"name", name}, {"value", value}, {"tolerance", tolerance}, {"pass", pass}});
  }
};

json cmd_verify(const json& cfg) {
  json s = base_summary("verify", cfg);
  Model model(cfg);
  const hm::LipschitzGraph& g = model.graph;
  const int d = g.d(), n = g.n(), m = n - d;
  const double tol = cfg.at("verify").at("tolerance");
  const bool flat = g.family() == hm::GraphFamily::Zero;
  const bool soft = model.scale.variant() == hm::DistanceVariant::Soft;
  const double alpha = model.params.alpha, c = model.params.c_alpha;
  const double h0 = soft ? std::pow(c, 1.0 / alpha) : 1.0;
  std::vector<Sample> pts = samples(cfg, d, n);
  Checks ck;

  if (flat && d == 1 && soft) {
    if (alpha == 1.0) ck.add("c_alpha = pi", std::abs(c - std::numbers::pi), 1e-10);
    if (alpha == 2.0) ck.add("c_alpha = 2", std::abs(c - 2.0), 1e-10);
  }
  double gram = 0, tri = 0, wdev = 0, trip = 0, dec = 0;
  double dflat = 0, hflat = 0, rflat = 0, aflat = 0, cflat = 0, ratio = 0;
  for (const Sample& sm : pts) {
    hm::Frame f = hm::frame_at(g, model.mollifier, sm.x, sm.r);
    gram = std::max(gram, f.gram_error());
    tri = std::max(tri, f.triangularity_error());
    wdev = std::max(wdev, f.max_w_deviation_sq() - g.c0() * g.c0());
    Vec Z = model.map(sm.x, sm.t);
    hm::InverseResult inv = hm::rho_inverse(model.map, Z, inverse_options(cfg));
    trip = std::max(trip, std::max((inv.x - sm.x).norm(), (inv.t - sm.t).norm()) /
                              std::max(1.0, hm::concat(sm.x, sm.t).norm()));
    hm::JacobianBundle jb = hm::jacobian_bundle(model.map, sm.x, sm.t);
    dec = std::max(dec, jb.decomposition_error());
    if (!flat) continue;
    Vec X = hm::concat(sm.x, sm.t);
    if (soft) {
      double D = hm::d_alpha(g, model.mollifier, model.params, X);
      dflat = std::max(dflat, std::abs(D / (std::pow(c, -1.0 / alpha) * sm.r) - 1.0));
    }
    hflat = std::max(hflat, std::abs(model.scale.value(sm.x, sm.r) / h0 - 1.0));
    rflat = std::max(rflat, (Z - hm::concat(sm.x, h0 * sm.t)).norm() / std::max(1.0, Z.norm()));
    hm::ConjugatedMatrix cm = hm::conjugated_matrix(model.map, sm.x, sm.t);
    Mat expect = Mat::Zero(n, n);
    for (int i = 0; i < d; ++i) expect(i, i) = std::pow(h0, m);
    for (int i = d; i < n; ++i) expect(i, i) = std::pow(h0, m - 2);
    aflat = std::max(aflat, (cm.A - expect).cwiseAbs().maxCoeff());
    cflat = std::max({cflat, cm.C1.cwiseAbs().maxCoeff(), cm.C2.cwiseAbs().maxCoeff(), cm.C3.cwiseAbs().maxCoeff(),
                      cm.C4.cwiseAbs().maxCoeff()});
    ratio = std::max(ratio, std::abs(cm.dist_ratio));
  }
  ck.add("frame Gram error", gram, 1e-10);
  ck.add("frame triangularity", tri, 1e-10);
  ck.add("|w - e|^2 - c0^2", wdev, 1e-12);
  ck.add("rho round trip", trip, 1e-8);
  ck.add("Jacobian decomposition", dec, 1e-12);
  if (flat) {
    if (soft) ck.add("D_alpha flat relative error", dflat, 1e-4);
    ck.add("h flat relative error", hflat, tol);
    ck.add("rho diagonal stretch", rflat, tol);
    ck.add("conjugated matrix diagonal", aflat, tol);
    ck.add("C blocks", cflat, tol);
    ck.add("|t|/D(rho) - 1", ratio, tol);
    Vec x0 = Vec::Zero(d);
    ck.add("beta flat", hm::beta_number(g, x0, 1.0, beta_options(cfg)), 1e-8);
    hm::AlphaOptions ao = alpha_options(cfg);
    hm::AlphaResult al = hm::alpha_number(g, model.mollifier, x0, 0.5, ao);
    ck.add("alpha flat", al.value, 1e-8);
  }
  if (d == 1 && (n == 2 || n == 3)) {
    json small = cfg;
    small["grid"]["Nx"] = 16;
    small["grid"]["Nt"] = 16;
    hm::DiscreteOperator op = build_operator(small, model);
    ck.add("operator conservation", op.conservation_error(), 1e-10);
    std::vector<double> ones(op.grid.boundary_cells, 1.0);
    hm::GridSolution u = hm::solve_dirichlet(op, ones, solver_options(cfg));
    double worst = 0.0;
    for (double v : u.values) worst = std::max(worst, std::abs(v - 1.0));
    ck.add("constant data reproduced", worst, 1e-8);
    hm::MeasureVector w = hm::harmonic_measure(op, hm::corkscrew_cell(op.grid, 0.0, 0.25), solver_options(cfg));
    ck.add("harmonic measure total", std::abs(w.total - 1.0), 1e-8);
    ck.add("harmonic measure negativity", -w.clipped, 1e-10);
  }
  s["checks"] = ck.list;
  s["passed"] = ck.all;
  return s;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"graph", "frames", "dist",  "rho",    "numbers", "carleson",
                                                 "solve", "measure", "sqfn", "ainfty", "verify"};
  return names;
}

const std::string& command_description(const std::string& name) {
  static const std::map<std::string, std::string> text = {
      {"graph", "sample the graph and its mollified jets"},
      {"frames", "adapted frames, Gram errors and the w - e bound"},
      {"dist", "soft distance against the Euclidean distance"},
      {"rho", "change of variables: round trips, Jacobians and determinants"},
      {"numbers", "Wasserstein alpha, Jones beta and the alpha series"},
      {"carleson", "Carleson norm of a named field over a window"},
      {"solve", "Dirichlet solve on the weighted grid"},
      {"measure", "harmonic measure from a pole, doubling and nondegeneracy"},
      {"sqfn", "square function, nontangential maximal function and their ratio"},
      {"ainfty", "A-infinity (delta, epsilon) scatter"},
      {"verify", "quick invariant checks, exit 1 on failure"}};
  static const std::string none;
  auto it = text.find(name);
  return it == text.end() ? none : it->second;
}

json run_command(const std::string& name, const json& cfg) {
  static const std::map<std::string, std::function<json(const json&)>> table = {
      {"graph", cmd_graph},     {"frames", cmd_frames},   {"dist", cmd_dist},       {"rho", cmd_rho},
      {"numbers", cmd_numbers}, {"carleson", cmd_carleson}, {"solve", cmd_solve},   {"measure", cmd_measure},
      {"sqfn", cmd_sqfn},       {"ainfty", cmd_ainfty},   {"verify", cmd_verify}};
  auto it = table.find(name);
  if (it == table.end()) throw hm::ConfigError("unknown command '" + name + "'");
  json summary = it->second(cfg);
  write_file(cfg, name + ".json", summary.dump(2) + "\n");
  return summary;
}

}  // namespace hmcli
