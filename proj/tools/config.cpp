#include "config.hpp"

#include <sstream>

#include "hm/distance.hpp"
#include "hm/error.hpp"

namespace hmcli {

using hm::Mat;
using hm::Vec;

const json& default_config() {
  static const json doc = json::parse(R"({
    "seed": 1,
    "threads": 0,
    "output": {"dir": "out"},
    "graph": {"d": 1, "n": 3, "family": "zero", "offset": [], "slope": [], "amplitude": [], "frequency": [],
              "phase": 0.0, "modes": 4, "seed": 1, "c0": -1.0},
    "mollifier": {"order": 96, "tolerance": 1e-9, "check": false},
    "distance": {"variant": "soft", "alpha": 1.0, "tail_radius": 64.0, "order": 16, "first_panel": 0.25,
                 "angular": 32, "tail_order": 24, "tolerance": 1e-8},
    "frames": {"kappa": 1e-3, "tolerance": 1e-4},
    "inverse": {"max_iterations": 50, "tolerance": 1e-8, "target": 1e-13},
    "sampling": {"count": 64, "x_range": 1.0, "r_min": 1e-3, "r_max": 1.0},
    "grid": {"Lx": 1.0, "Lt": 1.0, "Nx": 32, "Nt": 32},
    "operator": {"kind": "flat", "cross_terms": true},
    "solver": {"tolerance": 1e-12, "max_iterations": 20000},
    "data": {"kind": "half-line", "value": 1.0},
    "pole": {"center": 0.0, "radius": 0.25},
    "cones": {"aperture": 1.0, "center": 0.0, "side": 0.2},
    "carleson": {"field": "m-matrix", "window": [0.0, 1.0], "depth": 4, "shells_per_octave": 4, "angles": 8,
                 "phi_nodes": 8, "cells_per_shell": 4, "extra_octaves": 1, "fine_centers": false},
    "numbers": {"x": [0.0], "r": [1.0, 0.5, 0.25], "series_alpha": 1.0, "series_terms": 8,
                "alpha": {"atoms_per_radius": 32, "restarts": 3, "max_evaluations": 160, "tolerance": 1e-4},
                "beta": {"samples": 1025, "max_iterations": 20000, "tolerance": 1e-11}},
    "ainfty": {"centers": [0.0], "radii": [0.25], "sub_balls": 3, "random_sets": 16},
    "verify": {"tolerance": 1e-6}
  })");
  return doc;
}

namespace {

const char* kind(const json& v) {
  if (v.is_boolean()) return "boolean";
  if (v.is_number()) return "number";
  if (v.is_string()) return "string";
  if (v.is_array()) return "array";
  if (v.is_object()) return "object";
  return "null";
}

void check_against(const json& value, const json& reference, const std::string& path) {
  if (reference.is_object()) {
    if (!value.is_object()) throw hm::ConfigError(path + ": expected object, got " + kind(value));
    for (auto it = value.begin(); it != value.end(); ++it) {
      if (!reference.contains(it.key())) throw hm::ConfigError(path + "/" + it.key() + ": unknown key");
      check_against(it.value(), reference.at(it.key()), path + "/" + it.key());
    }
    return;
  }
  if (std::string(kind(value)) != kind(reference))
    throw hm::ConfigError(path + ": expected " + std::string(kind(reference)) + ", got " + kind(value));
  if (reference.is_number_integer() && !value.is_number_integer())
    throw hm::ConfigError(path + ": expected an integer");
}

json parse_scalar(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error&) {
    return json(text);
  }
}

Vec to_vec(const json& a) {
  Vec v(a.size());
  for (size_t i = 0; i < a.size(); ++i) v(i) = a.at(i).get<double>();
  return v;
}

}  // namespace

json resolve_config(const json& user, const std::vector<std::string>& overrides) {
  check_against(user, default_config(), "");
  json cfg = default_config();
  cfg.merge_patch(user);
  for (const std::string& o : overrides) {
    auto eq = o.find('=');
    if (eq == std::string::npos) throw hm::ConfigError("override '" + o + "' is not key=value");
    std::string key = o.substr(0, eq);
    std::string ptr = "/" + key;
    for (char& c : ptr)
      if (c == '.') c = '/';
    json::json_pointer jp(ptr);
    if (!default_config().contains(jp)) throw hm::ConfigError(ptr + ": unknown key");
    json value = parse_scalar(o.substr(eq + 1));
    check_against(value, default_config().at(jp), ptr);
    cfg[jp] = value;
  }
  return cfg;
}

hm::GraphSpec graph_spec(const json& cfg) {
  const json& g = cfg.at("graph");
  hm::GraphSpec s;
  s.d = g.at("d");
  s.n = g.at("n");
  s.family = hm::graph_family_from_string(g.at("family"));
  s.offset = to_vec(g.at("offset"));
  const json& slope = g.at("slope");
  if (!slope.empty()) {
    s.slope = Mat(slope.size(), slope.at(0).size());
    for (size_t i = 0; i < slope.size(); ++i) {
      if (slope.at(i).size() != slope.at(0).size()) throw hm::ConfigError("/graph/slope: ragged matrix");
      for (size_t j = 0; j < slope.at(i).size(); ++j) s.slope(i, j) = slope.at(i).at(j).get<double>();
    }
  }
  s.amplitude = to_vec(g.at("amplitude"));
  s.frequency = to_vec(g.at("frequency"));
  s.phase = g.at("phase");
  s.modes = g.at("modes");
  s.seed = g.at("seed");
  s.c0 = g.at("c0");
  return s;
}

hm::SoftDistanceParams distance_params(const json& cfg, int d) {
  const json& j = cfg.at("distance");
  hm::SoftDistanceParams p = hm::SoftDistanceParams::make(d, j.at("alpha"));
  p.tail_radius = j.at("tail_radius");
  p.order = j.at("order");
  p.first_panel = j.at("first_panel");
  p.angular = j.at("angular");
  p.tail_order = j.at("tail_order");
  p.tolerance = j.at("tolerance");
  return p;
}

hm::DistanceVariant distance_variant(const json& cfg) {
  std::string v = cfg.at("distance").at("variant");
  if (v == "soft") return hm::DistanceVariant::Soft;
  if (v == "euclidean") return hm::DistanceVariant::Euclidean;
  throw hm::ConfigError("/distance/variant: expected soft or euclidean, got '" + v + "'");
}

hm::MollifierOptions mollifier_options(const json& cfg) {
  const json& j = cfg.at("mollifier");
  hm::MollifierOptions o;
  o.order = j.at("order");
  o.tolerance = j.at("tolerance");
  o.check = j.at("check");
  return o;
}

hm::FrameDerivativeOptions frame_options(const json& cfg) {
  hm::FrameDerivativeOptions o;
  o.kappa = cfg.at("frames").at("kappa");
  o.tolerance = cfg.at("frames").at("tolerance");
  return o;
}

hm::InverseOptions inverse_options(const json& cfg) {
  const json& j = cfg.at("inverse");
  hm::InverseOptions o;
  o.max_iterations = j.at("max_iterations");
  o.tolerance = j.at("tolerance");
  o.target = j.at("target");
  return o;
}

hm::GridParams grid_params(const json& cfg) {
  const json& j = cfg.at("grid");
  hm::GridParams p;
  p.d = cfg.at("graph").at("d");
  p.n = cfg.at("graph").at("n");
  p.Lx = j.at("Lx");
  p.Lt = j.at("Lt");
  p.Nx = j.at("Nx");
  p.Nt = j.at("Nt");
  return p;
}

hm::SolverOptions solver_options(const json& cfg) {
  hm::SolverOptions o;
  o.tolerance = cfg.at("solver").at("tolerance");
  o.max_iterations = cfg.at("solver").at("max_iterations");
  return o;
}

hm::AssemblyOptions assembly_options(const json& cfg) {
  hm::AssemblyOptions o;
  o.cross_terms = cfg.at("operator").at("cross_terms");
  return o;
}

hm::ConeParams cone_params(const json& cfg) {
  hm::ConeParams c;
  c.aperture = cfg.at("cones").at("aperture");
  if (!(c.aperture > 0.0)) throw hm::ConfigError("/cones/aperture: must be positive");
  return c;
}

hm::BoundaryCube cube(const json& cfg) {
  hm::BoundaryCube q;
  q.center = cfg.at("cones").at("center");
  q.side = cfg.at("cones").at("side");
  if (!(q.side > 0.0)) throw hm::ConfigError("/cones/side: must be positive");
  return q;
}

hm::CarlesonWindow carleson_window(const json& cfg, int d) {
  const json& w = cfg.at("carleson").at("window");
  if (static_cast<int>(w.size()) != d + 1) throw hm::ConfigError("/carleson/window: expected d center coordinates and a radius");
  hm::CarlesonWindow win;
  win.x = Vec(d);
  for (int i = 0; i < d; ++i) win.x(i) = w.at(i).get<double>();
  win.r = w.at(d).get<double>();
  win.depth = cfg.at("carleson").at("depth");
  if (!(win.r > 0.0)) throw hm::ConfigError("/carleson/window: radius must be positive");
  if (win.depth < 1) throw hm::ConfigError("/carleson/depth: must be at least 1");
  return win;
}

hm::CarlesonSettings carleson_settings(const json& cfg) {
  const json& j = cfg.at("carleson");
  hm::CarlesonSettings s;
  s.shells_per_octave = j.at("shells_per_octave");
  s.angles = j.at("angles");
  s.phi_nodes = j.at("phi_nodes");
  s.cells_per_shell = j.at("cells_per_shell");
  s.extra_octaves = j.at("extra_octaves");
  s.fine_centers = j.at("fine_centers");
  return s;
}

hm::AlphaOptions alpha_options(const json& cfg) {
  const json& j = cfg.at("numbers").at("alpha");
  hm::AlphaOptions o;
  o.atoms_per_radius = j.at("atoms_per_radius");
  o.restarts = j.at("restarts");
  o.max_evaluations = j.at("max_evaluations");
  o.tolerance = j.at("tolerance");
  return o;
}

hm::BetaOptions beta_options(const json& cfg) {
  const json& j = cfg.at("numbers").at("beta");
  hm::BetaOptions o;
  o.samples = j.at("samples");
  o.max_iterations = j.at("max_iterations");
  o.tolerance = j.at("tolerance");
  return o;
}

hm::AinftyFamily ainfty_family(const json& cfg) {
  const json& j = cfg.at("ainfty");
  hm::AinftyFamily f;
  f.centers = j.at("centers").get<std::vector<double>>();
  f.radii = j.at("radii").get<std::vector<double>>();
  f.sub_balls = j.at("sub_balls");
  f.random_sets = j.at("random_sets");
  f.seed = cfg.at("seed");
  return f;
}

Model::Model(const json& cfg)
    : graph(graph_spec(cfg)),
      mollifier(graph.d(), mollifier_options(cfg)),
      params(distance_params(cfg, graph.d())),
      scale(graph, mollifier, distance_variant(cfg), params, cfg.at("frames").at("kappa").get<double>()),
      map(graph, mollifier, scale, frame_options(cfg)) {}

std::unique_ptr<Model> make_model(const json& cfg) { return std::make_unique<Model>(cfg); }

}  // namespace hmcli
