#include <fstream>
#include <iostream>

#include <omp.h>

#include "CLI11.hpp"
#include "commands.hpp"
#include "hm/error.hpp"

using hmcli::json;

namespace {

struct Flags {
  std::string config;
  std::string out;
  long long seed = -1;
  int threads = -1;
  std::vector<std::string> set;
  std::string field, op, data;
  std::vector<double> window, pole;
  int depth = -1, nx = -1, nt = -1;
  double side = -1, aperture = -1;
};

int fail(const std::string& type, const std::string& where, const std::string& what, double estimate, int code) {
  json e = {{"error", {{"type", type}, {"where", where}, {"message", what}, {"estimate", estimate}}}};
  std::cout << e.dump(2) << std::endl;
  return code;
}

json load(const Flags& f) {
  json user = json::object();
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw hm::ConfigError("cannot open config '" + f.config + "'");
    try {
      user = json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
      throw hm::ConfigError(f.config + ": " + e.what());
    }
  }
  std::vector<std::string> ov = f.set;
  auto num = [](double v) { return hmcli::json(v).dump(); };
  if (!f.out.empty()) ov.push_back("output.dir=\"" + f.out + "\"");
  if (f.seed >= 0) ov.push_back("seed=" + std::to_string(f.seed));
  if (f.threads >= 0) ov.push_back("threads=" + std::to_string(f.threads));
  if (!f.field.empty()) ov.push_back("carleson.field=\"" + f.field + "\"");
  if (!f.op.empty()) ov.push_back("operator.kind=\"" + f.op + "\"");
  if (!f.data.empty()) ov.push_back("data.kind=\"" + f.data + "\"");
  if (!f.window.empty()) ov.push_back("carleson.window=" + json(f.window).dump());
  if (f.pole.size() == 2) {
    ov.push_back("pole.center=" + num(f.pole[0]));
    ov.push_back("pole.radius=" + num(f.pole[1]));
  }
  if (f.depth >= 0) ov.push_back("carleson.depth=" + std::to_string(f.depth));
  if (f.nx >= 0) ov.push_back("grid.Nx=" + std::to_string(f.nx));
  if (f.nt >= 0) ov.push_back("grid.Nt=" + std::to_string(f.nt));
  if (f.side >= 0) ov.push_back("cones.side=" + num(f.side));
  if (f.aperture >= 0) ov.push_back("cones.aperture=" + num(f.aperture));
  return hmcli::resolve_config(user, ov);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Harmonic measure toolkit for small Lipschitz graphs"};
  app.require_subcommand(1);
  Flags f;
  for (const std::string& name : hmcli::command_names()) {
    CLI::App* sub = app.add_subcommand(name, hmcli::command_description(name));
    sub->add_option("-c,--config", f.config, "JSON experiment config");
    sub->add_option("-o,--out", f.out, "output directory");
    sub->add_option("--seed", f.seed, "random seed");
    sub->add_option("--threads", f.threads, "OpenMP worker count (0 = runtime default)");
    sub->add_option("--set", f.set, "override a config key, e.g. solver.tolerance=1e-10");
    if (name == "carleson") {
      sub->add_option("--field", f.field, "m-matrix, h-matrix, c-blocks, dist-ratio, beta-eta or jet");
      sub->add_option("--window", f.window, "center coordinates then radius")->expected(2, 3);
      sub->add_option("--depth", f.depth, "dyadic scales below the window radius");
    }
    if (name == "solve" || name == "measure" || name == "sqfn" || name == "ainfty" || name == "verify") {
      sub->add_option("--operator", f.op, "flat or conjugated");
      sub->add_option("--nx", f.nx, "cells along x");
      sub->add_option("--nt", f.nt, "cells along each t axis (even)");
    }
    if (name == "solve" || name == "sqfn") sub->add_option("--data", f.data, "half-line, constant or random");
    if (name == "measure") sub->add_option("--pole", f.pole, "center and radius of the ball")->expected(2);
    if (name == "sqfn") {
      sub->add_option("--side", f.side, "side length l(Q)");
      sub->add_option("--aperture", f.aperture, "cone aperture a");
      sub->add_option("--window", f.window, "Carleson window: center then radius")->expected(2, 3);
      sub->add_option("--depth", f.depth, "Carleson depth");
    }
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", "cli", e.what(), 0.0, 2);
  }
  const std::string name = app.get_subcommands().front()->get_name();
  try {
    json cfg = load(f);
    int threads = cfg.at("threads");
    if (threads > 0) omp_set_num_threads(threads);
    json summary = hmcli::run_command(name, cfg);
    json brief = summary;
    brief.erase("config");
    std::cout << brief.dump(2) << std::endl;
    if (summary.contains("passed") && !summary.at("passed").get<bool>()) return 1;
    return 0;
  } catch (const hm::ConfigError& e) {
    return fail("config", name, e.what(), 0.0, 2);
  } catch (const hm::NumericalError& e) {
    return fail("numerical", e.where(), e.what(), e.estimate(), 3);
  } catch (const json::exception& e) {
    return fail("config", name, e.what(), 0.0, 2);
  } catch (const std::exception& e) {
    return fail("runtime", name, e.what(), 0.0, 4);
  }
}
