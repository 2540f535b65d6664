#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"

#include "hm/carleson.hpp"
#include "hm/diagnostics.hpp"
#include "hm/numbers.hpp"
#include "hm/rho.hpp"
#include "hm/solver.hpp"

namespace hmcli {

using nlohmann::json;

// Full default document; every accepted key appears here.
const json& default_config();

// Defaults <- file <- overrides, then checked key by key against the defaults.
json resolve_config(const json& user, const std::vector<std::string>& overrides);

// Typed views of a resolved document.
hm::GraphSpec graph_spec(const json& cfg);
hm::SoftDistanceParams distance_params(const json& cfg, int d);
hm::DistanceVariant distance_variant(const json& cfg);
hm::MollifierOptions mollifier_options(const json& cfg);
hm::FrameDerivativeOptions frame_options(const json& cfg);
hm::InverseOptions inverse_options(const json& cfg);
hm::GridParams grid_params(const json& cfg);
hm::SolverOptions solver_options(const json& cfg);
hm::AssemblyOptions assembly_options(const json& cfg);
hm::ConeParams cone_params(const json& cfg);
hm::BoundaryCube cube(const json& cfg);
hm::CarlesonWindow carleson_window(const json& cfg, int d);
hm::CarlesonSettings carleson_settings(const json& cfg);
hm::AlphaOptions alpha_options(const json& cfg);
hm::BetaOptions beta_options(const json& cfg);
hm::AinftyFamily ainfty_family(const json& cfg);

// Graph, mollifier, scale field and change of variables with stable addresses.
struct Model {
  hm::LipschitzGraph graph;
  hm::Mollifier mollifier;
  hm::SoftDistanceParams params;
  hm::ScaleField scale;
  hm::RhoMap map;

  explicit Model(const json& cfg);
};

std::unique_ptr<Model> make_model(const json& cfg);

}  // namespace hmcli
