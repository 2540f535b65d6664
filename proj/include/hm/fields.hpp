#pragma once

#include <string>
#include <vector>

#include "hm/carleson.hpp"
#include "hm/numbers.hpp"
#include "hm/rho.hpp"

namespace hm {

// Fields on Omega_0 built from the change of variables, for Carleson sweeps.
// Each takes (y, s) with y in R^d and s in R^{n-d}.
MatrixField m_matrix_field(const RhoMap& map);
MatrixField h_matrix_field(const RhoMap& map);
// The C blocks of the conjugated matrix, stacked as one n x n matrix.
MatrixField c_block_field(const RhoMap& map);
ScalarField dist_ratio_field(const RhoMap& map);
ScalarField beta_eta_field(const LipschitzGraph& g, const Mollifier& m, const BetaOptions& opt = {});
// |dr phi_r| and r |grad grad phi_r|.
VectorField jet_field(const LipschitzGraph& g, const Mollifier& m);

// Names accepted by field_by_name: m-matrix, h-matrix, c-blocks, dist-ratio, beta-eta, jet.
const std::vector<std::string>& field_names();
CarlesonReport carleson_of_named_field(const std::string& name, const RhoMap& map, const CarlesonWindow& w,
                                       const CarlesonSettings& opt = {}, const BetaOptions& beta = {});

}  // namespace hm
