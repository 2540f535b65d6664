#include "hm/fields.hpp"

#include <cmath>

#include "hm/error.hpp"

namespace hm {

MatrixField m_matrix_field(const RhoMap& map) {
  return [&map](const Vec& y, const Vec& s) { return jacobian_bundle(map, y, s).M; };
}

MatrixField h_matrix_field(const RhoMap& map) {
  return [&map](const Vec& y, const Vec& s) { return jacobian_bundle(map, y, s).H; };
}

MatrixField c_block_field(const RhoMap& map) {
  return [&map](const Vec& y, const Vec& s) {
    ConjugatedMatrix cm = conjugated_matrix(map, y, s);
    const int d = cm.d, n = cm.n;
    Mat out = Mat::Zero(n, n);
    out.topLeftCorner(d, d) = cm.C1;
    out.topRightCorner(d, n - d) = cm.C2;
    out.bottomLeftCorner(n - d, d) = cm.C3;
    out.bottomRightCorner(n - d, n - d) = cm.C4;
    return out;
  };
}

ScalarField dist_ratio_field(const RhoMap& map) {
  return [&map](const Vec& y, const Vec& s) { return s.norm() / map.distance(map(y, s)) - 1.0; };
}

ScalarField beta_eta_field(const LipschitzGraph& g, const Mollifier& m, const BetaOptions& opt) {
  return [&g, &m, opt](const Vec& y, const Vec& s) { return beta_eta_number(g, m, y, s.norm(), opt); };
}

VectorField jet_field(const LipschitzGraph& g, const Mollifier& m) {
  return [&g, &m](const Vec& y, const Vec& s) {
    const double r = s.norm();
    SmoothedJet jet = smoothed_jet(g, m, y, r);
    double hs = 0.0;
    for (int a = 0; a < g.d(); ++a)
      for (int i = 0; i < g.d(); ++i) hs += jet.hess[a][i].squaredNorm();
    Eigen::VectorXd out(2);
    out << jet.d_r.norm(), r * std::sqrt(hs);
    return out;
  };
}

const std::vector<std::string>& field_names() {
  static const std::vector<std::string> names = {"m-matrix", "h-matrix", "c-blocks", "dist-ratio", "beta-eta", "jet"};
  return names;
}

CarlesonReport carleson_of_named_field(const std::string& name, const RhoMap& map, const CarlesonWindow& w,
                                       const CarlesonSettings& opt, const BetaOptions& beta) {
  const LipschitzGraph& g = map.graph();
  const int d = g.d(), n = g.n();
  if (name == "m-matrix") return carleson_norm(m_matrix_field(map), d, n, w, opt);
  if (name == "h-matrix") return carleson_norm(h_matrix_field(map), d, n, w, opt);
  if (name == "c-blocks") return carleson_norm(c_block_field(map), d, n, w, opt);
  if (name == "dist-ratio") return carleson_norm(dist_ratio_field(map), d, n, w, opt);
  if (name == "beta-eta") return carleson_norm(beta_eta_field(g, map.mollifier(), beta), d, n, w, opt);
  if (name == "jet") return carleson_norm(jet_field(g, map.mollifier()), d, n, w, opt);
  throw ConfigError("unknown field '" + name + "'");
}

}  // namespace hm
