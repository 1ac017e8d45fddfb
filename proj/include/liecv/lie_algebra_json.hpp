#pragma once

#include <json.hpp>

#include "liecv/lie_algebra.hpp"

namespace liecv {

/// Schema: {"dim": N, "names": [...], "brackets": [{"i":.., "j":.., "coeffs":[..]}]}
/// Each bracket pair is listed once; the opposite order is implied by
/// antisymmetry and omitted pairs are zero.
inline nlohmann::json algebra_to_json(const LieAlgebra& alg) {
  nlohmann::json j;
  j["dim"] = alg.dim();
  j["names"] = alg.names();
  nlohmann::json brackets = nlohmann::json::array();
  for (int i = 0; i < alg.dim(); ++i)
    for (int jj = i + 1; jj < alg.dim(); ++jj) {
      bool nonzero = false;
      std::vector<double> coeffs(alg.dim());
      for (int k = 0; k < alg.dim(); ++k) {
        coeffs[k] = alg.c(i, jj, k);
        if (coeffs[k] != 0.0) nonzero = true;
      }
      if (nonzero) brackets.push_back({{"i", i}, {"j", jj}, {"coeffs", coeffs}});
    }
  j["brackets"] = brackets;
  return j;
}

inline AlgebraPtr algebra_from_json(const nlohmann::json& j) {
  int dim = j.at("dim").get<int>();
  std::vector<std::string> names;
  if (j.contains("names")) names = j.at("names").get<std::vector<std::string>>();
  std::vector<double> c(std::size_t(dim) * dim * dim, 0.0);
  auto at = [&](int i, int jj, int k) -> double& {
    return c[(std::size_t(i) * dim + jj) * dim + k];
  };
  if (j.contains("brackets"))
    for (const auto& b : j.at("brackets")) {
      int i = b.at("i").get<int>(), jj = b.at("j").get<int>();
      if (i < 0 || i >= dim || jj < 0 || jj >= dim || i == jj)
        throw std::invalid_argument("algebra_from_json: bad bracket index pair");
      auto coeffs = b.at("coeffs").get<std::vector<double>>();
      if (static_cast<int>(coeffs.size()) != dim)
        throw std::invalid_argument("algebra_from_json: bracket coefficient count");
      for (int k = 0; k < dim; ++k) {
        at(i, jj, k) = coeffs[k];
        at(jj, i, k) = -coeffs[k];
      }
    }
  return std::make_shared<LieAlgebra>(dim, names, c);
}

}  // namespace liecv
