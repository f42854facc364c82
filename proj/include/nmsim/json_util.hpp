#pragma once

#include <json.hpp>

#include "nmsim/linalg.hpp"

namespace nmsim {

// Matrices serialize as row-major nested arrays of [re, im] pairs.
inline nlohmann::json mat_to_json(const CMat& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Index j = 0; j < m.cols(); ++j)
      row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

inline CMat mat_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty())
    throw ConfigError("matrix json: expected a non-empty array of rows");
  const Index rows = static_cast<Index>(j.size());
  const Index cols = static_cast<Index>(j.at(0).size());
  CMat m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const auto& row = j.at(i);
    if (static_cast<Index>(row.size()) != cols)
      throw ConfigError("matrix json: ragged rows");
    for (Index k = 0; k < cols; ++k) {
      const auto& e = row.at(k);
      m(i, k) = cplx(e.at(0).get<double>(), e.at(1).get<double>());
    }
  }
  return m;
}

}  // namespace nmsim
