#pragma once
// JSON <-> Eigen conversions shared by the serialization code. Matrices are
// arrays of row arrays; vectors are flat arrays.

#include <stdexcept>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace curbside {

inline nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
  const Eigen::Index n_rows = static_cast<Eigen::Index>(j.size());
  if (n_rows == 0) return Eigen::MatrixXd();
  const Eigen::Index n_cols = static_cast<Eigen::Index>(j.at(0).size());
  Eigen::MatrixXd m(n_rows, n_cols);
  for (Eigen::Index r = 0; r < n_rows; ++r) {
    if (static_cast<Eigen::Index>(j.at(r).size()) != n_cols) {
      throw std::invalid_argument("matrix rows have inconsistent length");
    }
    for (Eigen::Index c = 0; c < n_cols; ++c) m(r, c) = j.at(r).at(c);
  }
  return m;
}

inline nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

inline Eigen::VectorXd vector_from_json(const nlohmann::json& j) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = j.at(i);
  return v;
}

}  // namespace curbside
