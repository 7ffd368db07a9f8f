#pragma once

#include <fstream>
#include <initializer_list>
#include <string>

#include <nlohmann/json.hpp>

#include "gnep/game.hpp"
#include "suite.hpp"

namespace gnep::test {

inline Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index k = 0;
  for (double x : values) v(k++) = x;
  return v;
}

/// l x 1 share matrix from a list of scalars.
inline ShareMatrix shares(std::initializer_list<double> values) {
  return vec(values);
}

inline Vector to_vector(const nlohmann::json& j) {
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) v(k) = j[k].get<double>();
  return v;
}

/// Reference values recomputed by tests/oracles/derive_values.py.
inline const nlohmann::json& frozen() {
  static const nlohmann::json values = [] {
    std::ifstream in(std::string(GNEP_ORACLE_DIR) + "/frozen_values.json");
    return nlohmann::json::parse(in);
  }();
  return values;
}

inline PlayerSpec scalar_player(double c, double q, double lo = 0.0,
                                double hi = 10.0) {
  PlayerSpec p;
  p.n = 1;
  p.c = Vector::Constant(1, c);
  p.Q = Matrix::Constant(1, 1, q);
  p.lower = Vector::Constant(1, lo);
  p.upper = Vector::Constant(1, hi);
  return p;
}

/// x_1 + ... + x_l <= b.
inline JointConstraintSpec sum_constraint(int players, double b) {
  JointConstraintSpec joint;
  joint.m = 1;
  joint.A.assign(players, Matrix::Ones(1, 1));
  joint.a.assign(players, Vector::Zero(1));
  joint.b = Vector::Constant(1, b);
  return joint;
}

}  // namespace gnep::test
