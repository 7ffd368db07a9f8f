#pragma once

#include <Eigen/Dense>

namespace gnep {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Share allocation: row i holds player i's share u_i of the joint right-hand
// side, so the matrix is l x m.
using ShareMatrix = Eigen::MatrixXd;

inline constexpr double kEpsPsd = 1e-10;
inline constexpr double kEpsNum = 1e-9;
inline constexpr double kEpsAff = 1e-10;

}  // namespace gnep
