#pragma once

#include <cstdint>

#include "gnep/game.hpp"

namespace gnep::instances {

/// Two players, f_i = x_i - 0.5 x_i^2, X_i = [0, 10], x_1 + x_2 <= 4 (slack).
Game slack();
/// As `slack` with x_1 + x_2 <= 1 (binding, symmetric).
Game symmetric_binding();
/// f_1 = 2 x_1 - 0.5 x_1^2, f_2 = x_2 - 0.5 x_2^2, x_1 + x_2 <= 1.
Game asymmetric_binding();
/// Strong cross coupling R_12 = R_21 = 3 with Q_i = 1: the Nikaido-Isoda
/// bifunction is not monotone.
Game adversarial_coupling();

struct RandomGameOptions {
  int min_players = 2;
  int max_players = 3;
  int max_player_dim = 2;
  int max_joint = 2;
  double box_upper = 4.0;
};

/// Seeded random game with positive definite Q_i, weak cross coupling (the
/// pseudo-gradient is strongly monotone), positive affine joint constraints
/// that bind near the unconstrained equilibrium, and bounded boxes
/// [0, box_upper] (so x = 0 is jointly feasible).
Game random_game(std::uint64_t seed, const RandomGameOptions& opts = {});

}  // namespace gnep::instances
