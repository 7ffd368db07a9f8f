#pragma once

#include <cstdint>
#include <random>

#include "gnep/master_vi.hpp"

namespace gnep {

/// Seeded uniform sampler on the strategy box. Infinite sides are replaced
/// by a window of width 2 * radius next to the finite side (or centred at 0).
class BoxSampler {
 public:
  BoxSampler(const Game& game, std::uint64_t seed, double radius = 10.0);

  Vector sample();
  /// Sample shrunk towards the box centre so every coordinate stays at least
  /// `margin` (relative) away from the bounds.
  Vector interior_sample(double margin = 0.05);
  /// Shares drawn around b / l and projected onto U.
  ShareMatrix sample_shares(const ShareSet& set, double spread = 1.0);

  std::mt19937_64& engine() { return rng_; }

 private:
  Vector lo_;
  Vector hi_;
  int players_;
  std::mt19937_64 rng_;
};

/// max over N sampled pairs of Phi(x', x'') + Phi(x'', x'); nonpositive when
/// the bifunction is monotone on X.
double check_phi_monotone(const Game& game, int n_pairs, std::uint64_t seed);

struct CocoercivityReport {
  double max_violation = 0.0;  // max of gamma ||dg||^2 - <dg, du>
  int pairs = 0;
};

/// Samples share pairs in U, solves the inner Nash problems and measures the
/// co-coercivity inequality <g' - g'', u' - u''> >= gamma ||g' - g''||^2.
/// Throws SolveError if an inner solve fails.
CocoercivityReport check_G_cocoercive(const Game& game,
                                      const PenaltyFunction& phi, double tau,
                                      const ShareSet& set, int n_pairs,
                                      std::uint64_t seed,
                                      const NepConfig& nep = {});

struct GradientCheckReport {
  double F_error = 0.0;        // F vs d/dy Phi(x, y) at y = x
  double penalty_error = 0.0;  // penalty_grad_x vs d/dx_i P_i
  double phi_error = 0.0;      // phi' vs d/dv phi
  double max() const;
};

/// Central-difference check of the analytic gradients at (x, u); errors are
/// |fd - exact| / max(1, |exact|), maximised over components.
GradientCheckReport gradient_check(const Game& game,
                                   const PenaltyFunction& phi,
                                   const ShareMatrix& u, const Vector& x,
                                   double h_step);

/// One-sided difference quotients of P_i in x_i at a point; used to
/// inspect the share boundary h_i(x_i) = u_i.
struct OneSided {
  Vector left;
  Vector right;
};
OneSided one_sided_penalty_slopes(const Game& game, const PenaltyFunction& phi,
                                  int i, const Vector& x_i, const Vector& u_i,
                                  double h_step);

/// Residuals that certify w = (x, u) solves the penalized problem at tau in
/// each of its equivalent forms.
struct EquivalenceReport {
  double x_residual = 0.0;  // VI in x over X, natural residual (step 1)
  double u_residual = 0.0;  // VI in u over U, natural residual (step lambda)
  double min_phi_tau = 0.0; // min over samples of Phi_tau(w, w')
};

EquivalenceReport check_penalized_equivalence(
    const Game& game, const PenaltyFunction& phi, double tau,
    const ShareSet& set, const Vector& x, const ShareMatrix& u, double lambda,
    int n_samples, std::uint64_t seed);

/// Phi_tau(w, w') = Phi(x, x') + tau (P(w') - P(w)).
double eval_phi_tau(const Game& game, const PenaltyFunction& phi, double tau,
                    const Vector& x, const ShareMatrix& u, const Vector& x2,
                    const ShareMatrix& u2);

}  // namespace gnep
