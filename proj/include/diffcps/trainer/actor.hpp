#pragma once

#include <optional>

#include "diffcps/trainer/critics.hpp"
#include "diffcps/trainer/dual.hpp"

namespace diffcps {

struct ActorNoise {
  ChainNoise chain;
  DenoiseNoise denoise;
};

struct ActorLossTerms {
  double total = 0.0;
  double q_term = 0.0;  // -q_weight * mean Q1(s, a~mu) / scale
  double lc = 0.0;      // denoising loss on the dataset pairs
  double scale = 0.0;   // mean |Q1_target(s, a~mu)|, gradient-detached
  bool scale_fallback = false;
};

constexpr double kMinQScale = 1e-6;

ActorNoise draw_actor_noise(const DiffusionPolicy& policy, Eigen::Index batch, Rng& rng);

/// Normalized actor objective
///   -q_weight * mean_j Q1(s_j, a_j) / mean_j |Q1'(s_j, a_j)| + lambda_weight * L_c,
/// with a_j drawn through the full reverse chain so the Q-gradient reaches
/// every denoising step. A scale below kMinQScale falls back to 1. When
/// `fixed_scale` is given it replaces the measured scale. With
/// `accumulate_grads`, gradients land in the policy's noise network only.
ActorLossTerms actor_loss(const Matrix& states, const Matrix& actions, DiffusionPolicy& policy,
                          const CriticPair& critics, double lambda_weight, double q_weight,
                          const ActorNoise& noise, bool accumulate_grads,
                          std::optional<double> fixed_scale = std::nullopt);

/// Draws fresh noise and uses the clipped multiplier of `dual`.
ActorLossTerms actor_loss(const Batch& batch, DiffusionPolicy& policy, const CriticPair& critics,
                          const DualState& dual, Rng& rng, bool accumulate_grads = true);

}  // namespace diffcps
