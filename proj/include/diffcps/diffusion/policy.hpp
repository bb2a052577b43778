#pragma once

#include <optional>
#include <vector>

#include "diffcps/diffusion/schedule.hpp"
#include "diffcps/nn/mlp.hpp"
#include "diffcps/rng.hpp"

namespace diffcps {

using nn::Matrix;
using nn::Vector;

struct DiffusionPolicyConfig {
  int state_dim = 1;
  int action_dim = 2;
  int steps = 5;
  double beta_min = 0.1;
  double beta_max = 10.0;
  int time_embed_dim = 16;
  int hidden_dim = 256;
  int hidden_layers = 3;
  double max_action = 1.0;

  void validate() const;
};

/// Sinusoidal encoding of a diffusion step index: [sin(i f_k), cos(i f_k)]
/// with f_k = 10000^(-k / (dim/2 - 1)).
Vector time_embedding(int step, int dim);

/// Noise shared by one reverse-chain draw: the starting sample a^T and the
/// per-step perturbations. `perturbations[i - 1]` is used when moving from
/// a^i to a^(i-1); entry 0 (the final step) is ignored.
struct ChainNoise {
  Matrix initial;
  std::vector<Matrix> perturbations;
};

/// Noise for one evaluation of the denoising loss.
struct DenoiseNoise {
  std::vector<int> steps;  // per column, in [1, T]
  Matrix eps;
};

/// Recorded reverse chain, enough to back-propagate into the noise network.
struct ChainTape {
  std::vector<nn::Tape> net_tapes;  // index i - 1 holds the evaluation at step i
  Matrix output_mask;               // 1 where the final clamp did not bind
  Eigen::Index batch = 0;
};

/// Conditional noise model eps_theta(a^i, s, i) plus its schedule. The
/// network input is [a^i ; s ; embed(i)].
class DiffusionPolicy {
 public:
  DiffusionPolicy() = default;
  DiffusionPolicy(const DiffusionPolicyConfig& config, Rng& init_rng);
  DiffusionPolicy(const DiffusionPolicyConfig& config, nn::Mlp noise_net);

  const DiffusionPolicyConfig& config() const { return config_; }
  const NoiseSchedule& schedule() const { return schedule_; }
  nn::Mlp& noise_net() { return net_; }
  const nn::Mlp& noise_net() const { return net_; }
  int action_dim() const { return config_.action_dim; }
  int state_dim() const { return config_.state_dim; }

  Matrix network_input(const Matrix& noisy_actions, const Matrix& states, const std::vector<int>& steps) const;
  Matrix network_input(const Matrix& noisy_actions, const Matrix& states, int step) const;

  Matrix predict_noise(const Matrix& noisy_actions, const Matrix& states, int step) const;

  ChainNoise draw_chain_noise(Eigen::Index batch, Rng& rng) const;

  /// Runs the reverse chain a^T -> a^0 for every column of `states` and
  /// clamps the result to [-max_action, max_action]. Records a tape when
  /// one is given.
  Matrix sample(const Matrix& states, const ChainNoise& noise, ChainTape* tape = nullptr) const;
  Matrix sample(const Matrix& states, Rng& rng) const;
  Vector sample(const Vector& state, Rng& rng) const;

  /// Back-propagates dLoss/da^0 through the recorded chain, accumulating
  /// noise-network gradients scaled by nothing (the caller folds weights
  /// into `upstream`).
  void backward_chain(const ChainTape& tape, const Matrix& upstream);

  DenoiseNoise draw_denoise_noise(Eigen::Index batch, Rng& rng) const;

  /// Simplified denoising loss mean_j || eps_j - eps_theta(q_sample(a_j, i_j, eps_j), s_j, i_j) ||^2.
  /// When `grad_weight` is set, d(weight * loss)/dtheta is added to the
  /// noise-network gradients.
  double denoise_loss(const Matrix& states, const Matrix& actions, const DenoiseNoise& noise,
                      std::optional<double> grad_weight = std::nullopt);

 private:
  DiffusionPolicyConfig config_;
  NoiseSchedule schedule_;
  nn::Mlp net_;
  Matrix embeddings_;  // column i - 1 is embed(i)
};

/// Denoising loss with freshly drawn (step, noise) pairs, gradients
/// accumulated into the noise network.
double ddpm_loss(DiffusionPolicy& policy, const Matrix& states, const Matrix& actions, Rng& rng);

}  // namespace diffcps
