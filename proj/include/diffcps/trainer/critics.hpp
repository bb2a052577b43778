#pragma once

#include <utility>

#include "diffcps/diffusion/policy.hpp"
#include "diffcps/envdata/dataset.hpp"
#include "diffcps/nn/optim.hpp"

namespace diffcps {

/// Twin Q-networks over [s ; a] with Polyak-averaged target copies.
struct CriticPair {
  nn::Mlp q1, q2;
  nn::Mlp q1_target, q2_target;

  CriticPair() = default;
  CriticPair(const nn::MlpSpec& spec, Rng& init_rng);
  CriticPair(nn::Mlp q1_net, nn::Mlp q2_net);

  void update_targets(double rho);
};

Matrix critic_input(const Matrix& states, const Matrix& actions);

struct CriticTargetOptions {
  double gamma = 0.99;
  bool max_q_backup = false;
  int max_q_samples = 10;
};

/// y = r + gamma * min_k Q'_k(s', a') with a' drawn from the policy; y = r on
/// terminal transitions. With max-Q backup, N actions are drawn per next
/// state and each target critic takes its max before the twin minimum.
Vector critic_target(const Batch& batch, const DiffusionPolicy& policy, const CriticPair& critics,
                     const CriticTargetOptions& options, Rng& rng);

/// Target computation from already-sampled next actions (one column per
/// transition, or `samples_per_state` consecutive columns per transition).
Vector critic_target_from_actions(const Batch& batch, const Matrix& next_actions, int samples_per_state,
                                  const CriticPair& critics, double gamma);

/// Mean squared error mean_j (y_j - Q(s_j, a_j))^2; accumulates its gradient
/// into `net` when `accumulate` is set.
double critic_mse(nn::Mlp& net, const Matrix& inputs, const Vector& targets, bool accumulate);

/// One Adam step on each online critic. Returns the two MSE losses.
std::pair<double, double> critic_step(const Batch& batch, CriticPair& critics, const Vector& targets,
                                      nn::Adam& opt1, nn::Adam& opt2);

}  // namespace diffcps
