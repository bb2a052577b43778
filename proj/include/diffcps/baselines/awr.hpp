#pragma once

#include "diffcps/baselines/gaussian_policy.hpp"
#include "diffcps/envdata/dataset.hpp"
#include "diffcps/trainer/train.hpp"

namespace diffcps {

/// min(exp(alpha * q), clip) per element; always in (0, clip].
Vector awr_weights(const Vector& q, double alpha, double clip);

struct AwrLossTerms {
  double loss = 0.0;  // -mean_j w_j log pi(a_j | s_j)
  double mean_weight = 0.0;
};

/// Weighted negative log-likelihood of the dataset actions with weights
/// from the critic. The per-state partition function is dropped. Gradients
/// (weights held fixed) go to the mean network and log_std.
AwrLossTerms awr_loss(const Batch& batch, GaussianPolicy& policy, const nn::Mlp& critic, double alpha,
                      double weight_clip, bool accumulate_grads);

struct AwrModel {
  GaussianPolicy policy;
  nn::Mlp critic;
  nn::Mlp critic_target;
};

/// AWR with a single TD critic: y = r + gamma (1 - done) Q'(s', mean(s')).
/// In the terminal-only bandit this is a reward regressor. Metrics rows
/// carry the AWR loss in the actor_q_term column; L_c and lambda are NaN.
TrainRun<AwrModel> train_awr(const OfflineDataset& dataset, const TrainConfig& config,
                             const MetricsCallback& on_metrics = {});

/// Diffusion behavior cloning: the DiffCPS loop with the Q-term, critic
/// training and dual updates switched off and the constraint weight fixed
/// at 1, i.e. plain denoising-loss minimization.
TrainRun<DiffCpsModel> diffusion_bc_train(const OfflineDataset& dataset, const TrainConfig& config,
                                          const MetricsCallback& on_metrics = {});

}  // namespace diffcps
