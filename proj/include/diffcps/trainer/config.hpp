#pragma once

#include <cstdint>

#include "diffcps/diffusion/policy.hpp"

namespace diffcps {

/// Hyperparameters shared by every trainer. Defaults follow the locomotion
/// rows of the DiffCPS hyperparameter table where it gives a value.
struct TrainConfig {
  // loop
  long steps = 20000;
  int batch_size = 256;
  int policy_interval = 2;  // actor + dual update every d-th step
  double gamma = 0.99;
  double lr = 3e-4;
  double polyak = 0.995;
  bool max_q_backup = false;
  int max_q_samples = 10;
  long metrics_every = 100;
  std::uint64_t seed = 0;

  // networks
  int hidden_dim = 256;
  int hidden_layers = 3;
  double max_action = 1.0;

  // diffusion policy
  int diffusion_steps = 5;
  double beta_min = 0.1;
  double beta_max = 10.0;
  int time_embed_dim = 16;

  // constraint / dual
  double kappa = 0.04;
  double lambda_clip = 0.0;
  double lambda_lr = 3e-4;
  double lambda_init = 1.0;
  bool dual_updates = true;
  double q_weight = 1.0;
  bool critic_updates = true;

  // AWR baseline
  double awr_temperature = 1.0;
  double awr_weight_clip = 20.0;

  void validate() const;
  DiffusionPolicyConfig policy_config(int state_dim, int action_dim) const;
};

}  // namespace diffcps
