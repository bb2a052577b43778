#pragma once

#include "diffcps/nn/mlp.hpp"
#include "diffcps/rng.hpp"

namespace diffcps {

using nn::Matrix;
using nn::Vector;

struct GaussianPolicyConfig {
  int state_dim = 1;
  int action_dim = 2;
  int hidden_dim = 256;
  int hidden_layers = 3;
  double max_action = 1.0;
  double log_std_min = -5.0;
  double log_std_max = 2.0;
  double init_log_std = 0.0;
};

/// Unimodal Gaussian policy N(mean_net(s), diag(exp(log_std))^2) with a
/// state-independent, box-bounded log standard deviation.
class GaussianPolicy {
 public:
  GaussianPolicy() = default;
  GaussianPolicy(const GaussianPolicyConfig& config, Rng& init_rng);
  GaussianPolicy(const GaussianPolicyConfig& config, nn::Mlp mean_net, Vector log_std);

  const GaussianPolicyConfig& config() const { return config_; }
  int action_dim() const { return config_.action_dim; }
  int state_dim() const { return config_.state_dim; }

  nn::Mlp& mean_net() { return mean_net_; }
  const nn::Mlp& mean_net() const { return mean_net_; }
  nn::ParamTensor& log_std() { return log_std_; }
  const nn::ParamTensor& log_std() const { return log_std_; }

  Matrix mean(const Matrix& states) const;
  Vector std() const;

  /// Per-column log N(a | mean(s), diag(std^2)).
  Vector log_prob(const Matrix& states, const Matrix& actions) const;

  /// Projects log_std back into [log_std_min, log_std_max].
  void project();
  void zero_grad();

 private:
  GaussianPolicyConfig config_;
  nn::Mlp mean_net_;
  nn::ParamTensor log_std_;
};

/// mean + std_scale * std * z, clamped to the action box. std_scale = 0
/// returns the clamped mean.
Matrix gaussian_sample(const GaussianPolicy& policy, const Matrix& states, Rng& rng, double std_scale = 1.0);

}  // namespace diffcps
