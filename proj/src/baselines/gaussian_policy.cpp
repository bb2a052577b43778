#include "diffcps/baselines/gaussian_policy.hpp"

#include <cmath>
#include <numbers>

#include "diffcps/errors.hpp"

namespace diffcps {

GaussianPolicy::GaussianPolicy(const GaussianPolicyConfig& config, Rng& init_rng)
    : config_(config),
      mean_net_(nn::MlpSpec{config.state_dim, config.action_dim, config.hidden_dim, config.hidden_layers}, init_rng),
      log_std_(Matrix::Constant(config.action_dim, 1, config.init_log_std)) {
  if (!(config.log_std_min < config.log_std_max)) throw ConfigError("gaussian policy: empty log_std range");
  project();
}

GaussianPolicy::GaussianPolicy(const GaussianPolicyConfig& config, nn::Mlp mean_net, Vector log_std)
    : config_(config), mean_net_(std::move(mean_net)), log_std_(Matrix(log_std)) {
  if (mean_net_.input_dim() != config.state_dim || mean_net_.output_dim() != config.action_dim ||
      log_std.size() != config.action_dim) {
    throw ConfigError("gaussian policy: network shape does not match the config");
  }
  project();
}

Matrix GaussianPolicy::mean(const Matrix& states) const { return mean_net_.forward(states); }

Vector GaussianPolicy::std() const { return log_std_.value.col(0).array().exp().matrix(); }

Vector GaussianPolicy::log_prob(const Matrix& states, const Matrix& actions) const {
  const Matrix mu = mean(states);
  const Vector s = std();
  const Matrix z = (actions - mu).array().colwise() / s.array();
  const double norm = log_std_.value.sum() + 0.5 * config_.action_dim * std::log(2.0 * std::numbers::pi);
  return (-0.5 * z.colwise().squaredNorm().array() - norm).matrix().transpose();
}

void GaussianPolicy::project() {
  log_std_.value = log_std_.value.cwiseMax(config_.log_std_min).cwiseMin(config_.log_std_max);
}

void GaussianPolicy::zero_grad() {
  mean_net_.zero_grad();
  log_std_.zero_grad();
}

Matrix gaussian_sample(const GaussianPolicy& policy, const Matrix& states, Rng& rng, double std_scale) {
  Matrix a = policy.mean(states);
  if (std_scale != 0.0) {
    const Matrix z = standard_normal(a.rows(), a.cols(), rng);
    a += (z.array().colwise() * (std_scale * policy.std().array())).matrix();
  }
  const double m = policy.config().max_action;
  return a.cwiseMax(-m).cwiseMin(m);
}

}  // namespace diffcps
