#include "diffcps/diffusion/policy.hpp"

#include <cmath>
#include <string>

#include "diffcps/errors.hpp"

namespace diffcps {

void DiffusionPolicyConfig::validate() const {
  if (state_dim < 1 || action_dim < 1) throw ConfigError("diffusion policy: state/action dims must be positive");
  if (time_embed_dim < 2 || time_embed_dim % 2 != 0) {
    throw ConfigError("diffusion policy: time embedding dimension must be even and >= 2");
  }
  if (!(max_action > 0.0)) throw ConfigError("diffusion policy: max_action must be positive");
  if (hidden_dim < 1 || hidden_layers < 0) throw ConfigError("diffusion policy: bad hidden layer spec");
}

Vector time_embedding(int step, int dim) {
  if (dim < 2 || dim % 2 != 0) throw ConfigError("time embedding dimension must be even and >= 2");
  const int half = dim / 2;
  Vector e(dim);
  for (int k = 0; k < half; ++k) {
    const double freq = half == 1 ? 1.0 : std::exp(-std::log(10000.0) * k / (half - 1));
    e(k) = std::sin(step * freq);
    e(half + k) = std::cos(step * freq);
  }
  return e;
}

namespace {

Matrix embedding_table(int steps, int dim) {
  Matrix table(dim, steps);
  for (int i = 1; i <= steps; ++i) table.col(i - 1) = time_embedding(i, dim);
  return table;
}

nn::MlpSpec net_spec(const DiffusionPolicyConfig& c) {
  return {c.action_dim + c.state_dim + c.time_embed_dim, c.action_dim, c.hidden_dim, c.hidden_layers};
}

}  // namespace

DiffusionPolicy::DiffusionPolicy(const DiffusionPolicyConfig& config, Rng& init_rng)
    : config_(config),
      schedule_((config.validate(), make_vp_schedule(config.steps, config.beta_min, config.beta_max))),
      net_(net_spec(config), init_rng),
      embeddings_(embedding_table(config.steps, config.time_embed_dim)) {}

DiffusionPolicy::DiffusionPolicy(const DiffusionPolicyConfig& config, nn::Mlp noise_net)
    : config_(config),
      schedule_((config.validate(), make_vp_schedule(config.steps, config.beta_min, config.beta_max))),
      net_(std::move(noise_net)),
      embeddings_(embedding_table(config.steps, config.time_embed_dim)) {
  if (net_.input_dim() != config.action_dim + config.state_dim + config.time_embed_dim ||
      net_.output_dim() != config.action_dim) {
    throw ConfigError("noise network shape (" + std::to_string(net_.input_dim()) + " -> " +
                      std::to_string(net_.output_dim()) + ") does not match the diffusion policy config");
  }
}

Matrix DiffusionPolicy::network_input(const Matrix& noisy_actions, const Matrix& states,
                                      const std::vector<int>& steps) const {
  const Eigen::Index n = noisy_actions.cols();
  if (noisy_actions.rows() != config_.action_dim || states.rows() != config_.state_dim || states.cols() != n ||
      static_cast<Eigen::Index>(steps.size()) != n) {
    throw ConfigError("diffusion policy: batch shape mismatch");
  }
  Matrix x(net_.input_dim(), n);
  x.topRows(config_.action_dim) = noisy_actions;
  x.middleRows(config_.action_dim, config_.state_dim) = states;
  for (Eigen::Index j = 0; j < n; ++j) {
    schedule_.check_step(steps[j]);
    x.col(j).bottomRows(config_.time_embed_dim) = embeddings_.col(steps[j] - 1);
  }
  return x;
}

Matrix DiffusionPolicy::network_input(const Matrix& noisy_actions, const Matrix& states, int step) const {
  schedule_.check_step(step);
  const Eigen::Index n = noisy_actions.cols();
  if (noisy_actions.rows() != config_.action_dim || states.rows() != config_.state_dim || states.cols() != n) {
    throw ConfigError("diffusion policy: batch shape mismatch");
  }
  Matrix x(net_.input_dim(), n);
  x.topRows(config_.action_dim) = noisy_actions;
  x.middleRows(config_.action_dim, config_.state_dim) = states;
  x.bottomRows(config_.time_embed_dim).colwise() = embeddings_.col(step - 1);
  return x;
}

Matrix DiffusionPolicy::predict_noise(const Matrix& noisy_actions, const Matrix& states, int step) const {
  return net_.forward(network_input(noisy_actions, states, step));
}

ChainNoise DiffusionPolicy::draw_chain_noise(Eigen::Index batch, Rng& rng) const {
  ChainNoise noise;
  noise.initial = standard_normal(config_.action_dim, batch, rng);
  noise.perturbations.resize(config_.steps);
  for (int i = config_.steps; i >= 2; --i) noise.perturbations[i - 1] = standard_normal(config_.action_dim, batch, rng);
  return noise;
}

Matrix DiffusionPolicy::sample(const Matrix& states, const ChainNoise& noise, ChainTape* tape) const {
  const Eigen::Index n = states.cols();
  if (noise.initial.rows() != config_.action_dim || noise.initial.cols() != n ||
      static_cast<int>(noise.perturbations.size()) != config_.steps) {
    throw ConfigError("reverse chain noise does not match the batch");
  }
  if (tape) {
    tape->net_tapes.assign(config_.steps, {});
    tape->batch = n;
  }
  Matrix a = noise.initial;
  for (int i = config_.steps; i >= 1; --i) {
    const Matrix input = network_input(a, states, i);
    const Matrix eps_hat = tape ? net_.forward(input, tape->net_tapes[i - 1]) : net_.forward(input);
    a = posterior_mean(a, eps_hat, i, schedule_);
    if (i > 1) a += std::sqrt(schedule_.beta(i)) * noise.perturbations[i - 1];
  }
  const double m = config_.max_action;
  if (tape) tape->output_mask = (a.array().abs() <= m).cast<double>().matrix();
  return a.cwiseMax(-m).cwiseMin(m);
}

Matrix DiffusionPolicy::sample(const Matrix& states, Rng& rng) const {
  return sample(states, draw_chain_noise(states.cols(), rng));
}

Vector DiffusionPolicy::sample(const Vector& state, Rng& rng) const {
  return sample(Matrix(state), rng).col(0);
}

void DiffusionPolicy::backward_chain(const ChainTape& tape, const Matrix& upstream) {
  if (static_cast<int>(tape.net_tapes.size()) != config_.steps || tape.output_mask.size() == 0) {
    throw UsageError("backward_chain called without a recorded reverse chain");
  }
  if (upstream.rows() != config_.action_dim || upstream.cols() != tape.batch) {
    throw ConfigError("backward_chain: upstream gradient shape mismatch");
  }
  Matrix g = upstream.cwiseProduct(tape.output_mask);
  for (int i = 1; i <= config_.steps; ++i) {
    const double inv_sqrt_alpha = 1.0 / std::sqrt(schedule_.alpha(i));
    const double coef = schedule_.beta(i) / std::sqrt(1.0 - schedule_.alpha_bar(i));
    const Matrix d_eps = (-coef * inv_sqrt_alpha) * g;
    const Matrix d_input = net_.backward(tape.net_tapes[i - 1], d_eps);
    g = inv_sqrt_alpha * g + d_input.topRows(config_.action_dim);
  }
}

DenoiseNoise DiffusionPolicy::draw_denoise_noise(Eigen::Index batch, Rng& rng) const {
  DenoiseNoise noise;
  std::uniform_int_distribution<int> step(1, config_.steps);
  noise.steps.resize(batch);
  for (auto& s : noise.steps) s = step(rng);
  noise.eps = standard_normal(config_.action_dim, batch, rng);
  return noise;
}

double DiffusionPolicy::denoise_loss(const Matrix& states, const Matrix& actions, const DenoiseNoise& noise,
                                     std::optional<double> grad_weight) {
  const Eigen::Index n = actions.cols();
  if (n == 0) throw UsageError("denoising loss on an empty batch");
  if (noise.eps.rows() != actions.rows() || noise.eps.cols() != n) {
    throw ConfigError("denoising noise does not match the batch");
  }
  Matrix noisy(actions.rows(), n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double ab = schedule_.alpha_bar(noise.steps[j]);
    noisy.col(j) = std::sqrt(ab) * actions.col(j) + std::sqrt(1.0 - ab) * noise.eps.col(j);
  }
  const Matrix input = network_input(noisy, states, noise.steps);
  nn::Tape tape;
  const Matrix eps_hat = grad_weight ? net_.forward(input, tape) : net_.forward(input);
  const Matrix resid = eps_hat - noise.eps;
  const double loss = resid.squaredNorm() / static_cast<double>(n);
  if (grad_weight) net_.backward(tape, (2.0 * *grad_weight / static_cast<double>(n)) * resid);
  return loss;
}

double ddpm_loss(DiffusionPolicy& policy, const Matrix& states, const Matrix& actions, Rng& rng) {
  if (actions.cols() == 0) throw UsageError("ddpm_loss on an empty batch");
  return policy.denoise_loss(states, actions, policy.draw_denoise_noise(actions.cols(), rng), 1.0);
}

}  // namespace diffcps
