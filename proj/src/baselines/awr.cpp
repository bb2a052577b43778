#include "diffcps/baselines/awr.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "diffcps/errors.hpp"
#include "diffcps/nn/optim.hpp"

namespace diffcps {

Vector awr_weights(const Vector& q, double alpha, double clip) {
  if (!(clip > 0.0)) throw ConfigError("AWR weight clip must be positive");
  // Overflow to inf is harmless here: the min() maps it to the ceiling.
  return (alpha * q.array()).exp().min(clip).max(std::numeric_limits<double>::min()).matrix();
}

AwrLossTerms awr_loss(const Batch& batch, GaussianPolicy& policy, const nn::Mlp& critic, double alpha,
                      double weight_clip, bool accumulate_grads) {
  const Eigen::Index n = batch.size();
  if (n == 0) throw UsageError("AWR loss on an empty batch");
  const Vector q = critic.forward(critic_input(batch.states, batch.actions)).row(0).transpose();
  const Vector w = awr_weights(q, alpha, weight_clip);

  nn::Tape tape;
  const Matrix mu = accumulate_grads ? policy.mean_net().forward(batch.states, tape) : policy.mean(batch.states);
  const Vector s = policy.std();
  const Matrix diff = batch.actions - mu;
  const Matrix z = diff.array().colwise() / s.array();
  const double norm =
      policy.log_std().value.sum() + 0.5 * policy.action_dim() * std::log(2.0 * std::numbers::pi);
  const Vector logp = (-0.5 * z.colwise().squaredNorm().array() - norm).matrix().transpose();

  AwrLossTerms out;
  out.loss = -(w.array() * logp.array()).sum() / static_cast<double>(n);
  out.mean_weight = w.mean();
  if (accumulate_grads) {
    // dL/dmu = -(1/n) w (a - mu) / std^2 ; dL/dlog_std = -(1/n) sum_j w_j (z^2 - 1)
    Matrix dmu = (diff.array().colwise() / s.array().square()).matrix();
    dmu = -(dmu.array().rowwise() * w.transpose().array()).matrix() / static_cast<double>(n);
    policy.mean_net().backward(tape, dmu);
    const Matrix zz = z.array().square() - 1.0;
    policy.log_std().grad.col(0) -= (zz * w.asDiagonal()).rowwise().sum() / static_cast<double>(n);
  }
  return out;
}

TrainRun<AwrModel> train_awr(const OfflineDataset& dataset, const TrainConfig& config,
                             const MetricsCallback& on_metrics) {
  config.validate();
  keep_heap_resident();
  const int sdim = dataset.state_dim();
  const int adim = dataset.action_dim();
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();

  Rng policy_init = make_stream(config.seed, static_cast<std::uint64_t>(Stream::PolicyInit));
  Rng critic_init = make_stream(config.seed, static_cast<std::uint64_t>(Stream::CriticInit));
  Rng batch_rng = make_stream(config.seed, static_cast<std::uint64_t>(Stream::Batches));

  GaussianPolicyConfig pc;
  pc.state_dim = sdim;
  pc.action_dim = adim;
  pc.hidden_dim = config.hidden_dim;
  pc.hidden_layers = config.hidden_layers;
  pc.max_action = config.max_action;
  nn::Mlp critic(nn::MlpSpec{sdim + adim, 1, config.hidden_dim, config.hidden_layers}, critic_init);
  TrainRun<AwrModel> run{AwrModel{GaussianPolicy(pc, policy_init), critic, critic}, {}, 0};
  AwrModel& m = run.model;

  const nn::AdamConfig adam{config.lr};
  nn::Adam mean_opt(m.policy.mean_net().params(), adam);
  nn::Adam std_opt(std::span<const nn::ParamTensor>(&m.policy.log_std(), 1), adam);
  nn::Adam critic_opt(m.critic.params(), adam);

  double critic_loss = nan, policy_loss = nan, q_scale = nan;
  for (long t = 1; t <= config.steps; ++t) {
    const Batch batch = dataset.sample_batch(static_cast<std::size_t>(config.batch_size), batch_rng);

    Vector y = batch.rewards;
    if ((batch.dones.array() == 0.0).any()) {
      const Matrix next_a = gaussian_sample(m.policy, batch.next_states, batch_rng, 0.0);
      const Vector q_next = m.critic_target.forward(critic_input(batch.next_states, next_a)).row(0).transpose();
      y.array() += config.gamma * (1.0 - batch.dones.array()) * q_next.array();
    }
    m.critic.zero_grad();
    critic_loss = critic_mse(m.critic, critic_input(batch.states, batch.actions), y, true);
    critic_opt.step(m.critic.params());

    m.policy.zero_grad();
    const AwrLossTerms terms =
        awr_loss(batch, m.policy, m.critic, config.awr_temperature, config.awr_weight_clip, true);
    mean_opt.step(m.policy.mean_net().params());
    std_opt.step(std::span<nn::ParamTensor>(&m.policy.log_std(), 1));
    m.policy.project();
    policy_loss = terms.loss;

    nn::polyak_update(m.critic_target, m.critic, config.polyak);

    if (t % config.metrics_every == 0 || t == config.steps) {
      q_scale = m.critic_target.forward(critic_input(batch.states, batch.actions)).cwiseAbs().mean();
      MetricsRow row{t, critic_loss, policy_loss, nan, nan, q_scale};
      run.metrics.push_back(row);
      if (on_metrics) on_metrics(row);
    }
  }
  return run;
}

TrainRun<DiffCpsModel> diffusion_bc_train(const OfflineDataset& dataset, const TrainConfig& config,
                                          const MetricsCallback& on_metrics) {
  TrainConfig bc = config;
  bc.q_weight = 0.0;
  bc.dual_updates = false;
  bc.critic_updates = false;
  bc.lambda_init = 1.0;
  bc.lambda_clip = 0.0;
  return train_diffcps(dataset, bc, on_metrics);
}

}  // namespace diffcps
