#include "diffcps/trainer/train.hpp"

#include <cmath>
#include <iostream>
#include <limits>

#include "diffcps/errors.hpp"

#if defined(__GLIBC__)
#include <malloc.h>
#endif

namespace diffcps {

void TrainConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(what);
  };
  require(steps >= 1, "steps must be >= 1");
  require(batch_size >= 1, "batch_size must be >= 1");
  require(policy_interval >= 1, "policy_interval must be >= 1");
  require(gamma >= 0.0 && gamma < 1.0, "gamma must lie in [0, 1)");
  require(lr > 0.0, "lr must be positive");
  require(polyak >= 0.0 && polyak <= 1.0, "polyak must lie in [0, 1]");
  require(max_q_samples >= 1, "max_q_samples must be >= 1");
  require(metrics_every >= 1, "metrics_every must be >= 1");
  require(hidden_dim >= 1 && hidden_layers >= 0, "bad hidden layer spec");
  require(max_action > 0.0, "max_action must be positive");
  require(diffusion_steps >= 1, "diffusion steps T must be >= 1");
  require(beta_min > 0.0 && beta_max > beta_min, "need 0 < beta_min < beta_max");
  require(time_embed_dim >= 2 && time_embed_dim % 2 == 0, "time_embed_dim must be even and >= 2");
  require(kappa > 0.0, "kappa must be positive");
  require(lambda_clip >= 0.0, "lambda_clip must be >= 0");
  require(lambda_lr > 0.0, "lambda_lr must be positive");
  require(std::isfinite(lambda_init), "lambda_init must be finite");
  require(std::isfinite(q_weight), "q_weight must be finite");
  require(awr_temperature >= 0.0, "awr_temperature must be >= 0");
  require(awr_weight_clip > 0.0, "awr_weight_clip must be positive");
}

DiffusionPolicyConfig TrainConfig::policy_config(int state_dim, int action_dim) const {
  DiffusionPolicyConfig c;
  c.state_dim = state_dim;
  c.action_dim = action_dim;
  c.steps = diffusion_steps;
  c.beta_min = beta_min;
  c.beta_max = beta_max;
  c.time_embed_dim = time_embed_dim;
  c.hidden_dim = hidden_dim;
  c.hidden_layers = hidden_layers;
  c.max_action = max_action;
  return c;
}

void keep_heap_resident() {
#if defined(__GLIBC__)
  static const bool done = [] {
    mallopt(M_MMAP_THRESHOLD, 256 * 1024 * 1024);
    mallopt(M_TRIM_THRESHOLD, 512 * 1024 * 1024);
    mallopt(M_TOP_PAD, 64 * 1024 * 1024);
    return true;
  }();
  (void)done;
#endif
}

TrainRun<DiffCpsModel> train_diffcps(const OfflineDataset& dataset, const TrainConfig& config,
                                     const MetricsCallback& on_metrics) {
  config.validate();
  keep_heap_resident();
  const int sdim = dataset.state_dim();
  const int adim = dataset.action_dim();
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();

  Rng policy_init = make_stream(config.seed, static_cast<std::uint64_t>(Stream::PolicyInit));
  Rng critic_init = make_stream(config.seed, static_cast<std::uint64_t>(Stream::CriticInit));
  Rng batch_rng = make_stream(config.seed, static_cast<std::uint64_t>(Stream::Batches));
  Rng target_rng = make_stream(config.seed, static_cast<std::uint64_t>(Stream::CriticTarget));
  Rng chain_rng = make_stream(config.seed, static_cast<std::uint64_t>(Stream::ActorChain));
  Rng denoise_rng = make_stream(config.seed, static_cast<std::uint64_t>(Stream::Denoise));

  DiffusionPolicy policy(config.policy_config(sdim, adim), policy_init);
  TrainRun<DiffCpsModel> run{
      DiffCpsModel{policy, policy,
                   CriticPair(nn::MlpSpec{sdim + adim, 1, config.hidden_dim, config.hidden_layers}, critic_init),
                   DualState{std::max(config.lambda_clip, config.lambda_init), config.kappa, config.lambda_clip,
                             config.lambda_lr}},
      {},
      0};
  DiffCpsModel& m = run.model;

  const nn::AdamConfig adam{config.lr};
  nn::Adam actor_opt(m.policy.noise_net().params(), adam);
  nn::Adam q1_opt(m.critics.q1.params(), adam);
  nn::Adam q2_opt(m.critics.q2.params(), adam);
  const CriticTargetOptions target_opts{config.gamma, config.max_q_backup, config.max_q_samples};

  double critic_loss = nan, q_term = nan, lc = nan, scale = nan;
  for (long t = 1; t <= config.steps; ++t) {
    const Batch batch = dataset.sample_batch(static_cast<std::size_t>(config.batch_size), batch_rng);

    if (config.critic_updates) {
      const Vector y = critic_target(batch, m.policy, m.critics, target_opts, target_rng);
      const auto [l1, l2] = critic_step(batch, m.critics, y, q1_opt, q2_opt);
      critic_loss = l1 + l2;
    }

    if (t % config.policy_interval == 0) {
      ActorNoise noise;
      if (config.q_weight != 0.0) noise.chain = m.policy.draw_chain_noise(batch.size(), chain_rng);
      noise.denoise = m.policy.draw_denoise_noise(batch.size(), denoise_rng);
      m.policy.noise_net().zero_grad();
      const ActorLossTerms terms = actor_loss(batch.states, batch.actions, m.policy, m.critics, m.dual.weight(),
                                              config.q_weight, noise, true);
      actor_opt.step(m.policy.noise_net().params());
      if (config.dual_updates) m.dual = dual_step(m.dual, terms.lc);
      if (terms.scale_fallback) {
        if (run.scale_warnings == 0) {
          std::cerr << "warning: mean |Q_target| below " << kMinQScale << " at step " << t
                    << "; normalizing the Q-term by 1\n";
        }
        ++run.scale_warnings;
      }
      q_term = config.q_weight != 0.0 ? terms.q_term : nan;
      scale = config.q_weight != 0.0 ? terms.scale : nan;
      lc = terms.lc;
    }

    nn::polyak_update(m.policy_target.noise_net(), m.policy.noise_net(), config.polyak);
    if (config.critic_updates) m.critics.update_targets(config.polyak);

    if (t % config.metrics_every == 0 || t == config.steps) {
      MetricsRow row{t, critic_loss, q_term, lc, m.dual.lambda, scale};
      run.metrics.push_back(row);
      if (on_metrics) on_metrics(row);
    }
  }
  return run;
}

}  // namespace diffcps
