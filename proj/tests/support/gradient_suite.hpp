#pragma once

// Finite-difference checks of every trainable network under every training
// loss, at the production architecture (3 hidden layers of 256). Shared by
// the unit tests and the acceptance binary.

#include <string>
#include <vector>

#include "diffcps/baselines/awr.hpp"
#include "diffcps/trainer/actor.hpp"
#include "diffcps/trainer/critics.hpp"
#include "support/gradcheck.hpp"

namespace diffcps::testing {

struct NamedGradCheck {
  std::string name;
  GradCheckResult result;
};

inline constexpr int kGradCoords = 100;
inline constexpr double kGradTolerance = 1e-4;

struct GradFixture {
  int batch = 16;
  DiffusionPolicyConfig policy_config;
  Batch data;
  Rng rng{20240};

  GradFixture() {
    policy_config.state_dim = 3;
    policy_config.action_dim = 2;
    data.states = Matrix::Random(3, batch);
    data.actions = Matrix::Random(2, batch) * 0.9;
    data.rewards = Vector::Random(batch);
    data.next_states = Matrix::Random(3, batch);
    data.dones = Vector::Zero(batch);
  }
};

inline GradCheckResult check_ddpm_loss(std::uint64_t seed) {
  GradFixture f;
  Rng init(seed);
  DiffusionPolicy policy(f.policy_config, init);
  const DenoiseNoise noise = policy.draw_denoise_noise(f.batch, f.rng);
  policy.noise_net().zero_grad();
  policy.denoise_loss(f.data.states, f.data.actions, noise, 1.0);
  return check_gradients(
      tensors(policy.noise_net().params()),
      [&] { return policy.denoise_loss(f.data.states, f.data.actions, noise); }, kGradCoords, seed + 1, 1e-5,
      kGradTolerance);
}

inline GradCheckResult check_critic_mse(std::uint64_t seed, int which) {
  GradFixture f;
  Rng init(seed);
  CriticPair critics(nn::MlpSpec{3 + 2, 1}, init);
  nn::Mlp& net = which == 1 ? critics.q1 : critics.q2;
  const Matrix x = critic_input(f.data.states, f.data.actions);
  const Vector y = Vector::Random(f.batch) * 2.0;
  net.zero_grad();
  critic_mse(net, x, y, true);
  return check_gradients(
      tensors(net.params()), [&] { return critic_mse(net, x, y, false); }, kGradCoords, seed + 1, 1e-5,
      kGradTolerance);
}

inline GradCheckResult check_actor_loss(std::uint64_t seed, double lambda_weight) {
  GradFixture f;
  Rng init(seed);
  DiffusionPolicy policy(f.policy_config, init);
  CriticPair critics(nn::MlpSpec{3 + 2, 1}, init);
  const ActorNoise noise = draw_actor_noise(policy, f.batch, f.rng);
  // The scale is gradient-detached; hold it at its measured value so the
  // finite differences see the same objective.
  const double scale =
      actor_loss(f.data.states, f.data.actions, policy, critics, lambda_weight, 1.0, noise, false).scale;
  policy.noise_net().zero_grad();
  actor_loss(f.data.states, f.data.actions, policy, critics, lambda_weight, 1.0, noise, true, scale);
  return check_gradients(
      tensors(policy.noise_net().params()),
      [&] {
        return actor_loss(f.data.states, f.data.actions, policy, critics, lambda_weight, 1.0, noise, false, scale)
            .total;
      },
      kGradCoords, seed + 1, 1e-5, kGradTolerance);
}

inline GradCheckResult check_awr_loss(std::uint64_t seed) {
  GradFixture f;
  Rng init(seed);
  GaussianPolicyConfig pc;
  pc.state_dim = 3;
  pc.action_dim = 2;
  pc.init_log_std = -0.7;
  GaussianPolicy policy(pc, init);
  nn::Mlp critic(nn::MlpSpec{3 + 2, 1}, init);
  policy.zero_grad();
  awr_loss(f.data, policy, critic, 1.0, 20.0, true);
  std::vector<nn::ParamTensor*> params = tensors(policy.mean_net().params());
  params.push_back(&policy.log_std());
  return check_gradients(
      params, [&] { return awr_loss(f.data, policy, critic, 1.0, 20.0, false).loss; }, kGradCoords, seed + 1,
      1e-5, kGradTolerance);
}

inline std::vector<NamedGradCheck> run_gradient_suite(std::uint64_t seed = 7) {
  std::vector<NamedGradCheck> out;
  out.push_back({"ddpm_loss / noise net", check_ddpm_loss(seed)});
  out.push_back({"critic MSE / q1", check_critic_mse(seed + 10, 1)});
  out.push_back({"critic MSE / q2", check_critic_mse(seed + 20, 2)});
  out.push_back({"actor_loss (lambda 0) / noise net", check_actor_loss(seed + 30, 0.0)});
  out.push_back({"actor_loss (lambda 1.5) / noise net", check_actor_loss(seed + 40, 1.5)});
  out.push_back({"awr_loss / mean net + log_std", check_awr_loss(seed + 50)});
  return out;
}

}  // namespace diffcps::testing
