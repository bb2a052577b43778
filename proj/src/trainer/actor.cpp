#include "diffcps/trainer/actor.hpp"

#include <cmath>

#include "diffcps/errors.hpp"

namespace diffcps {

ActorNoise draw_actor_noise(const DiffusionPolicy& policy, Eigen::Index batch, Rng& rng) {
  ActorNoise noise;
  noise.chain = policy.draw_chain_noise(batch, rng);
  noise.denoise = policy.draw_denoise_noise(batch, rng);
  return noise;
}

ActorLossTerms actor_loss(const Matrix& states, const Matrix& actions, DiffusionPolicy& policy,
                          const CriticPair& critics, double lambda_weight, double q_weight,
                          const ActorNoise& noise, bool accumulate_grads, std::optional<double> fixed_scale) {
  const Eigen::Index n = states.cols();
  if (n == 0) throw UsageError("actor loss on an empty batch");
  ActorLossTerms out;
  if (q_weight != 0.0) {
    ChainTape chain_tape;
    const Matrix sampled = policy.sample(states, noise.chain, accumulate_grads ? &chain_tape : nullptr);
    const Matrix x = critic_input(states, sampled);
    nn::Tape q_tape;
    const Matrix q = accumulate_grads ? critics.q1.forward(x, q_tape) : critics.q1.forward(x);
    if (fixed_scale) {
      out.scale = *fixed_scale;
    } else {
      out.scale = critics.q1_target.forward(x).cwiseAbs().mean();
      if (!(out.scale >= kMinQScale)) {
        out.scale = 1.0;
        out.scale_fallback = true;
      }
    }
    out.q_term = -q_weight * q.mean() / out.scale;
    if (accumulate_grads) {
      const Matrix dq = Matrix::Constant(1, n, -q_weight / (static_cast<double>(n) * out.scale));
      const Matrix dx = critics.q1.input_gradient(q_tape, dq);
      policy.backward_chain(chain_tape, dx.bottomRows(policy.action_dim()));
    }
  }
  const bool constraint_grad = accumulate_grads && lambda_weight != 0.0;
  out.lc = policy.denoise_loss(states, actions, noise.denoise,
                               constraint_grad ? std::optional<double>(lambda_weight) : std::nullopt);
  out.total = out.q_term + lambda_weight * out.lc;
  return out;
}

ActorLossTerms actor_loss(const Batch& batch, DiffusionPolicy& policy, const CriticPair& critics,
                          const DualState& dual, Rng& rng, bool accumulate_grads) {
  const ActorNoise noise = draw_actor_noise(policy, batch.size(), rng);
  return actor_loss(batch.states, batch.actions, policy, critics, dual.weight(), 1.0, noise, accumulate_grads);
}

}  // namespace diffcps
