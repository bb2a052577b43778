#include <algorithm>
#include <vector>

#include "diffcps/errors.hpp"
#include "diffcps/trainer/critics.hpp"
#include "diffcps/trainer/dual.hpp"

namespace diffcps {

CriticPair::CriticPair(const nn::MlpSpec& spec, Rng& init_rng)
    : q1(spec, init_rng), q2(spec, init_rng), q1_target(q1), q2_target(q2) {}

CriticPair::CriticPair(nn::Mlp q1_net, nn::Mlp q2_net)
    : q1(std::move(q1_net)), q2(std::move(q2_net)), q1_target(q1), q2_target(q2) {
  if (q1.layer_dims() != q2.layer_dims()) throw ConfigError("twin critics must share an architecture");
}

void CriticPair::update_targets(double rho) {
  nn::polyak_update(q1_target, q1, rho);
  nn::polyak_update(q2_target, q2, rho);
}

Matrix critic_input(const Matrix& states, const Matrix& actions) {
  if (states.cols() != actions.cols()) throw ConfigError("critic input: batch sizes differ");
  Matrix x(states.rows() + actions.rows(), states.cols());
  x.topRows(states.rows()) = states;
  x.bottomRows(actions.rows()) = actions;
  return x;
}

Vector critic_target_from_actions(const Batch& batch, const Matrix& next_actions, int samples_per_state,
                                  const CriticPair& critics, double gamma) {
  const Eigen::Index n = batch.size();
  Vector y = batch.rewards;
  std::vector<Eigen::Index> live;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (batch.dones(j) == 0.0) live.push_back(j);
  }
  if (live.empty()) return y;
  const int k = std::max(1, samples_per_state);
  if (next_actions.cols() != static_cast<Eigen::Index>(live.size()) * k) {
    throw ConfigError("critic target: expected one action block per non-terminal transition");
  }
  Matrix states(batch.next_states.rows(), next_actions.cols());
  for (std::size_t l = 0; l < live.size(); ++l) {
    for (int r = 0; r < k; ++r) states.col(static_cast<Eigen::Index>(l) * k + r) = batch.next_states.col(live[l]);
  }
  const Matrix x = critic_input(states, next_actions);
  const Matrix q1 = critics.q1_target.forward(x);
  const Matrix q2 = critics.q2_target.forward(x);
  for (std::size_t l = 0; l < live.size(); ++l) {
    const auto start = static_cast<Eigen::Index>(l) * k;
    const double m1 = q1.row(0).segment(start, k).maxCoeff();
    const double m2 = q2.row(0).segment(start, k).maxCoeff();
    y(live[l]) += gamma * std::min(m1, m2);
  }
  return y;
}

Vector critic_target(const Batch& batch, const DiffusionPolicy& policy, const CriticPair& critics,
                     const CriticTargetOptions& options, Rng& rng) {
  if (options.max_q_backup && options.max_q_samples < 1) throw ConfigError("max-Q backup needs at least one sample");
  const int k = options.max_q_backup ? options.max_q_samples : 1;
  std::vector<Eigen::Index> live;
  for (Eigen::Index j = 0; j < batch.size(); ++j) {
    if (batch.dones(j) == 0.0) live.push_back(j);
  }
  if (live.empty()) return batch.rewards;
  Matrix states(batch.next_states.rows(), static_cast<Eigen::Index>(live.size()) * k);
  for (std::size_t l = 0; l < live.size(); ++l) {
    for (int r = 0; r < k; ++r) states.col(static_cast<Eigen::Index>(l) * k + r) = batch.next_states.col(live[l]);
  }
  const Matrix next_actions = policy.sample(states, rng);
  return critic_target_from_actions(batch, next_actions, k, critics, options.gamma);
}

double critic_mse(nn::Mlp& net, const Matrix& inputs, const Vector& targets, bool accumulate) {
  const Eigen::Index n = inputs.cols();
  if (targets.size() != n || n == 0) throw ConfigError("critic MSE: targets do not match the batch");
  nn::Tape tape;
  const Matrix q = accumulate ? net.forward(inputs, tape) : net.forward(inputs);
  const Matrix resid = q - targets.transpose();
  if (accumulate) net.backward(tape, (2.0 / static_cast<double>(n)) * resid);
  return resid.squaredNorm() / static_cast<double>(n);
}

std::pair<double, double> critic_step(const Batch& batch, CriticPair& critics, const Vector& targets,
                                      nn::Adam& opt1, nn::Adam& opt2) {
  const Matrix x = critic_input(batch.states, batch.actions);
  critics.q1.zero_grad();
  critics.q2.zero_grad();
  const double l1 = critic_mse(critics.q1, x, targets, true);
  const double l2 = critic_mse(critics.q2, x, targets, true);
  opt1.step(critics.q1.params());
  opt2.step(critics.q2.params());
  return {l1, l2};
}

DualState dual_step(DualState dual, double observed_lc) {
  if (!(observed_lc >= 0.0)) throw UsageError("dual_step: observed L_c must be non-negative");
  dual.lambda -= dual.lr * (dual.kappa - observed_lc);
  dual.lambda = std::max(dual.clip, dual.lambda);
  return dual;
}

}  // namespace diffcps
