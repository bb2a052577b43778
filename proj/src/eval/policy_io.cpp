#include "diffcps/eval/policy_io.hpp"

#include <algorithm>

#include "diffcps/errors.hpp"
#include "diffcps/eval/metrics.hpp"

namespace diffcps {

namespace {

constexpr std::size_t kChunk = 1024;

void put_policy_meta(nn::Checkpoint& ck, const DiffusionPolicyConfig& c) {
  ck.set_meta("state_dim", static_cast<long long>(c.state_dim));
  ck.set_meta("action_dim", static_cast<long long>(c.action_dim));
  ck.set_meta("diffusion_steps", static_cast<long long>(c.steps));
  ck.set_meta("beta_min", c.beta_min);
  ck.set_meta("beta_max", c.beta_max);
  ck.set_meta("time_embed_dim", static_cast<long long>(c.time_embed_dim));
  ck.set_meta("hidden_dim", static_cast<long long>(c.hidden_dim));
  ck.set_meta("hidden_layers", static_cast<long long>(c.hidden_layers));
  ck.set_meta("max_action", c.max_action);
}

void expect_dims(const nn::Mlp& net, const std::vector<int>& expected, const std::string& name) {
  if (net.layer_dims() != expected) {
    std::string got, want;
    for (int d : net.layer_dims()) got += std::to_string(d) + " ";
    for (int d : expected) want += std::to_string(d) + " ";
    throw ParseError("checkpoint network '" + name + "' has layer widths [ " + got +
                     "] but the recorded architecture requires [ " + want + "]");
  }
}

}  // namespace

Matrix draw_actions(const AnyPolicy& policy, const Vector& state, std::size_t n, std::uint64_t seed) {
  const int adim = policy_action_dim(policy);
  if (state.size() != policy_state_dim(policy)) throw ConfigError("draw_actions: state dimension mismatch");
  Rng rng(seed);
  Matrix out(adim, static_cast<Eigen::Index>(n));
  for (std::size_t start = 0; start < n; start += kChunk) {
    const auto m = static_cast<Eigen::Index>(std::min(kChunk, n - start));
    const Matrix states = state.replicate(1, m);
    Matrix chunk = std::visit(
        [&](const auto& p) -> Matrix {
          using P = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<P, DiffusionPolicy>) {
            return p.sample(states, rng);
          } else {
            return gaussian_sample(p, states, rng);
          }
        },
        policy);
    out.middleCols(static_cast<Eigen::Index>(start), m) = chunk;
  }
  return out;
}

void export_samples(const AnyPolicy& policy, std::size_t n, std::uint64_t seed, const std::filesystem::path& path) {
  write_samples_csv(draw_actions(policy, Vector::Zero(policy_state_dim(policy)), n, seed), path);
}

nn::Checkpoint make_checkpoint(const DiffCpsModel& model, const std::string& algo) {
  if (algo != "diffcps" && algo != "diffusion-bc") throw ConfigError("unknown diffusion algorithm '" + algo + "'");
  nn::Checkpoint ck;
  ck.set_meta("algo", algo);
  put_policy_meta(ck, model.policy.config());
  ck.put_mlp("policy", model.policy.noise_net());
  ck.put_mlp("policy_target", model.policy_target.noise_net());
  if (algo == "diffcps") {
    ck.put_mlp("q1", model.critics.q1);
    ck.put_mlp("q2", model.critics.q2);
    ck.put_mlp("q1_target", model.critics.q1_target);
    ck.put_mlp("q2_target", model.critics.q2_target);
    ck.set_meta("lambda", model.dual.lambda);
    ck.set_meta("kappa", model.dual.kappa);
    ck.set_meta("lambda_clip", model.dual.clip);
  }
  return ck;
}

nn::Checkpoint make_checkpoint(const AwrModel& model) {
  nn::Checkpoint ck;
  const auto& c = model.policy.config();
  ck.set_meta("algo", std::string("awr"));
  ck.set_meta("state_dim", static_cast<long long>(c.state_dim));
  ck.set_meta("action_dim", static_cast<long long>(c.action_dim));
  ck.set_meta("hidden_dim", static_cast<long long>(c.hidden_dim));
  ck.set_meta("hidden_layers", static_cast<long long>(c.hidden_layers));
  ck.set_meta("max_action", c.max_action);
  ck.set_meta("log_std_min", c.log_std_min);
  ck.set_meta("log_std_max", c.log_std_max);
  ck.put_mlp("mean_net", model.policy.mean_net());
  ck.put_tensor("log_std", model.policy.log_std().value);
  ck.put_mlp("critic", model.critic);
  ck.put_mlp("critic_target", model.critic_target);
  return ck;
}

AnyPolicy load_policy(const nn::Checkpoint& ck) {
  const std::string algo = ck.meta("algo");
  if (algo == "diffcps" || algo == "diffusion-bc") {
    DiffusionPolicyConfig c;
    c.state_dim = static_cast<int>(ck.meta_int("state_dim"));
    c.action_dim = static_cast<int>(ck.meta_int("action_dim"));
    c.steps = static_cast<int>(ck.meta_int("diffusion_steps"));
    c.beta_min = ck.meta_double("beta_min");
    c.beta_max = ck.meta_double("beta_max");
    c.time_embed_dim = static_cast<int>(ck.meta_int("time_embed_dim"));
    c.hidden_dim = static_cast<int>(ck.meta_int("hidden_dim"));
    c.hidden_layers = static_cast<int>(ck.meta_int("hidden_layers"));
    c.max_action = ck.meta_double("max_action");
    try {
      c.validate();
    } catch (const ConfigError& e) {
      throw ParseError(std::string("checkpoint architecture is invalid: ") + e.what());
    }
    nn::Mlp net = ck.get_mlp("policy");
    expect_dims(net,
                nn::MlpSpec{c.action_dim + c.state_dim + c.time_embed_dim, c.action_dim, c.hidden_dim,
                            c.hidden_layers}
                    .layer_dims(),
                "policy");
    return DiffusionPolicy(c, std::move(net));
  }
  if (algo == "awr") {
    GaussianPolicyConfig c;
    c.state_dim = static_cast<int>(ck.meta_int("state_dim"));
    c.action_dim = static_cast<int>(ck.meta_int("action_dim"));
    c.hidden_dim = static_cast<int>(ck.meta_int("hidden_dim"));
    c.hidden_layers = static_cast<int>(ck.meta_int("hidden_layers"));
    c.max_action = ck.meta_double("max_action");
    c.log_std_min = ck.meta_double("log_std_min");
    c.log_std_max = ck.meta_double("log_std_max");
    nn::Mlp net = ck.get_mlp("mean_net");
    expect_dims(net, nn::MlpSpec{c.state_dim, c.action_dim, c.hidden_dim, c.hidden_layers}.layer_dims(),
                "mean_net");
    const Matrix& log_std = ck.tensor("log_std");
    if (log_std.rows() != c.action_dim || log_std.cols() != 1) {
      throw ParseError("checkpoint tensor 'log_std' does not match action_dim");
    }
    return GaussianPolicy(c, std::move(net), log_std.col(0));
  }
  throw ParseError("checkpoint has unknown algo '" + algo + "'");
}

AnyPolicy load_policy(const std::filesystem::path& path) { return load_policy(nn::Checkpoint::load(path)); }

int policy_state_dim(const AnyPolicy& policy) {
  return std::visit([](const auto& p) { return p.state_dim(); }, policy);
}

int policy_action_dim(const AnyPolicy& policy) {
  return std::visit([](const auto& p) { return p.action_dim(); }, policy);
}

}  // namespace diffcps
