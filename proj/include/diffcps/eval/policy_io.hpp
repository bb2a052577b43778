#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>

#include "diffcps/baselines/awr.hpp"
#include "diffcps/nn/checkpoint.hpp"

namespace diffcps {

using AnyPolicy = std::variant<DiffusionPolicy, GaussianPolicy>;

/// n actions for the fixed `state`, deterministic in `seed`. Drawn in
/// chunks so large n does not allocate one huge batch.
Matrix draw_actions(const AnyPolicy& policy, const Vector& state, std::size_t n, std::uint64_t seed);

/// Writes draw_actions(policy, zero state, n, seed) as an `x,y` CSV.
void export_samples(const AnyPolicy& policy, std::size_t n, std::uint64_t seed, const std::filesystem::path& path);

/// Checkpoint layout. `algo` is one of diffcps, diffusion-bc, awr.
nn::Checkpoint make_checkpoint(const DiffCpsModel& model, const std::string& algo);
nn::Checkpoint make_checkpoint(const AwrModel& model);

/// Rebuilds the evaluation policy, validating the stored architecture.
AnyPolicy load_policy(const nn::Checkpoint& checkpoint);
AnyPolicy load_policy(const std::filesystem::path& path);

int policy_state_dim(const AnyPolicy& policy);
int policy_action_dim(const AnyPolicy& policy);

}  // namespace diffcps
