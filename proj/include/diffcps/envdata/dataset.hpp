#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "diffcps/rng.hpp"

namespace diffcps {

struct Transition {
  Eigen::VectorXd state;
  Eigen::VectorXd action;
  double reward = 0.0;
  Eigen::VectorXd next_state;
  bool done = false;

  bool operator==(const Transition& o) const {
    return state == o.state && action == o.action && reward == o.reward && next_state == o.next_state &&
           done == o.done;
  }
};

/// Column-major mini-batch: one transition per column.
struct Batch {
  Eigen::MatrixXd states;
  Eigen::MatrixXd actions;
  Eigen::VectorXd rewards;
  Eigen::MatrixXd next_states;
  Eigen::VectorXd dones;

  Eigen::Index size() const { return actions.cols(); }
};

/// Static offline dataset. Read-only once built: the only ways to obtain
/// one are the generators and load_dataset.
class OfflineDataset {
 public:
  using Metadata = std::map<std::string, std::string>;

  OfflineDataset(std::vector<Transition> transitions, int state_dim, int action_dim, Metadata metadata = {});

  std::size_t size() const { return transitions_.size(); }
  int state_dim() const { return state_dim_; }
  int action_dim() const { return action_dim_; }
  const std::vector<Transition>& transitions() const { return transitions_; }
  const Transition& operator[](std::size_t i) const { return transitions_[i]; }
  const Metadata& metadata() const { return metadata_; }

  /// All actions as a (action_dim x size) matrix.
  const Eigen::MatrixXd& action_matrix() const { return actions_; }

  Batch gather(const std::vector<std::size_t>& indices) const;
  /// Uniform sampling with replacement.
  Batch sample_batch(std::size_t batch_size, Rng& rng) const;

  bool operator==(const OfflineDataset& o) const {
    return state_dim_ == o.state_dim_ && action_dim_ == o.action_dim_ && transitions_ == o.transitions_ &&
           metadata_ == o.metadata_;
  }

 private:
  std::vector<Transition> transitions_;
  int state_dim_;
  int action_dim_;
  Metadata metadata_;
  Eigen::MatrixXd actions_;
};

/// Stateless 2-D bandit: actions on the unit circle plus isotropic N(0, sigma^2)
/// noise, clamped to [-max_action, max_action]^2. Every transition carries the
/// constant zero state (dimension 1), reward 1 and done = 1.
OfflineDataset make_noisy_circle(std::size_t n = 5000, double sigma = 0.05, std::uint64_t seed = 0,
                                 double max_action = 1.0);

/// Text format:
///   diffcps-dataset <version> <state_dim> <action_dim> <count>
///   meta <key>=<value> ...
///   <state...> <action...> <reward> <next_state...> <done>   (count lines)
/// Floats are hexfloats, so a round trip is bit-exact.
void save_dataset(const OfflineDataset& dataset, const std::filesystem::path& path);
OfflineDataset load_dataset(const std::filesystem::path& path);

}  // namespace diffcps
