#pragma once

#include <span>
#include <vector>

#include "diffcps/nn/mlp.hpp"

namespace diffcps::nn {

struct AdamConfig {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Adam moments for a fixed list of parameter tensors.
class Adam {
 public:
  Adam() = default;
  Adam(std::span<const ParamTensor> params, AdamConfig config = {});

  /// Applies one update from the current grads. Grads are left as they are.
  void step(std::span<ParamTensor> params);

  long step_count() const { return step_; }
  const AdamConfig& config() const { return config_; }
  const std::vector<Matrix>& first_moments() const { return m_; }
  const std::vector<Matrix>& second_moments() const { return v_; }

 private:
  AdamConfig config_;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
  long step_ = 0;
};

/// target <- rho * target + (1 - rho) * online, elementwise.
void polyak_update(std::span<ParamTensor> target, std::span<const ParamTensor> online, double rho);
void polyak_update(Mlp& target, const Mlp& online, double rho);

}  // namespace diffcps::nn
