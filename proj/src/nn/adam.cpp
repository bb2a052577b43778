#include <cmath>

#include "diffcps/errors.hpp"
#include "diffcps/nn/optim.hpp"

namespace diffcps::nn {

Adam::Adam(std::span<const ParamTensor> params, AdamConfig config) : config_(config) {
  if (!(config.lr > 0.0) || config.beta1 < 0.0 || config.beta1 >= 1.0 || config.beta2 < 0.0 ||
      config.beta2 >= 1.0 || !(config.eps > 0.0)) {
    throw ConfigError("Adam: invalid hyperparameters");
  }
  m_.reserve(params.size());
  v_.reserve(params.size());
  for (const auto& p : params) {
    m_.push_back(Matrix::Zero(p.value.rows(), p.value.cols()));
    v_.push_back(Matrix::Zero(p.value.rows(), p.value.cols()));
  }
}

void Adam::step(std::span<ParamTensor> params) {
  if (params.size() != m_.size()) throw UsageError("Adam::step: parameter list does not match the optimizer");
  ++step_;
  const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(step_));
  const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(step_));
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto& p = params[k];
    if (p.grad.rows() != m_[k].rows() || p.grad.cols() != m_[k].cols()) {
      throw UsageError("Adam::step: parameter shape changed");
    }
    m_[k] = config_.beta1 * m_[k] + (1.0 - config_.beta1) * p.grad;
    v_[k] = config_.beta2 * v_[k] + (1.0 - config_.beta2) * p.grad.cwiseAbs2();
    p.value.array() -= config_.lr * (m_[k].array() / c1) / ((v_[k].array() / c2).sqrt() + config_.eps);
  }
}

void polyak_update(std::span<ParamTensor> target, std::span<const ParamTensor> online, double rho) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw ConfigError("polyak_update: rho must lie in [0, 1]");
  if (target.size() != online.size()) throw ConfigError("polyak_update: parameter lists differ in length");
  for (std::size_t k = 0; k < target.size(); ++k) {
    if (target[k].shape() != online[k].shape()) throw ConfigError("polyak_update: shape mismatch");
  }
  for (std::size_t k = 0; k < target.size(); ++k) {
    if (rho == 0.0) {
      target[k].value = online[k].value;
    } else if (rho != 1.0) {
      target[k].value = rho * target[k].value + (1.0 - rho) * online[k].value;
    }
  }
}

void polyak_update(Mlp& target, const Mlp& online, double rho) {
  polyak_update(target.params(), online.params(), rho);
}

}  // namespace diffcps::nn
