#include "diffcps/diffusion/schedule.hpp"

#include <cmath>
#include <string>

#include "diffcps/errors.hpp"

namespace diffcps {

void NoiseSchedule::check_step(int i) const {
  if (i < 1 || i > steps()) {
    throw UsageError("diffusion step " + std::to_string(i) + " outside [1, " + std::to_string(steps()) + "]");
  }
}

double NoiseSchedule::beta(int i) const {
  check_step(i);
  return beta_[i - 1];
}

double NoiseSchedule::alpha(int i) const {
  check_step(i);
  return alpha_[i - 1];
}

double NoiseSchedule::alpha_bar(int i) const {
  if (i == 0) return 1.0;
  check_step(i);
  return alpha_bar_[i - 1];
}

NoiseSchedule make_vp_schedule(int steps, double beta_min, double beta_max) {
  if (steps < 1) throw ConfigError("noise schedule needs at least one step");
  if (!(beta_min > 0.0) || !(beta_max > beta_min) || !std::isfinite(beta_max)) {
    throw ConfigError("noise schedule requires 0 < beta_min < beta_max");
  }
  NoiseSchedule s;
  s.beta_min_ = beta_min;
  s.beta_max_ = beta_max;
  const double t = static_cast<double>(steps);
  double running = 1.0;
  for (int i = 1; i <= steps; ++i) {
    const double exponent = beta_min / t + 0.5 * (beta_max - beta_min) * (2.0 * i - 1.0) / (t * t);
    const double beta = -std::expm1(-exponent);
    const double alpha = std::exp(-exponent);
    running *= alpha;
    s.beta_.push_back(beta);
    s.alpha_.push_back(alpha);
    s.alpha_bar_.push_back(running);
  }
  return s;
}

Eigen::MatrixXd q_sample(const Eigen::MatrixXd& a0, int i, const Eigen::MatrixXd& eps, const NoiseSchedule& sched) {
  sched.check_step(i);
  if (a0.rows() != eps.rows() || a0.cols() != eps.cols()) throw ConfigError("q_sample: noise shape mismatch");
  const double ab = sched.alpha_bar(i);
  return std::sqrt(ab) * a0 + std::sqrt(1.0 - ab) * eps;
}

Eigen::MatrixXd posterior_mean(const Eigen::MatrixXd& a_i, const Eigen::MatrixXd& eps_hat, int i,
                               const NoiseSchedule& sched) {
  sched.check_step(i);
  if (a_i.rows() != eps_hat.rows() || a_i.cols() != eps_hat.cols()) {
    throw ConfigError("posterior_mean: predicted noise shape mismatch");
  }
  const double coef = sched.beta(i) / std::sqrt(1.0 - sched.alpha_bar(i));
  return (a_i - coef * eps_hat) / std::sqrt(sched.alpha(i));
}

}  // namespace diffcps
