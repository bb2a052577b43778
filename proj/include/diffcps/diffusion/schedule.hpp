#pragma once

#include <vector>

#include <Eigen/Dense>

namespace diffcps {

/// Discrete variance-preserving noise schedule. Step indices are 1-based:
/// beta(i), alpha(i), alpha_bar(i) for i in [1, steps]; alpha_bar(0) == 1.
class NoiseSchedule {
 public:
  NoiseSchedule() = default;

  int steps() const { return static_cast<int>(beta_.size()); }
  double beta_min() const { return beta_min_; }
  double beta_max() const { return beta_max_; }

  double beta(int i) const;
  double alpha(int i) const;
  double alpha_bar(int i) const;

  const std::vector<double>& betas() const { return beta_; }
  const std::vector<double>& alphas() const { return alpha_; }
  const std::vector<double>& alpha_bars() const { return alpha_bar_; }

  void check_step(int i) const;

 private:
  friend NoiseSchedule make_vp_schedule(int, double, double);

  double beta_min_ = 0.0;
  double beta_max_ = 0.0;
  std::vector<double> beta_;
  std::vector<double> alpha_;
  std::vector<double> alpha_bar_;
};

/// beta_i = 1 - exp(-beta_min/T - 0.5 (beta_max - beta_min)(2i - 1)/T^2).
NoiseSchedule make_vp_schedule(int steps, double beta_min = 0.1, double beta_max = 10.0);

/// Forward noising a^i = sqrt(abar_i) a0 + sqrt(1 - abar_i) eps. Works
/// column-wise on batches.
Eigen::MatrixXd q_sample(const Eigen::MatrixXd& a0, int i, const Eigen::MatrixXd& eps, const NoiseSchedule& sched);

/// Reverse-step mean (a^i - beta_i / sqrt(1 - abar_i) * eps_hat) / sqrt(alpha_i).
Eigen::MatrixXd posterior_mean(const Eigen::MatrixXd& a_i, const Eigen::MatrixXd& eps_hat, int i,
                               const NoiseSchedule& sched);

}  // namespace diffcps
