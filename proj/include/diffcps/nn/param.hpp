#pragma once

#include <array>

#include <Eigen/Dense>

namespace diffcps::nn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// A trainable tensor: current values plus an accumulated gradient of the
/// same shape. Biases are stored as column vectors (n x 1).
struct ParamTensor {
  Matrix value;
  Matrix grad;

  ParamTensor() = default;
  ParamTensor(Eigen::Index rows, Eigen::Index cols)
      : value(Matrix::Zero(rows, cols)), grad(Matrix::Zero(rows, cols)) {}
  explicit ParamTensor(Matrix v) : value(std::move(v)), grad(Matrix::Zero(value.rows(), value.cols())) {}

  std::array<Eigen::Index, 2> shape() const { return {value.rows(), value.cols()}; }
  Eigen::Index size() const { return value.size(); }
  void zero_grad() { grad.setZero(); }
};

}  // namespace diffcps::nn
