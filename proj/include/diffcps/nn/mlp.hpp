#pragma once

#include <span>
#include <vector>

#include "diffcps/nn/param.hpp"
#include "diffcps/rng.hpp"

namespace diffcps::nn {

/// Mish activation x * tanh(softplus(x)), elementwise.
Matrix mish(const Matrix& x);
/// d/dx of mish, elementwise.
Matrix mish_derivative(const Matrix& x);

/// Architecture of a fully connected network.
struct MlpSpec {
  int input_dim = 1;
  int output_dim = 1;
  int hidden_dim = 256;
  int hidden_layers = 3;

  std::vector<int> layer_dims() const;
};

/// Intermediates recorded by a training-mode forward pass. One tape per
/// evaluation: the same network may be evaluated several times (the reverse
/// diffusion chain does this) and each evaluation keeps its own tape.
struct Tape {
  std::vector<Matrix> inputs;          // input to each layer
  std::vector<Matrix> pre_activations; // affine output of each hidden layer

  bool empty() const { return inputs.empty(); }
};

/// Feed-forward network with Mish on hidden layers and an identity output.
/// Batches are column-major: one sample per column.
class Mlp {
 public:
  Mlp() = default;
  /// Zero-initialized network with the given layer widths (input first).
  explicit Mlp(const std::vector<int>& dims);
  /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) initialization.
  Mlp(const MlpSpec& spec, Rng& rng);

  int input_dim() const;
  int output_dim() const;
  int num_layers() const { return static_cast<int>(params_.size() / 2); }
  std::vector<int> layer_dims() const;

  ParamTensor& weight(int layer) { return params_[2 * layer]; }
  ParamTensor& bias(int layer) { return params_[2 * layer + 1]; }
  const ParamTensor& weight(int layer) const { return params_[2 * layer]; }
  const ParamTensor& bias(int layer) const { return params_[2 * layer + 1]; }

  /// All parameters, ordered weight0, bias0, weight1, ...
  std::span<ParamTensor> params() { return params_; }
  std::span<const ParamTensor> params() const { return params_; }

  Matrix forward(const Matrix& input) const;
  Matrix forward(const Matrix& input, Tape& tape) const;
  Vector forward(const Vector& input) const;

  /// Back-propagates `upstream` (dLoss/dOutput, same shape as the output of
  /// the recorded pass), adding parameter gradients to each grad. Returns
  /// dLoss/dInput.
  Matrix backward(const Tape& tape, const Matrix& upstream);
  /// dLoss/dInput only; parameter grads are left alone.
  Matrix input_gradient(const Tape& tape, const Matrix& upstream) const;

  void zero_grad();
  Eigen::Index parameter_count() const;

 private:
  void check_input(const Matrix& input) const;
  Matrix propagate(const Tape& tape, const Matrix& upstream, Mlp* accumulate) const;

  std::vector<ParamTensor> params_;
};

}  // namespace diffcps::nn
