#include "diffcps/nn/mlp.hpp"

#include <cmath>
#include <string>

#include "diffcps/errors.hpp"

namespace diffcps::nn {

// tanh(softplus(x)) = n / (n + 2) with u = e^x, n = u (u + 2). The exponent is
// capped at 20 where the ratio already equals 1 to double precision.
Matrix mish(const Matrix& x) {
  const auto u = x.array().min(20.0).exp();
  const auto n = u * (u + 2.0);
  return (x.array() * n / (n + 2.0)).matrix();
}

Matrix mish_derivative(const Matrix& x) {
  const Eigen::ArrayXXd u = x.array().min(20.0).exp();
  const Eigen::ArrayXXd n = u * (u + 2.0);
  const Eigen::ArrayXXd denom = n + 2.0;
  const Eigen::ArrayXXd t = n / denom;
  const Eigen::ArrayXXd dt = 4.0 * u * (u + 1.0) / denom.square();
  return (t + x.array() * dt).matrix();
}

std::vector<int> MlpSpec::layer_dims() const {
  if (input_dim < 1 || output_dim < 1 || hidden_dim < 1 || hidden_layers < 0) {
    throw ConfigError("MlpSpec: dimensions must be positive");
  }
  std::vector<int> dims{input_dim};
  for (int i = 0; i < hidden_layers; ++i) dims.push_back(hidden_dim);
  dims.push_back(output_dim);
  return dims;
}

Mlp::Mlp(const std::vector<int>& dims) {
  if (dims.size() < 2) throw ConfigError("Mlp needs at least an input and an output width");
  for (int d : dims) {
    if (d < 1) throw ConfigError("Mlp layer widths must be positive");
  }
  for (std::size_t k = 0; k + 1 < dims.size(); ++k) {
    params_.emplace_back(dims[k + 1], dims[k]);
    params_.emplace_back(dims[k + 1], 1);
  }
}

Mlp::Mlp(const MlpSpec& spec, Rng& rng) : Mlp(spec.layer_dims()) {
  for (int k = 0; k < num_layers(); ++k) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(weight(k).value.cols()));
    std::uniform_real_distribution<double> uniform(-bound, bound);
    for (auto* p : {&weight(k), &bias(k)}) {
      Matrix& v = p->value;
      for (Eigen::Index j = 0; j < v.cols(); ++j) {
        for (Eigen::Index i = 0; i < v.rows(); ++i) v(i, j) = uniform(rng);
      }
    }
  }
}

int Mlp::input_dim() const { return params_.empty() ? 0 : static_cast<int>(params_.front().value.cols()); }

int Mlp::output_dim() const { return params_.empty() ? 0 : static_cast<int>(params_[params_.size() - 2].value.rows()); }

std::vector<int> Mlp::layer_dims() const {
  std::vector<int> dims;
  if (params_.empty()) return dims;
  dims.push_back(input_dim());
  for (int k = 0; k < num_layers(); ++k) dims.push_back(static_cast<int>(weight(k).value.rows()));
  return dims;
}

void Mlp::check_input(const Matrix& input) const {
  if (params_.empty()) throw ConfigError("Mlp has no layers");
  if (input.rows() != input_dim()) {
    throw ConfigError("Mlp input has " + std::to_string(input.rows()) + " rows, expected " +
                      std::to_string(input_dim()));
  }
}

Matrix Mlp::forward(const Matrix& input) const {
  check_input(input);
  Matrix h = input;
  const int last = num_layers() - 1;
  for (int k = 0; k <= last; ++k) {
    Matrix z = weight(k).value * h;
    z.colwise() += bias(k).value.col(0);
    h = (k == last) ? std::move(z) : mish(z);
  }
  return h;
}

Matrix Mlp::forward(const Matrix& input, Tape& tape) const {
  check_input(input);
  tape.inputs.clear();
  tape.pre_activations.clear();
  Matrix h = input;
  const int last = num_layers() - 1;
  for (int k = 0; k <= last; ++k) {
    tape.inputs.push_back(h);
    Matrix z = weight(k).value * h;
    z.colwise() += bias(k).value.col(0);
    if (k == last) {
      h = std::move(z);
    } else {
      h = mish(z);
      tape.pre_activations.push_back(std::move(z));
    }
  }
  return h;
}

Vector Mlp::forward(const Vector& input) const {
  return forward(Matrix(input)).col(0);
}

Matrix Mlp::backward(const Tape& tape, const Matrix& upstream) { return propagate(tape, upstream, this); }

Matrix Mlp::input_gradient(const Tape& tape, const Matrix& upstream) const {
  return propagate(tape, upstream, nullptr);
}

Matrix Mlp::propagate(const Tape& tape, const Matrix& upstream, Mlp* accumulate) const {
  if (tape.empty()) throw UsageError("Mlp::backward called without a recorded forward pass");
  if (static_cast<int>(tape.inputs.size()) != num_layers()) {
    throw UsageError("Mlp::backward: tape was recorded by a different network");
  }
  const Eigen::Index batch = tape.inputs.front().cols();
  if (upstream.rows() != output_dim() || upstream.cols() != batch) {
    throw ConfigError("Mlp::backward: upstream gradient shape mismatch");
  }
  Matrix delta = upstream;
  for (int k = num_layers() - 1; k >= 0; --k) {
    if (k < num_layers() - 1) {
      delta.array() *= mish_derivative(tape.pre_activations[k]).array();
    }
    if (accumulate) {
      accumulate->weight(k).grad.noalias() += delta * tape.inputs[k].transpose();
      accumulate->bias(k).grad.noalias() += delta.rowwise().sum();
    }
    Matrix below = weight(k).value.transpose() * delta;
    delta = std::move(below);
  }
  return delta;
}

void Mlp::zero_grad() {
  for (auto& p : params_) p.zero_grad();
}

Eigen::Index Mlp::parameter_count() const {
  Eigen::Index n = 0;
  for (const auto& p : params_) n += p.size();
  return n;
}

}  // namespace diffcps::nn
