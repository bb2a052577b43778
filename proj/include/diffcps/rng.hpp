#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace diffcps {

using Rng = std::mt19937_64;

/// Independent generator for a named purpose derived from a run seed.
/// Streams with different ids never share state, so skipping one consumer
/// (e.g. critic training) leaves every other stream untouched.
inline Rng make_stream(std::uint64_t seed, std::uint64_t stream_id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream_id), 0x9e3779b9u};
  return Rng(seq);
}

inline Eigen::MatrixXd standard_normal(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd out(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) out(i, j) = normal(rng);
  }
  return out;
}

}  // namespace diffcps
