#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "diffcps/nn/param.hpp"
#include "diffcps/rng.hpp"

namespace diffcps::testing {

// Denominator floor for the relative error: below this magnitude both
// gradients are treated as zero-valued and compared absolutely.
inline constexpr double kGradFloor = 1e-6;

inline std::vector<nn::ParamTensor*> tensors(std::span<nn::ParamTensor> params) {
  std::vector<nn::ParamTensor*> out;
  for (auto& p : params) out.push_back(&p);
  return out;
}

struct GradCheckResult {
  int checked = 0;
  int failed = 0;
  double max_rel_error = 0.0;
  std::string worst;
};

inline double relative_error(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), kGradFloor});
  return std::abs(analytic - numeric) / denom;
}

// Compares the grads already stored in `params` against central differences
// of `loss` at `coords` coordinates: one per tensor first, the rest uniform
// over all parameter coordinates. `loss` must be deterministic and must not
// touch the grads.
inline GradCheckResult check_gradients(const std::vector<nn::ParamTensor*>& params, const std::function<double()>& loss,
                                       int coords, std::uint64_t seed, double h = 1e-5, double tol = 1e-4) {
  Rng rng(seed);
  std::vector<std::pair<std::size_t, Eigen::Index>> picks;
  Eigen::Index total = 0;
  for (const auto* p : params) total += p->size();
  for (std::size_t t = 0; t < params.size() && static_cast<int>(picks.size()) < coords; ++t) {
    std::uniform_int_distribution<Eigen::Index> in(0, params[t]->size() - 1);
    picks.emplace_back(t, in(rng));
  }
  std::uniform_int_distribution<Eigen::Index> any(0, total - 1);
  while (static_cast<int>(picks.size()) < coords) {
    Eigen::Index flat = any(rng);
    std::size_t t = 0;
    while (flat >= params[t]->size()) flat -= params[t++]->size();
    picks.emplace_back(t, flat);
  }

  GradCheckResult out;
  for (const auto& [t, k] : picks) {
    double& x = params[t]->value.data()[k];
    const double saved = x;
    x = saved + h;
    const double up = loss();
    x = saved - h;
    const double down = loss();
    x = saved;
    const double numeric = (up - down) / (2.0 * h);
    const double analytic = params[t]->grad.data()[k];
    const double err = relative_error(analytic, numeric);
    ++out.checked;
    if (!(err <= tol)) ++out.failed;
    if (!(err <= out.max_rel_error)) {
      out.max_rel_error = err;
      std::ostringstream s;
      s << "tensor " << t << " coord " << k << ": analytic " << analytic << " numeric " << numeric;
      out.worst = s.str();
    }
  }
  return out;
}

}  // namespace diffcps::testing
