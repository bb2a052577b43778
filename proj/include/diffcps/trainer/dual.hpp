#pragma once

namespace diffcps {

/// Lagrange multiplier for the denoising-loss constraint L_c <= kappa.
struct DualState {
  double lambda = 1.0;
  double kappa = 0.04;
  double clip = 0.0;  // floor c: lambda >= c after every update
  double lr = 3e-4;

  /// max(c, lambda), the weight applied to L_c in the actor objective.
  double weight() const { return lambda > clip ? lambda : clip; }
};

/// Gradient step on lambda * (kappa - L_c), then the clip to the floor.
DualState dual_step(DualState dual, double observed_lc);

}  // namespace diffcps
