#pragma once

#include <cstdint>
#include <vector>

namespace khs {

/// Lagrange weights for a K+1 point stencil at fractional offset delta.
struct StencilWeights {
  int order = 0; ///< K
  double delta = 0.0;
  std::vector<double> w;   ///< interpolation
  std::vector<double> dw;  ///< first derivative
  std::vector<double> d2w; ///< second derivative
};

/// Maximum stencil order. Orders above 8 are usable but increasingly
/// exposed to Runge-type amplification on equispaced nodes.
inline constexpr int kMaxStencilOrder = 12;

/// Weights of the polynomial through the integer nodes {0, .., K},
/// evaluated at x = delta. Derivatives are with respect to x.
StencilWeights lagrange_weights(int order, double delta);

/// Stencil weights in advanced-time (scatter) order: entry k multiplies
/// the source sample that lands k steps after the delay floor. Computed on
/// the forward-time nodes {1-K, .., 1} at x = 1 - delta with the order
/// reversed, so dw and d2w are derivatives with respect to source time,
/// scaled by 1/dt and 1/dt^2.
StencilWeights advanced_time_weights(int order, double delta, double dt);

/// Barycentric weights 1 / prod_{k != j} (x_j - x_k) for arbitrary nodes.
std::vector<double> barycentric_weights(const std::vector<double>& nodes);

/// Weights, first and second derivative weights at x for arbitrary nodes.
StencilWeights lagrange_weights_at(const std::vector<double>& nodes, double x);

/// R / c = (n + delta) dt with 0 <= delta < 1.
struct DelayBinning {
  double distance = 0.0;
  double speed = 0.0;
  double dt = 0.0;
  std::int64_t n = 0;
  double delta = 0.0;
};

DelayBinning bin_delay(double distance, double speed, double dt);

class FieldSeries;

/// Increment samples i + n + k, k = 0..K, of the pressure record by
/// w_k * amplitude. Indices are absolute output steps.
void scatter_increment(FieldSeries& series, std::int64_t step, const DelayBinning& binning,
                       const StencilWeights& weights, double amplitude);

} // namespace khs
