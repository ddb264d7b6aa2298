#include "khs/timeweights.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "khs/propagate.hpp"

namespace khs {

std::vector<double> barycentric_weights(const std::vector<double>& nodes) {
  const std::size_t n = nodes.size();
  std::vector<double> lambda(n, 1.0);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k)
      if (k != j)
        lambda[j] /= nodes[j] - nodes[k];
  return lambda;
}

StencilWeights lagrange_weights_at(const std::vector<double>& nodes, double x) {
  const std::size_t n = nodes.size();
  if (n == 0)
    throw std::invalid_argument("stencil needs at least one node");
  const std::vector<double> lambda = barycentric_weights(nodes);
  StencilWeights sw;
  sw.order = static_cast<int>(n) - 1;
  sw.delta = x;
  sw.w.resize(n);
  sw.dw.resize(n);
  sw.d2w.resize(n);
  // l_j(x) = lambda_j prod_{k != j} (x - x_k); the product and its first two
  // derivatives accumulate factor by factor, so nothing divides by x - x_k
  for (std::size_t j = 0; j < n; ++j) {
    double v = 1.0, d1 = 0.0, d2 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (k == j)
        continue;
      const double u = x - nodes[k];
      d2 = d2 * u + 2.0 * d1;
      d1 = d1 * u + v;
      v *= u;
    }
    sw.w[j] = lambda[j] * v;
    sw.dw[j] = lambda[j] * d1;
    sw.d2w[j] = lambda[j] * d2;
  }
  return sw;
}

namespace {

void check_stencil(int order, double delta) {
  if (order < 1 || order > kMaxStencilOrder)
    throw std::invalid_argument("stencil order must lie in [1, " + std::to_string(kMaxStencilOrder) + "]");
  if (!(delta >= 0.0 && delta < 1.0))
    throw std::invalid_argument("stencil offset must lie in [0, 1)");
}

} // namespace

StencilWeights lagrange_weights(int order, double delta) {
  check_stencil(order, delta);
  std::vector<double> nodes(order + 1);
  for (int k = 0; k <= order; ++k)
    nodes[k] = k;
  return lagrange_weights_at(nodes, delta);
}

StencilWeights advanced_time_weights(int order, double delta, double dt) {
  check_stencil(order, delta);
  if (!(dt > 0.0))
    throw std::invalid_argument("time step must be positive");
  std::vector<double> nodes(order + 1);
  for (int k = 0; k <= order; ++k)
    nodes[k] = 1.0 - order + k;
  StencilWeights fwd = lagrange_weights_at(nodes, 1.0 - delta);
  StencilWeights sw;
  sw.order = order;
  sw.delta = delta;
  sw.w.assign(fwd.w.rbegin(), fwd.w.rend());
  sw.dw.assign(fwd.dw.rbegin(), fwd.dw.rend());
  sw.d2w.assign(fwd.d2w.rbegin(), fwd.d2w.rend());
  for (int k = 0; k <= order; ++k) {
    sw.dw[k] /= dt;
    sw.d2w[k] /= dt * dt;
  }
  return sw;
}

DelayBinning bin_delay(double distance, double speed, double dt) {
  if (!(speed > 0.0))
    throw std::invalid_argument("sound speed must be positive");
  if (!(dt > 0.0))
    throw std::invalid_argument("time step must be positive");
  if (!(distance >= 0.0))
    throw std::invalid_argument("distance must be non-negative");
  DelayBinning b;
  b.distance = distance;
  b.speed = speed;
  b.dt = dt;
  const double s = distance / (speed * dt);
  const double fl = std::floor(s);
  b.n = static_cast<std::int64_t>(fl);
  b.delta = s - fl;
  if (b.delta >= 1.0) {
    b.n += 1;
    b.delta = 0.0;
  }
  return b;
}

void scatter_increment(FieldSeries& series, std::int64_t step, const DelayBinning& binning,
                       const StencilWeights& weights, double amplitude) {
  const std::int64_t first = step + binning.n - series.first_step;
  const std::int64_t last = first + weights.order;
  if (first < 0 || last >= static_cast<std::int64_t>(series.p.size()))
    throw std::out_of_range("scatter window [" + std::to_string(first) + ", " + std::to_string(last) +
                            "] outside series of length " + std::to_string(series.p.size()));
  for (int k = 0; k <= weights.order; ++k)
    series.p[first + k] += weights.w[k] * amplitude;
}

} // namespace khs
