#pragma once

#include <span>
#include <vector>

namespace khs {

/// Lebedev rule on the unit sphere. Weights carry the full solid-angle
/// measure, so they sum to 4*pi.
struct LebedevRule {
  int order = 0;               ///< polynomial exactness degree
  std::vector<double> theta;   ///< colatitude in [0, pi]
  std::vector<double> phi;     ///< azimuth in [0, 2 pi)
  std::vector<double> weight;
  std::vector<double> x, y, z; ///< Cartesian node positions

  int size() const { return static_cast<int>(weight.size()); }
};

/// Quadrature rule in the rotated colatitude psi on [0, pi].
struct ElevationRule {
  std::vector<double> psi;
  std::vector<double> weight;

  int size() const { return static_cast<int>(psi.size()); }
};

/// Uniform trapezoidal nodes gamma_j = 2 pi j / count, j = 0..count-1.
struct AzimuthGrid {
  std::vector<double> gamma;

  int size() const { return static_cast<int>(gamma.size()); }
  double weight() const;
};

/// Node counts of the embedded Lebedev rules, ascending. The 74-point
/// rule is omitted because it has a negative weight.
std::span<const int> lebedev_sizes();

/// Exactness degree of the embedded rule with `node_count` nodes.
int lebedev_order(int node_count);

/// Throws std::invalid_argument listing the available sizes for an
/// unknown node count.
LebedevRule lebedev_rule(int node_count);

/// Smallest embedded rule whose order is at least 2 * band_limit, so that
/// products of two harmonics of degree band_limit are integrated exactly.
int lebedev_size_for_band(int band_limit);

/// Gauss-Legendre nodes and weights on [-1, 1], ascending nodes.
void gauss_legendre(int length, std::vector<double>& nodes, std::vector<double>& weights);

ElevationRule gauss_legendre_elevation(int length);

AzimuthGrid azimuth_grid(int count);

} // namespace khs
