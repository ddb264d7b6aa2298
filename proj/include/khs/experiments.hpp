#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "khs/harmonics.hpp"
#include "khs/operator.hpp"
#include "khs/oracle.hpp"
#include "khs/propagate.hpp"

namespace khs {

/// Single gaussian-cosine source inside the unit sphere, field evaluated
/// at one exterior point over the source record 0 <= tau <= duration.
struct SingleSourceSetup {
  double radius = 1.0;
  double rho = 2.0;
  double theta = 1.0;
  double phi = 2.0;
  std::optional<Eigen::Vector3d> normal = Eigen::Vector3d(12.0, 15.0, 16.0) / 25.0;
  int band_limit = 32;
  int node_count = 974; ///< 0: smallest rule with order >= 2 N_S
  double c = 1.0;
  double duration = 4.0;
  AssemblyOptions assembly;
};

struct SingleSourceResult {
  int steps = 0; ///< n_t; the record holds n_t + 1 snapshots
  int order = 0;
  int node_count = 0;
  long long window = 0;
  double error_p = 0.0;
  double error_dpdn = 0.0; ///< 0 without a normal
  FieldSeries computed;
  FieldSeries reference;
};

/// Propagates exact surface data through the operator and compares with
/// the direct retarded-time field over the valid range.
SingleSourceResult run_single_source(const SingleSourceSetup& setup, int order, int steps);

struct ConvergenceRow {
  int steps = 0;
  int order = 0;
  double error_p = 0.0;
  double error_dpdn = 0.0;
};

std::vector<ConvergenceRow> convergence_sweep(const SingleSourceSetup& setup, std::span<const int> orders,
                                              std::span<const int> steps);

/// Least-squares slope of log y against log x.
double loglog_slope(std::span<const double> x, std::span<const double> y);

struct BandRow {
  int band_limit = 0;
  int node_count = 0;
  double error_p = 0.0;
  double error_dpdn = 0.0;
};

/// One single-source run per band limit; node count from the setup, or the
/// smallest adequate rule when the setup's node_count is 0.
std::vector<BandRow> band_sweep(const SingleSourceSetup& setup, std::span<const int> band_limits, int order,
                                int steps);

struct RadiusRow {
  int band_limit = 0;
  int node_count = 0;
  double rho = 0.0;
  double error_p = 0.0;
};

std::vector<RadiusRow> radius_sweep(const SingleSourceSetup& setup, std::span<const int> band_limits,
                                    std::span<const double> radii, int order, int steps);

} // namespace khs
