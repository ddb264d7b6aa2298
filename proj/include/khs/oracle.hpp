#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "khs/operator.hpp"
#include "khs/propagate.hpp"

namespace khs {

/// exp(-alpha (t - t0)^2) cos(omega t)
struct GaussianCosine {
  double alpha = 0.5;
  double t0 = 2.0;
  double omega = 10.0;
};

/// cos(omega t) switched on by a C3 polynomial ramp over
/// [ramp_start, ramp_start + ramp_length]; zero before the ramp.
struct RampedCosine {
  double omega = 10.0;
  double ramp_start = 0.0;
  double ramp_length = 0.0;
};

using Signal = std::variant<GaussianCosine, RampedCosine>;

/// Value and first two time derivatives of a source signal.
struct SignalValue {
  double q = 0.0, dq = 0.0, d2q = 0.0;
};

SignalValue evaluate(const Signal& s, double t);

struct PointSource {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Signal signal = GaussianCosine{};
};

struct SourceEnsemble {
  std::vector<PointSource> sources;
  std::uint64_t seed = 0;
};

/// Name of the generator behind random_ensemble, echoed in reports.
inline constexpr const char* kRngAlgorithm = "mt19937_64/53-bit-mantissa";

/// Pressure and (optionally) normal derivative at a point.
struct FieldValue {
  double p = 0.0;
  double dpdn = 0.0;
};

/// Sum of q_k(t - R_k/c) / (4 pi R_k). Throws when x coincides with a source.
FieldValue direct_field(const SourceEnsemble& ensemble, const Eigen::Vector3d& x, double t, double c,
                        const std::optional<Eigen::Vector3d>& normal = std::nullopt);

/// Direct pressure only, the inner loop timed by the break-even harness.
double direct_pressure(const SourceEnsemble& ensemble, const Eigen::Vector3d& x, double t, double c);

/// Exact p and outward dp/dn at every node for steps 0..steps-1, source
/// time t = t_start + i dt. Throws unless every source is strictly inside.
std::vector<SurfaceSnapshot> surface_data(const SourceEnsemble& ensemble, const SurfaceFrame& frame, int steps,
                                          double dt, double c, double t_start = 0.0);

/// Exact record at a field point sampled on the time base of `like`,
/// with the same valid range.
FieldSeries direct_series(const SourceEnsemble& ensemble, const FieldPoint& fp, const FieldSeries& like, double c);

/// Source of the single-source convergence test: gaussian-cosine pulse
/// (alpha = 1/2, t0 = 2, omega = 10) at 0.7 (1, -1, 1) / sqrt(3).
SourceEnsemble single_source_ensemble();

/// n_s cosines with omega_k uniform in [9, 11] at positions uniform in the
/// ball of radius 0.7, all ramped on identically over [ramp_start,
/// ramp_start + ramp_length].
SourceEnsemble random_ensemble(int count, std::uint64_t seed, double ramp_start = 0.0, double ramp_length = 0.0);

inline constexpr double kEnsembleRadius = 0.7;

/// CSV with columns x,y,z,omega (cosine sources only).
void write_ensemble_csv(const SourceEnsemble& ensemble, std::ostream& out);
SourceEnsemble read_ensemble_csv(std::istream& in, double ramp_start = 0.0, double ramp_length = 0.0);

} // namespace khs
