#pragma once

#include <vector>

#include "khs/harmonics.hpp"
#include "khs/oracle.hpp"
#include "khs/propagate.hpp"

namespace khs::testing {

/// Finite-difference weights for derivatives 0..2 at x on arbitrary nodes (Fornberg's recursion).
void fornberg_weights(const std::vector<double>& nodes, double x, std::vector<double>& w0, std::vector<double>& w1,
                      std::vector<double>& w2);

struct ReferenceOptions {
  int theta_nodes = 64;       ///< Gauss-Legendre nodes in cos(theta)
  int phi_nodes = 128;        ///< trapezoid nodes in phi
  double fine_dt = 1.0 / 256; ///< time step of the independently sampled surface record
  int stencil_points = 12;    ///< centred time-interpolation stencil width
};

/// Slow reference for the exterior field: direct quadrature of the surface integral over a
/// latitude-longitude grid in the original frame, with surface values from the band-limited
/// interpolant of A and retarded-time values from a centred high-order stencil on a fine record.
/// Computes the samples in the valid range of `like` and copies its time base.
FieldSeries dense_reference(const SourceEnsemble& ensemble, const SurfaceFrame& frame, const AnalysisMatrix& A,
                            const FieldPoint& fp, const FieldSeries& like, double c,
                            const ReferenceOptions& options = {});

} // namespace khs::testing
