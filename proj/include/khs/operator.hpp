#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "khs/geometry.hpp"
#include "khs/harmonics.hpp"
#include "khs/quadrature.hpp"

namespace khs {

/// The discretised source surface: sphere radius, node set and band limit.
struct SurfaceFrame {
  double radius = 1.0;
  LebedevRule rule;
  BandLimit band{0};

  int node_count() const { return rule.size(); }
};

SurfaceFrame make_surface_frame(double radius, int node_count, int band_limit);

/// Nodal weight vectors for the azimuthal integrals at one elevation:
/// q.f, q_C.f, q_S.f approximate the integrals of f, f cos(gamma),
/// f sin(gamma) over gamma at fixed psi.
struct AzimuthalVectors {
  Eigen::VectorXd q, q_cos, q_sin;
};

/// Same integrals in coefficient space (before mapping through A^T).
struct AzimuthalCoefficients {
  Eigen::VectorXd q, q_cos, q_sin;
};

AzimuthalCoefficients azimuthal_coefficients(const RotatedFrame& frame, double psi, const AzimuthGrid& grid,
                                             BandLimit band);

/// Throws when grid.size() < 2 N_S + 1.
AzimuthalVectors azimuthal_vectors(const RotatedFrame& frame, double psi, const AzimuthGrid& grid,
                                   const AnalysisMatrix& A);

/// Advanced-time kernels, one column per elevation node. Column i is
/// nonzero only in rows N_i - N_1 .. N_i - N_1 + K.
struct KernelMatrices {
  Eigen::MatrixXd W, V;                  ///< pressure: from p and from dp/dn
  Eigen::MatrixXd Wb0, WbC, WbS;         ///< normal derivative from p
  Eigen::MatrixXd Vb0, VbC, VbS;         ///< normal derivative from dp/dn
  std::int64_t base_delay = 0;           ///< N_1
  std::vector<std::int64_t> delay_floor; ///< N_i per elevation node
  int order = 0;
  bool with_normal = false;

  Eigen::Index rows() const { return W.rows(); }
};

/// Throws for rho <= a (interior and on-surface evaluation are not
/// supported) and for K < 2 when the normal derivative is requested.
KernelMatrices kernel_matrices(const FieldPoint& fp, const RotatedFrame& frame, double a, const ElevationRule& elev,
                               double dt, double c, int order, bool with_normal);

/// Per-field-point matrices mapping one snapshot of surface data to the
/// increments of the received record over N_W consecutive samples.
struct PropagationOperator {
  Eigen::MatrixXd S, S_N;   ///< pressure from p, from dp/dn
  Eigen::MatrixXd Sb, Sb_N; ///< normal derivative (empty without a normal)
  std::int64_t base_delay = 0;
  double dt = 0.0;
  double c = 0.0;
  int order = 0;
  double radius = 0.0;
  FieldPoint field_point;

  Eigen::Index window() const { return S.rows(); }
  Eigen::Index node_count() const { return S.cols(); }
  bool has_normal() const { return Sb.size() > 0; }
};

/// Default Gauss-Legendre length in psi: 3 N_S / 2 + 4. Shorter rules
/// leave the psi integral under-resolved at rho = 2a.
inline int default_elevation_nodes(int band_limit) { return 3 * band_limit / 2 + 4; }
inline int default_azimuth_nodes(int band_limit) { return 2 * band_limit + 2; }

/// Elevation rule used by the convenience assembler.
enum class ElevationScheme {
  /// Composite Gauss-Legendre with panel edges where R(psi) / (c dt) is an
  /// integer, so each panel lies inside one delay bin.
  DelayAligned,
  /// Single Gauss-Legendre rule over [0, pi].
  Gauss,
};

/// Panel length exact for the degree-K stencil polynomials times a
/// smooth remainder.
inline int default_nodes_per_bin(int order) { return order / 2 + 2; }

/// Delay-aligned rule with nodes_per_bin nodes per panel, raised so the
/// total is at least min_nodes.
ElevationRule delay_aligned_elevation(double rho, double a, double dt, double c, int nodes_per_bin, int min_nodes);

enum class AzimuthScheme {
  Closed,    ///< addition-theorem form, exact for band-limited data
  Trapezoid, ///< explicit N_gamma-point trapezoidal sums
};

struct AssemblyOptions {
  ElevationScheme scheme = ElevationScheme::DelayAligned;
  AzimuthScheme azimuth = AzimuthScheme::Closed;
  int elevation_nodes = 0; ///< Gauss length, or DelayAligned minimum; 0: default_elevation_nodes(N_S)
  int nodes_per_bin = 0;   ///< DelayAligned only; 0: default_nodes_per_bin(K)
  int azimuth_nodes = 0;   ///< Trapezoid only; 0: default_azimuth_nodes(N_S)
  double gauge = 0.0;
};

PropagationOperator assemble(const FieldPoint& fp, const SurfaceFrame& surface, const ElevationRule& elev,
                             const AzimuthGrid& grid, const AnalysisMatrix& A, double dt, double c, int order,
                             double gauge = 0.0);

/// Same operator with the azimuthal integrals in closed form: for data of
/// band limit N_S the trapezoidal sums are exact, and by the addition
/// theorem they reduce to zonal profiles in psi times the harmonics and
/// their gradients at the field direction. Cost no longer grows with N_gamma.
PropagationOperator assemble(const FieldPoint& fp, const SurfaceFrame& surface, const ElevationRule& elev,
                             const AnalysisMatrix& A, double dt, double c, int order, double gauge = 0.0);

/// Convenience wrapper building the default elevation and azimuth rules.
PropagationOperator assemble(const FieldPoint& fp, const SurfaceFrame& surface, const AnalysisMatrix& A, double dt,
                             double c, int order, const AssemblyOptions& options = {});

/// Flat little-endian layout: magic "KHSOP001", int64 N_W, N_Q, base delay,
/// order, has-normal flag; float64 dt, c, a, rho, theta, phi, n_x, n_y, n_z;
/// then S, S_N and (if present) Sb, Sb_N, each row-major float64.
void save_operator(const PropagationOperator& op, std::ostream& out);
void save_operator(const PropagationOperator& op, const std::string& path);
PropagationOperator load_operator(std::istream& in);
PropagationOperator load_operator(const std::string& path);

} // namespace khs
