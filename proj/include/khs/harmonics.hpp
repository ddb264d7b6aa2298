#pragma once

#include <vector>

#include <Eigen/Dense>

#include "khs/quadrature.hpp"

namespace khs {

/// Maximum spherical-harmonic degree N_S. Coefficient vectors interleave a
/// cosine and a sine slot per (n, m), m <= n, giving (N_S+1)(N_S+2) entries.
struct BandLimit {
  int n_max = 0;

  explicit BandLimit(int n);
  int size() const { return (n_max + 1) * (n_max + 2); }
  static int slot(int n, int m) { return n * (n + 1) / 2 + m; }
  static int cos_row(int n, int m) { return 2 * slot(n, m); }
  static int sin_row(int n, int m) { return 2 * slot(n, m) + 1; }
};

/// Fully normalized associated Legendre function,
/// sqrt((2n+1)/2 (n-m)!/(n+m)!) P_n^m(x), without the Condon-Shortley phase.
double legendre_normalized(int n, int m, double x);

/// All normalized functions up to degree n_max at x, stored at
/// BandLimit::slot(n, m). `out` must hold (n_max+1)(n_max+2)/2 values.
void legendre_table(int n_max, double x, double* out);

/// P_n^m(x) / sqrt(1 - x^2) for m >= 1 (slot m = 0 is zero), computed
/// without dividing by the sine so it stays finite at the poles.
void legendre_table_over_sine(int n_max, double x, double* out);

enum class OrderCheck {
  Strict,  ///< rule order must be at least 2 N_S
  Relaxed, ///< rule order must be at least N_S (experiments sweeping N_Q)
};

/// Matrix mapping nodal samples to expansion coefficients. The 1/pi factor
/// missing from the plain quadrature form of the coefficient integrals is
/// folded in, so analysis followed by synthesis is the identity on
/// band-limited data.
struct AnalysisMatrix {
  BandLimit band{0};
  int node_count = 0;
  Eigen::MatrixXd entries; ///< band.size() x node_count

  Eigen::VectorXd analyse(const Eigen::VectorXd& nodal) const { return entries * nodal; }
};

AnalysisMatrix build_analysis_matrix(const LebedevRule& rule, BandLimit band,
                                     OrderCheck check = OrderCheck::Strict);

/// Harmonics at one direction, in the AnalysisMatrix row layout.
Eigen::VectorXd eval_vector(BandLimit band, double theta, double phi);

/// Adds scale * eval_vector(band, theta, phi) into `acc`. Cheaper than
/// building the vector when only its weighted sum is needed.
void accumulate_eval_vector(BandLimit band, double theta, double phi, double scale,
                            Eigen::Ref<Eigen::VectorXd> acc, std::vector<double>& scratch);

/// Synthesised value of a coefficient vector at (theta, phi).
double synthesise(BandLimit band, const Eigen::VectorXd& coeffs, double theta, double phi);

/// Surface gradient of every harmonic at (theta, phi), projected on two
/// tangent vectors e1 and e2, in the AnalysisMatrix row layout.
struct HarmonicGradient {
  Eigen::VectorXd along_first, along_second;
};
HarmonicGradient eval_gradient(BandLimit band, double theta, double phi, const Eigen::Vector3d& e1,
                               const Eigen::Vector3d& e2);

/// Legendre P_n(cos psi) and P_n^1(cos psi) = sin(psi) P_n'(cos psi) for
/// n = 0..n_max. By the addition theorem the mean of a degree-n harmonic
/// over the circle at angular radius psi about d is P_n(cos psi) Y(d), and
/// its cos/sin(gamma) moments are P_n^1(cos psi) / (n (n + 1)) times the
/// gradient of Y at d along the circle's gamma = 0 and gamma = pi/2 axes.
void zonal_profiles(int n_max, double psi, std::vector<double>& mean, std::vector<double>& first);

/// Nodal weights b(theta, phi)^T A: dotting with nodal samples interpolates.
Eigen::VectorXd interpolation_weights(const AnalysisMatrix& A, double theta, double phi);

} // namespace khs
