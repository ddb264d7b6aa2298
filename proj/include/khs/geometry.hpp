#pragma once

#include <optional>

#include <Eigen/Dense>

namespace khs {

/// Evaluation point in spherical coordinates about the sphere centre, with
/// an optional unit normal (original frame) for normal-derivative output.
struct FieldPoint {
  double rho = 0.0;
  double theta = 0.0;
  double phi = 0.0;
  std::optional<Eigen::Vector3d> normal;

  Eigen::Vector3d position() const;
  Eigen::Vector3d direction() const;
};

/// Throws unless |normal| = 1 to 1e-12.
FieldPoint make_field_point(double rho, double theta, double phi,
                            std::optional<Eigen::Vector3d> normal = std::nullopt);

FieldPoint field_point_from_position(const Eigen::Vector3d& x,
                                     std::optional<Eigen::Vector3d> normal = std::nullopt);

/// Frame whose polar axis points at the field point.
struct RotatedFrame {
  Eigen::Matrix3d to_rotated;  ///< original -> rotated
  Eigen::Matrix3d to_original; ///< rotated -> original
};

/// R_y(-theta) R_z(-phi), optionally followed by a rotation of `gauge`
/// about the new polar axis (moves the gamma = 0 meridian).
RotatedFrame rotated_frame(const FieldPoint& fp, double gauge = 0.0);

struct SphericalAngles {
  double theta = 0.0;
  double phi = 0.0;
};

/// Original-frame angles of the surface point at rotated-frame (psi, gamma).
SphericalAngles surface_point_in_original(const RotatedFrame& frame, double psi, double gamma);

/// Original-frame position of the surface point at (psi, gamma) on radius a.
Eigen::Vector3d surface_position(const RotatedFrame& frame, double psi, double gamma, double a);

struct GeometricFactors {
  double psi = 0.0;
  double R = 0.0;
  double f0 = 0.0; ///< (rho cos psi - a) / R
  double f1 = 0.0; ///< n_x a sin psi / R
  double f2 = 0.0; ///< n_y a sin psi / R
  double f3 = 0.0; ///< n_z (a cos psi - rho) / R
  Eigen::Vector3d normal_rotated = Eigen::Vector3d::Zero();
};

/// Distance and direction-cosine factors at elevation psi. f1..f3 are zero
/// when the field point has no normal.
GeometricFactors geometric_factors(const FieldPoint& fp, const RotatedFrame& frame, double psi, double a);

} // namespace khs
