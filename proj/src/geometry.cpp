#include "khs/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace khs {

Eigen::Vector3d FieldPoint::direction() const {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

Eigen::Vector3d FieldPoint::position() const { return rho * direction(); }

FieldPoint make_field_point(double rho, double theta, double phi, std::optional<Eigen::Vector3d> normal) {
  if (normal && std::abs(normal->norm() - 1.0) > 1e-12)
    throw std::invalid_argument("field-point normal must be a unit vector");
  return FieldPoint{rho, theta, phi, normal};
}

FieldPoint field_point_from_position(const Eigen::Vector3d& x, std::optional<Eigen::Vector3d> normal) {
  const double rho = x.norm();
  if (rho == 0.0)
    return make_field_point(0.0, 0.0, 0.0, normal);
  const double theta = std::acos(std::clamp(x.z() / rho, -1.0, 1.0));
  const double phi = std::atan2(x.y(), x.x());
  return make_field_point(rho, theta, phi, normal);
}

RotatedFrame rotated_frame(const FieldPoint& fp, double gauge) {
  if (!(fp.rho > 0.0))
    throw std::invalid_argument("field point at the origin has no defined direction");
  const double ct = std::cos(fp.theta), st = std::sin(fp.theta);
  const double cp = std::cos(fp.phi), sp = std::sin(fp.phi);
  const double cg = std::cos(gauge), sg = std::sin(gauge);
  Eigen::Matrix3d rz, ry, rg;
  rz << cp, sp, 0, -sp, cp, 0, 0, 0, 1; // R_z(-phi)
  ry << ct, 0, -st, 0, 1, 0, st, 0, ct; // R_y(-theta)
  rg << cg, sg, 0, -sg, cg, 0, 0, 0, 1; // R_z(-gauge)
  RotatedFrame f;
  f.to_rotated = rg * ry * rz;
  f.to_original = f.to_rotated.transpose();
  return f;
}

SphericalAngles surface_point_in_original(const RotatedFrame& frame, double psi, double gamma) {
  const Eigen::Vector3d v{std::sin(psi) * std::cos(gamma), std::sin(psi) * std::sin(gamma), std::cos(psi)};
  const Eigen::Vector3d u = frame.to_original * v;
  SphericalAngles out;
  out.theta = std::acos(std::clamp(u.z(), -1.0, 1.0));
  out.phi = std::atan2(u.y(), u.x());
  if (out.phi < 0.0)
    out.phi += 2.0 * std::numbers::pi;
  return out;
}

Eigen::Vector3d surface_position(const RotatedFrame& frame, double psi, double gamma, double a) {
  const Eigen::Vector3d v{std::sin(psi) * std::cos(gamma), std::sin(psi) * std::sin(gamma), std::cos(psi)};
  return a * (frame.to_original * v);
}

GeometricFactors geometric_factors(const FieldPoint& fp, const RotatedFrame& frame, double psi, double a) {
  const double rho = fp.rho;
  const double cpsi = std::cos(psi), spsi = std::sin(psi);
  // (rho - a)^2 + 2 rho a (1 - cos psi), cancellation-free near psi = 0
  const double R = std::sqrt((rho - a) * (rho - a) + 4.0 * rho * a * std::sin(0.5 * psi) * std::sin(0.5 * psi));
  if (!(R > 0.0))
    throw std::invalid_argument("field point on the surface: source-to-field distance vanishes");
  GeometricFactors g;
  g.psi = psi;
  g.R = R;
  g.f0 = (rho * cpsi - a) / R;
  if (fp.normal) {
    g.normal_rotated = frame.to_rotated * (*fp.normal);
    g.f1 = g.normal_rotated.x() * a * spsi / R;
    g.f2 = g.normal_rotated.y() * a * spsi / R;
    g.f3 = g.normal_rotated.z() * (a * cpsi - rho) / R;
  }
  return g;
}

} // namespace khs
