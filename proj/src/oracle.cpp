#include "khs/oracle.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace khs {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

SignalValue eval_one(const GaussianCosine& s, double t) {
  const double u = t - s.t0;
  const double g = std::exp(-s.alpha * u * u);
  const double c = std::cos(s.omega * t), sn = std::sin(s.omega * t);
  const double dg = -2.0 * s.alpha * u * g;
  const double d2g = (4.0 * s.alpha * s.alpha * u * u - 2.0 * s.alpha) * g;
  // product rule on g(t) cos(omega t)
  return {g * c, dg * c - s.omega * g * sn, d2g * c - 2.0 * s.omega * dg * sn - s.omega * s.omega * g * c};
}

SignalValue eval_one(const RampedCosine& s, double t) {
  const double c = std::cos(s.omega * t), sn = std::sin(s.omega * t);
  if (s.ramp_length <= 0.0)
    return {c, -s.omega * sn, -s.omega * s.omega * c};
  const double x = (t - s.ramp_start) / s.ramp_length;
  if (x <= 0.0)
    return {};
  double r = 1.0, dr = 0.0, d2r = 0.0;
  if (x < 1.0) {
    // r(x) = x^4 (35 - 84 x + 70 x^2 - 20 x^3)
    const double x2 = x * x, x3 = x2 * x, y = 1.0 - x;
    r = x2 * x2 * (35.0 - 84.0 * x + 70.0 * x2 - 20.0 * x3);
    dr = 140.0 * x3 * y * y * y / s.ramp_length;
    d2r = 420.0 * x2 * y * y * (1.0 - 2.0 * x) / (s.ramp_length * s.ramp_length);
  }
  return {r * c, dr * c - s.omega * r * sn, d2r * c - 2.0 * s.omega * dr * sn - s.omega * s.omega * r * c};
}

double value_only(const Signal& s, double t) {
  if (const auto* rc = std::get_if<RampedCosine>(&s)) {
    if (rc->ramp_length <= 0.0)
      return std::cos(rc->omega * t);
    const double x = (t - rc->ramp_start) / rc->ramp_length;
    if (x <= 0.0)
      return 0.0;
    if (x >= 1.0)
      return std::cos(rc->omega * t);
    const double x2 = x * x;
    return x2 * x2 * (35.0 - 84.0 * x + 70.0 * x2 - 20.0 * x2 * x) * std::cos(rc->omega * t);
  }
  return evaluate(s, t).q;
}

double monopole_distance(const Eigen::Vector3d& x, const Eigen::Vector3d& y) {
  const double R = (x - y).norm();
  if (R == 0.0)
    throw std::invalid_argument("field point coincides with a source");
  return R;
}

} // namespace

SignalValue evaluate(const Signal& s, double t) {
  return std::visit([t](const auto& sig) { return eval_one(sig, t); }, s);
}

FieldValue direct_field(const SourceEnsemble& ensemble, const Eigen::Vector3d& x, double t, double c,
                        const std::optional<Eigen::Vector3d>& normal) {
  FieldValue out;
  for (const auto& src : ensemble.sources) {
    const Eigen::Vector3d r = x - src.position;
    const double R = monopole_distance(x, src.position);
    const SignalValue q = evaluate(src.signal, t - R / c);
    out.p += q.q / (kFourPi * R);
    if (normal) {
      // grad of q(t - R/c) / (4 pi R) is r_hat (-q'/(4 pi R c) - q/(4 pi R^2))
      const double rn = r.dot(*normal) / R;
      out.dpdn += rn * (-q.dq / (kFourPi * R * c) - q.q / (kFourPi * R * R));
    }
  }
  return out;
}

double direct_pressure(const SourceEnsemble& ensemble, const Eigen::Vector3d& x, double t, double c) {
  double p = 0.0;
  for (const auto& src : ensemble.sources) {
    const double R = monopole_distance(x, src.position);
    p += value_only(src.signal, t - R / c) / (kFourPi * R);
  }
  return p;
}

std::vector<SurfaceSnapshot> surface_data(const SourceEnsemble& ensemble, const SurfaceFrame& frame, int steps,
                                          double dt, double c, double t_start) {
  const double a = frame.radius;
  for (const auto& src : ensemble.sources)
    if (!(src.position.norm() < a))
      throw std::invalid_argument("source on or outside the surface: |y| = " + std::to_string(src.position.norm()) +
                                  ", a = " + std::to_string(a));
  const int nq = frame.node_count();
  std::vector<Eigen::Vector3d> node(nq);
  for (int i = 0; i < nq; ++i)
    node[i] = a * Eigen::Vector3d(frame.rule.x[i], frame.rule.y[i], frame.rule.z[i]);

  std::vector<SurfaceSnapshot> out(static_cast<std::size_t>(steps));
  for (int s = 0; s < steps; ++s) {
    out[s].step = s;
    out[s].p = Eigen::VectorXd::Zero(nq);
    out[s].dpdn = Eigen::VectorXd::Zero(nq);
  }
  for (const auto& src : ensemble.sources) {
    for (int i = 0; i < nq; ++i) {
      const Eigen::Vector3d r = node[i] - src.position;
      const double R = r.norm();
      const double rn = r.dot(node[i]) / (R * a);
      for (int s = 0; s < steps; ++s) {
        const SignalValue q = evaluate(src.signal, t_start + s * dt - R / c);
        out[s].p[i] += q.q / (kFourPi * R);
        out[s].dpdn[i] += rn * (-q.dq / (kFourPi * R * c) - q.q / (kFourPi * R * R));
      }
    }
  }
  return out;
}

FieldSeries direct_series(const SourceEnsemble& ensemble, const FieldPoint& fp, const FieldSeries& like, double c) {
  FieldSeries out(like.dt, like.first_step, like.size(), like.has_normal(), like.time_origin);
  out.valid_begin = like.valid_begin;
  out.valid_end = like.valid_end;
  const Eigen::Vector3d x = fp.position();
  for (std::size_t j = 0; j < out.size(); ++j) {
    const FieldValue v = direct_field(ensemble, x, out.time(static_cast<std::int64_t>(j)), c,
                                      like.has_normal() ? fp.normal : std::nullopt);
    out.p[j] = v.p;
    if (like.has_normal())
      out.dpdn[j] = v.dpdn;
  }
  return out;
}

SourceEnsemble single_source_ensemble() {
  SourceEnsemble e;
  e.sources.push_back(PointSource{kEnsembleRadius * Eigen::Vector3d(1.0, -1.0, 1.0) / std::sqrt(3.0),
                                  GaussianCosine{0.5, 2.0, 10.0}});
  return e;
}

SourceEnsemble random_ensemble(int count, std::uint64_t seed, double ramp_start, double ramp_length) {
  if (count < 1)
    throw std::invalid_argument("ensemble needs at least one source");
  std::mt19937_64 gen(seed);
  // explicit 53-bit conversion keeps draws identical across standard libraries
  auto uniform = [&gen]() { return static_cast<double>(gen() >> 11) * 0x1.0p-53; };
  SourceEnsemble e;
  e.seed = seed;
  e.sources.reserve(count);
  while (static_cast<int>(e.sources.size()) < count) {
    const Eigen::Vector3d u(2.0 * uniform() - 1.0, 2.0 * uniform() - 1.0, 2.0 * uniform() - 1.0);
    if (u.squaredNorm() > 1.0)
      continue;
    const double omega = 9.0 + 2.0 * uniform();
    e.sources.push_back(PointSource{kEnsembleRadius * u, RampedCosine{omega, ramp_start, ramp_length}});
  }
  return e;
}

void write_ensemble_csv(const SourceEnsemble& ensemble, std::ostream& out) {
  const auto old = out.precision(17);
  out << "x,y,z,omega\n";
  for (const auto& s : ensemble.sources) {
    const auto* rc = std::get_if<RampedCosine>(&s.signal);
    if (!rc)
      throw std::invalid_argument("only cosine sources can be written as x,y,z,omega");
    out << s.position.x() << ',' << s.position.y() << ',' << s.position.z() << ',' << rc->omega << '\n';
  }
  out.precision(old);
}

SourceEnsemble read_ensemble_csv(std::istream& in, double ramp_start, double ramp_length) {
  SourceEnsemble e;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#' || line.rfind("x,", 0) == 0)
      continue;
    std::istringstream ss(line);
    double v[4];
    char comma;
    for (int k = 0; k < 4; ++k) {
      if (!(ss >> v[k]) || (k < 3 && !(ss >> comma && comma == ',')))
        throw std::runtime_error("ensemble CSV line " + std::to_string(lineno) + ", column " +
                                 std::to_string(k + 1) + ": malformed value");
    }
    e.sources.push_back(PointSource{Eigen::Vector3d(v[0], v[1], v[2]), RampedCosine{v[3], ramp_start, ramp_length}});
  }
  return e;
}

} // namespace khs
