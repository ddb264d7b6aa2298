#include "khs/operator.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "khs/timeweights.hpp"

namespace khs {

SurfaceFrame make_surface_frame(double radius, int node_count, int band_limit) {
  if (!(radius > 0.0))
    throw std::invalid_argument("sphere radius must be positive");
  return SurfaceFrame{radius, lebedev_rule(node_count), BandLimit(band_limit)};
}

AzimuthalCoefficients azimuthal_coefficients(const RotatedFrame& frame, double psi, const AzimuthGrid& grid,
                                             BandLimit band) {
  if (grid.size() < 2 * band.n_max + 1)
    throw std::invalid_argument("azimuth grid of " + std::to_string(grid.size()) + " nodes aliases band limit " +
                                std::to_string(band.n_max) + "; need at least " +
                                std::to_string(2 * band.n_max + 1));
  AzimuthalCoefficients out;
  out.q = Eigen::VectorXd::Zero(band.size());
  out.q_cos = Eigen::VectorXd::Zero(band.size());
  out.q_sin = Eigen::VectorXd::Zero(band.size());
  Eigen::VectorXd b(band.size());
  std::vector<double> scratch;
  for (double gamma : grid.gamma) {
    const SphericalAngles ang = surface_point_in_original(frame, psi, gamma);
    b.setZero();
    accumulate_eval_vector(band, ang.theta, ang.phi, 1.0, b, scratch);
    out.q += b;
    out.q_cos += std::cos(gamma) * b;
    out.q_sin += std::sin(gamma) * b;
  }
  const double h = grid.weight();
  out.q *= h;
  out.q_cos *= h;
  out.q_sin *= h;
  return out;
}

AzimuthalVectors azimuthal_vectors(const RotatedFrame& frame, double psi, const AzimuthGrid& grid,
                                   const AnalysisMatrix& A) {
  const AzimuthalCoefficients coeff = azimuthal_coefficients(frame, psi, grid, A.band);
  const auto At = A.entries.transpose();
  return AzimuthalVectors{At * coeff.q, At * coeff.q_cos, At * coeff.q_sin};
}

KernelMatrices kernel_matrices(const FieldPoint& fp, const RotatedFrame& frame, double a, const ElevationRule& elev,
                               double dt, double c, int order, bool with_normal) {
  if (fp.rho < a)
    throw std::invalid_argument("interior problem not implemented: field point inside the sphere");
  if (!(fp.rho > a))
    throw std::invalid_argument("on-surface evaluation (rho = a) is not supported");
  if (with_normal && order < 2)
    throw std::invalid_argument("normal derivative needs stencil order K >= 2");
  if (with_normal && !fp.normal)
    throw std::invalid_argument("normal derivative requested but the field point has no normal");
  if (!(c > 0.0))
    throw std::invalid_argument("sound speed must be positive");

  const int npsi = elev.size();
  std::vector<GeometricFactors> geo(npsi);
  std::vector<DelayBinning> bins(npsi);
  for (int i = 0; i < npsi; ++i) {
    geo[i] = geometric_factors(fp, frame, elev.psi[i], a);
    bins[i] = bin_delay(geo[i].R, c, dt);
  }
  // window from the distance range rho - a .. rho + a, so its shape does not depend on the rule
  const std::int64_t nmin = bin_delay(fp.rho - a, c, dt).n;
  const std::int64_t nmax = bin_delay(fp.rho + a, c, dt).n;

  KernelMatrices km;
  km.base_delay = nmin;
  km.order = order;
  km.with_normal = with_normal;
  const Eigen::Index rows = nmax - nmin + order + 1;
  km.W = Eigen::MatrixXd::Zero(rows, npsi);
  km.V = Eigen::MatrixXd::Zero(rows, npsi);
  if (with_normal) {
    for (auto* m : {&km.Wb0, &km.WbC, &km.WbS, &km.Vb0, &km.VbC, &km.VbS})
      *m = Eigen::MatrixXd::Zero(rows, npsi);
  }

  for (int i = 0; i < npsi; ++i) {
    const GeometricFactors& g = geo[i];
    const StencilWeights sw = advanced_time_weights(order, bins[i].delta, dt);
    km.delay_floor.push_back(bins[i].n);
    const double R = g.R, R2 = R * R, R3 = R2 * R;
    const double cpsi = std::cos(g.psi), spsi = std::sin(g.psi);
    const Eigen::Vector3d& n = g.normal_rotated;
    for (int k = 0; k <= order; ++k) {
      const Eigen::Index r = bins[i].n - nmin + k;
      const double w = sw.w[k], dw = sw.dw[k], d2w = sw.d2w[k];
      km.W(r, i) = g.f0 * dw / (R * c) + g.f0 * w / R2;
      km.V(r, i) = -w / R;
      if (!with_normal)
        continue;
      // retarded-time derivative orders of the normal-derivative kernel
      const double second = d2w / (R * c * c);
      const double near = dw / (R2 * c) + w / R3;
      const double dn = dw / (R * c) + w / R2;
      km.Wb0(r, i) = g.f0 * g.f3 * second + (n.z() * cpsi + 3.0 * g.f0 * g.f3) * near;
      km.WbC(r, i) = g.f0 * g.f1 * second + (n.x() * spsi + 3.0 * g.f0 * g.f1) * near;
      km.WbS(r, i) = g.f0 * g.f2 * second + (n.y() * spsi + 3.0 * g.f0 * g.f2) * near;
      km.Vb0(r, i) = -g.f3 * dn;
      km.VbC(r, i) = -g.f1 * dn;
      km.VbS(r, i) = -g.f2 * dn;
    }
  }
  return km;
}

ElevationRule delay_aligned_elevation(double rho, double a, double dt, double c, int nodes_per_bin, int min_nodes) {
  if (!(rho > a) || !(a > 0.0))
    throw std::invalid_argument("delay-aligned elevation rule needs rho > a > 0");
  if (!(dt > 0.0) || !(c > 0.0))
    throw std::invalid_argument("time step and sound speed must be positive");
  if (nodes_per_bin < 1)
    throw std::invalid_argument("nodes per delay bin must be at least 1");
  const double h = c * dt;
  const double r_lo = rho - a, r_hi = rho + a;
  // psi at which R(psi) = r, from R^2 = (rho - a)^2 + 4 rho a sin^2(psi / 2)
  auto psi_at = [&](double r) {
    const double lower = (r * r - r_lo * r_lo) / (4.0 * rho * a);
    if (lower <= 0.5)
      return 2.0 * std::asin(std::sqrt(std::max(lower, 0.0)));
    const double upper = (r_hi * r_hi - r * r) / (4.0 * rho * a);
    return std::numbers::pi - 2.0 * std::asin(std::sqrt(std::max(upper, 0.0)));
  };
  std::vector<double> edges{0.0};
  for (double j = std::floor(r_lo / h) + 1.0; j * h < r_hi; j += 1.0) {
    const double psi = psi_at(j * h);
    if (psi > edges.back())
      edges.push_back(psi);
  }
  edges.push_back(std::numbers::pi);
  const int panels = static_cast<int>(edges.size()) - 1;
  const int per_panel = std::max(nodes_per_bin, (min_nodes + panels - 1) / panels);
  std::vector<double> x, w;
  gauss_legendre(per_panel, x, w);
  ElevationRule rule;
  rule.psi.reserve(static_cast<std::size_t>(panels) * per_panel);
  rule.weight.reserve(rule.psi.capacity());
  for (int p = 0; p < panels; ++p) {
    const double mid = 0.5 * (edges[p] + edges[p + 1]), half = 0.5 * (edges[p + 1] - edges[p]);
    for (int k = 0; k < per_panel; ++k) {
      rule.psi.push_back(mid + half * x[k]);
      rule.weight.push_back(half * w[k]);
    }
  }
  return rule;
}

PropagationOperator assemble(const FieldPoint& fp, const SurfaceFrame& surface, const ElevationRule& elev,
                             const AzimuthGrid& grid, const AnalysisMatrix& A, double dt, double c, int order,
                             double gauge) {
  if (A.node_count != surface.node_count() || A.band.n_max != surface.band.n_max)
    throw std::invalid_argument("analysis matrix does not match the surface frame");
  const bool with_normal = fp.normal.has_value();
  const RotatedFrame frame = rotated_frame(fp, gauge);
  const KernelMatrices km = kernel_matrices(fp, frame, surface.radius, elev, dt, c, order, with_normal);

  const int npsi = elev.size();
  const int ncoef = A.band.size();
  Eigen::MatrixXd B0(ncoef, npsi), BC, BS;
  if (with_normal) {
    BC.resize(ncoef, npsi);
    BS.resize(ncoef, npsi);
  }
  const double a = surface.radius;
  Eigen::VectorXd measure(npsi);
  for (int i = 0; i < npsi; ++i) {
    const AzimuthalCoefficients qc = azimuthal_coefficients(frame, elev.psi[i], grid, A.band);
    B0.col(i) = qc.q;
    if (with_normal) {
      BC.col(i) = qc.q_cos;
      BS.col(i) = qc.q_sin;
    }
    measure[i] = a * a / (4.0 * std::numbers::pi) * elev.weight[i] * std::sin(elev.psi[i]);
  }
  PropagationOperator op;
  op.base_delay = km.base_delay;
  op.dt = dt;
  op.c = c;
  op.order = order;
  op.radius = a;
  op.field_point = fp;
  // S = W diag(measure) B^T A, exploiting the K + 1 nonzeros per kernel column
  const Eigen::Index rows = km.rows();
  auto coefficient_rows = [&](const Eigen::MatrixXd& kernel, const Eigen::MatrixXd& B, Eigen::MatrixXd& acc) {
    if (acc.size() == 0)
      acc = Eigen::MatrixXd::Zero(rows, ncoef);
    for (int i = 0; i < npsi; ++i) {
      const Eigen::Index r0 = km.delay_floor[i] - km.base_delay;
      for (int k = 0; k <= order; ++k)
        acc.row(r0 + k) += (kernel(r0 + k, i) * measure[i]) * B.col(i).transpose();
    }
  };
  Eigen::MatrixXd CW, CV;
  coefficient_rows(km.W, B0, CW);
  coefficient_rows(km.V, B0, CV);
  op.S.noalias() = CW * A.entries;
  op.S_N.noalias() = CV * A.entries;
  if (with_normal) {
    Eigen::MatrixXd CWb, CVb;
    coefficient_rows(km.Wb0, B0, CWb);
    coefficient_rows(km.WbC, BC, CWb);
    coefficient_rows(km.WbS, BS, CWb);
    coefficient_rows(km.Vb0, B0, CVb);
    coefficient_rows(km.VbC, BC, CVb);
    coefficient_rows(km.VbS, BS, CVb);
    op.Sb.noalias() = CWb * A.entries;
    op.Sb_N.noalias() = CVb * A.entries;
  }
  return op;
}

PropagationOperator assemble(const FieldPoint& fp, const SurfaceFrame& surface, const ElevationRule& elev,
                             const AnalysisMatrix& A, double dt, double c, int order, double gauge) {
  if (A.node_count != surface.node_count() || A.band.n_max != surface.band.n_max)
    throw std::invalid_argument("analysis matrix does not match the surface frame");
  const bool with_normal = fp.normal.has_value();
  const RotatedFrame frame = rotated_frame(fp, gauge);
  const KernelMatrices km = kernel_matrices(fp, frame, surface.radius, elev, dt, c, order, with_normal);
  const int npsi = elev.size();
  const int nmax = A.band.n_max;
  const int ncoef = A.band.size();
  const double a = surface.radius;
  const double two_pi = 2.0 * std::numbers::pi;

  // harmonics and their gradients at the field direction, folded into A by degree
  std::vector<int> degree(ncoef);
  for (int n = 0; n <= nmax; ++n)
    for (int m = 0; m <= n; ++m) {
      degree[BandLimit::cos_row(n, m)] = n;
      degree[BandLimit::sin_row(n, m)] = n;
    }
  auto fold = [&](const Eigen::VectorXd& weights) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(nmax + 1, A.node_count);
    for (int r = 0; r < ncoef; ++r)
      if (weights[r] != 0.0)
        out.row(degree[r]) += weights[r] * A.entries.row(r);
    return out;
  };
  const Eigen::VectorXd y0 = eval_vector(A.band, fp.theta, fp.phi);
  const Eigen::MatrixXd F0 = fold(y0);
  Eigen::MatrixXd FC, FS;
  if (with_normal) {
    const HarmonicGradient g = eval_gradient(A.band, fp.theta, fp.phi, frame.to_original.col(0),
                                             frame.to_original.col(1));
    FC = fold(g.along_first);
    FS = fold(g.along_second);
  }

  // kernel rows against the zonal profiles of each degree
  std::vector<double> mean, first;
  Eigen::MatrixXd P0(npsi, nmax + 1), P1(npsi, nmax + 1);
  for (int i = 0; i < npsi; ++i) {
    zonal_profiles(nmax, elev.psi[i], mean, first);
    const double measure = a * a / (4.0 * std::numbers::pi) * elev.weight[i] * std::sin(elev.psi[i]);
    for (int n = 0; n <= nmax; ++n) {
      P0(i, n) = measure * two_pi * mean[n];
      P1(i, n) = n > 0 ? measure * two_pi * first[n] / (n * (n + 1.0)) : 0.0;
    }
  }
  PropagationOperator op;
  op.base_delay = km.base_delay;
  op.dt = dt;
  op.c = c;
  op.order = order;
  op.radius = a;
  op.field_point = fp;
  op.S.noalias() = (km.W * P0) * F0;
  op.S_N.noalias() = (km.V * P0) * F0;
  if (with_normal) {
    op.Sb.noalias() = (km.Wb0 * P0) * F0;
    op.Sb.noalias() += (km.WbC * P1) * FC;
    op.Sb.noalias() += (km.WbS * P1) * FS;
    op.Sb_N.noalias() = (km.Vb0 * P0) * F0;
    op.Sb_N.noalias() += (km.VbC * P1) * FC;
    op.Sb_N.noalias() += (km.VbS * P1) * FS;
  }
  return op;
}

PropagationOperator assemble(const FieldPoint& fp, const SurfaceFrame& surface, const AnalysisMatrix& A, double dt,
                             double c, int order, const AssemblyOptions& options) {
  const int ns = surface.band.n_max;
  const int base = options.elevation_nodes > 0 ? options.elevation_nodes : default_elevation_nodes(ns);
  const ElevationRule elev =
      options.scheme == ElevationScheme::Gauss
          ? gauss_legendre_elevation(base)
          : delay_aligned_elevation(fp.rho, surface.radius, dt, c,
                                    options.nodes_per_bin > 0 ? options.nodes_per_bin : default_nodes_per_bin(order), base);
  if (options.azimuth == AzimuthScheme::Closed)
    return assemble(fp, surface, elev, A, dt, c, order, options.gauge);
  const AzimuthGrid grid = azimuth_grid(options.azimuth_nodes > 0 ? options.azimuth_nodes : default_azimuth_nodes(ns));
  return assemble(fp, surface, elev, grid, A, dt, c, order, options.gauge);
}

namespace {

constexpr char kMagic[8] = {'K', 'H', 'S', 'O', 'P', '0', '0', '1'};

static_assert(std::endian::native == std::endian::little, "operator files are written in native little-endian order");

void put_i64(std::ostream& out, std::int64_t v) { out.write(reinterpret_cast<const char*>(&v), sizeof v); }
void put_f64(std::ostream& out, double v) { out.write(reinterpret_cast<const char*>(&v), sizeof v); }

std::int64_t get_i64(std::istream& in) {
  std::int64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}
double get_f64(std::istream& in) {
  double v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}

void put_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = m;
  out.write(reinterpret_cast<const char*>(rm.data()), static_cast<std::streamsize>(rm.size() * sizeof(double)));
}

Eigen::MatrixXd get_matrix(std::istream& in, std::int64_t rows, std::int64_t cols) {
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm(rows, cols);
  in.read(reinterpret_cast<char*>(rm.data()), static_cast<std::streamsize>(rm.size() * sizeof(double)));
  return rm;
}

} // namespace

void save_operator(const PropagationOperator& op, std::ostream& out) {
  out.write(kMagic, sizeof kMagic);
  put_i64(out, op.window());
  put_i64(out, op.node_count());
  put_i64(out, op.base_delay);
  put_i64(out, op.order);
  put_i64(out, op.has_normal() ? 1 : 0);
  const Eigen::Vector3d n = op.field_point.normal.value_or(Eigen::Vector3d::Zero());
  for (double v : {op.dt, op.c, op.radius, op.field_point.rho, op.field_point.theta, op.field_point.phi, n.x(), n.y(),
                   n.z()})
    put_f64(out, v);
  put_matrix(out, op.S);
  put_matrix(out, op.S_N);
  if (op.has_normal()) {
    put_matrix(out, op.Sb);
    put_matrix(out, op.Sb_N);
  }
  if (!out)
    throw std::runtime_error("failed writing propagation operator");
}

void save_operator(const PropagationOperator& op, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot open " + path + " for writing");
  save_operator(op, out);
}

PropagationOperator load_operator(std::istream& in) {
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
    throw std::runtime_error("not a propagation operator file (bad magic)");
  const std::int64_t rows = get_i64(in), cols = get_i64(in);
  PropagationOperator op;
  op.base_delay = get_i64(in);
  op.order = static_cast<int>(get_i64(in));
  const bool normal = get_i64(in) != 0;
  op.dt = get_f64(in);
  op.c = get_f64(in);
  op.radius = get_f64(in);
  op.field_point.rho = get_f64(in);
  op.field_point.theta = get_f64(in);
  op.field_point.phi = get_f64(in);
  Eigen::Vector3d n;
  n.x() = get_f64(in);
  n.y() = get_f64(in);
  n.z() = get_f64(in);
  if (!in || rows <= 0 || cols <= 0 || rows > (1 << 26) || cols > (1 << 20))
    throw std::runtime_error("corrupt propagation operator header");
  if (normal)
    op.field_point.normal = n;
  op.S = get_matrix(in, rows, cols);
  op.S_N = get_matrix(in, rows, cols);
  if (normal) {
    op.Sb = get_matrix(in, rows, cols);
    op.Sb_N = get_matrix(in, rows, cols);
  }
  if (!in)
    throw std::runtime_error("truncated propagation operator file");
  return op;
}

PropagationOperator load_operator(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot open " + path);
  return load_operator(in);
}

} // namespace khs
