#include "khs/experiments.hpp"

#include <cmath>
#include <stdexcept>

namespace khs {

namespace {

int resolve_nodes(const SingleSourceSetup& s) {
  return s.node_count > 0 ? s.node_count : lebedev_size_for_band(s.band_limit);
}

} // namespace

SingleSourceResult run_single_source(const SingleSourceSetup& setup, int order, int steps) {
  if (steps < 1)
    throw std::invalid_argument("need at least one time step");
  const int nq = resolve_nodes(setup);
  const SurfaceFrame frame = make_surface_frame(setup.radius, nq, setup.band_limit);
  const AnalysisMatrix A = build_analysis_matrix(frame.rule, frame.band, OrderCheck::Relaxed);
  const FieldPoint fp = make_field_point(setup.rho, setup.theta, setup.phi, setup.normal);
  const double dt = setup.duration / steps;
  const PropagationOperator op = assemble(fp, frame, A, dt, setup.c, order, setup.assembly);
  const SourceEnsemble ens = single_source_ensemble();
  const std::vector<SurfaceSnapshot> snaps = surface_data(ens, frame, steps + 1, dt, setup.c);

  SingleSourceResult r;
  r.steps = steps;
  r.order = order;
  r.node_count = nq;
  r.window = op.window();
  r.computed = run(op, snaps, fp.normal.has_value());
  r.reference = direct_series(ens, fp, r.computed, setup.c);
  r.error_p = error_metric(r.reference, r.computed, false);
  if (fp.normal)
    r.error_dpdn = error_metric(r.reference, r.computed, true);
  return r;
}

std::vector<ConvergenceRow> convergence_sweep(const SingleSourceSetup& setup, std::span<const int> orders,
                                              std::span<const int> steps) {
  if (orders.empty() || steps.empty())
    throw std::invalid_argument("convergence sweep needs at least one order and one step count");
  std::vector<ConvergenceRow> rows;
  for (int K : orders)
    for (int nt : steps) {
      const SingleSourceResult r = run_single_source(setup, K, nt);
      rows.push_back({nt, K, r.error_p, r.error_dpdn});
    }
  return rows;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("slope fit needs at least two matching points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0))
      throw std::invalid_argument("slope fit needs positive values");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0)
    throw std::invalid_argument("slope fit needs distinct abscissae");
  return (n * sxy - sx * sy) / den;
}

std::vector<BandRow> band_sweep(const SingleSourceSetup& setup, std::span<const int> band_limits, int order,
                                int steps) {
  std::vector<BandRow> rows;
  for (int ns : band_limits) {
    SingleSourceSetup s = setup;
    s.band_limit = ns;
    const SingleSourceResult r = run_single_source(s, order, steps);
    rows.push_back({ns, r.node_count, r.error_p, r.error_dpdn});
  }
  return rows;
}

std::vector<RadiusRow> radius_sweep(const SingleSourceSetup& setup, std::span<const int> band_limits,
                                    std::span<const double> radii, int order, int steps) {
  std::vector<RadiusRow> rows;
  for (int ns : band_limits)
    for (double rho : radii) {
      SingleSourceSetup s = setup;
      s.band_limit = ns;
      s.rho = rho;
      s.normal.reset();
      const SingleSourceResult r = run_single_source(s, order, steps);
      rows.push_back({ns, r.node_count, rho, r.error_p});
    }
  return rows;
}

} // namespace khs
