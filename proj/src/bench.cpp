#include "khs/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "khs/oracle.hpp"
#include "khs/propagate.hpp"

namespace khs {

namespace {

using Clock = std::chrono::steady_clock;

template <class F>
double median_seconds(int repeats, int warmups, F&& body) {
  for (int i = 0; i < warmups; ++i)
    body();
  std::vector<double> t;
  for (int i = 0; i < repeats; ++i) {
    const auto start = Clock::now();
    body();
    t.push_back(std::chrono::duration<double>(Clock::now() - start).count());
  }
  std::sort(t.begin(), t.end());
  const std::size_t n = t.size();
  return n % 2 ? t[n / 2] : 0.5 * (t[n / 2 - 1] + t[n / 2]);
}

// Direct pressure at the output samples of `like` inside its valid range.
std::vector<double> direct_samples(const SourceEnsemble& ens, const Eigen::Vector3d& x, const FieldSeries& like,
                                   double c) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(like.valid_end - like.valid_begin));
  for (std::int64_t j = like.valid_begin; j < like.valid_end; ++j)
    out.push_back(direct_pressure(ens, x, like.time(j), c));
  return out;
}

FieldPoint nearby_point(const BenchConfig& cfg, int index) {
  return make_field_point(cfg.rho, cfg.theta, cfg.phi + 0.1 * index);
}

} // namespace

std::optional<double> compute_breakeven(double t_p, double t_s, double t_d) {
  if (!(t_d > t_s))
    return std::nullopt;
  return t_p / (t_d - t_s);
}

BenchReport breakeven(const BenchConfig& cfg) {
  if (cfg.sources < 1)
    throw std::invalid_argument("break-even run needs at least one source");
  if (cfg.repeats < 1 || cfg.warmups < 0)
    throw std::invalid_argument("repeats must be >= 1 and warmups >= 0");
  if (cfg.steps < 1)
    throw std::invalid_argument("need at least one time step");

  BenchReport rep;
  rep.config = cfg;
  rep.rng = kRngAlgorithm;
  const double ns1 = cfg.band_limit + 1.0;
  rep.storage_tensor = 3.0 * ns1 * ns1 / 2.0;
  rep.storage_lebedev = 2.0 * ns1 * ns1 / 3.0;
  rep.cost_tensor = 3.0 * std::pow(ns1, 4) / 4.0;
  rep.cost_lebedev = 2.0 * std::pow(ns1, 4) / 9.0;

  const SourceEnsemble ens = random_ensemble(cfg.sources, cfg.seed, 0.0, cfg.ramp_fraction * cfg.steps * cfg.dt);
  const SurfaceFrame frame = make_surface_frame(cfg.radius, cfg.node_count, cfg.band_limit);
  const FieldPoint fp = make_field_point(cfg.rho, cfg.theta, cfg.phi);

  // pre-processing: everything shared by all field points
  std::vector<SurfaceSnapshot> snaps;
  AnalysisMatrix A;
  rep.t_p = median_seconds(cfg.repeats, cfg.warmups, [&] {
    snaps = surface_data(ens, frame, cfg.steps, cfg.dt, cfg.c);
    A = build_analysis_matrix(frame.rule, frame.band, OrderCheck::Relaxed);
  });

  FieldSeries surface;
  rep.t_s = median_seconds(cfg.repeats, cfg.warmups, [&] {
    const PropagationOperator op = assemble(fp, frame, A, cfg.dt, cfg.c, cfg.order);
    surface = run(op, snaps, false);
    rep.window = op.window();
  });
  rep.valid_samples = surface.valid_end - surface.valid_begin;
  if (rep.valid_samples <= 0)
    throw std::invalid_argument("record too short: no output sample receives every contribution");
  rep.elevation_nodes = delay_aligned_elevation(cfg.rho, cfg.radius, cfg.dt, cfg.c, default_nodes_per_bin(cfg.order),
                                                default_elevation_nodes(cfg.band_limit))
                            .size();

  std::vector<double> direct;
  const Eigen::Vector3d x = fp.position();
  rep.t_d = median_seconds(cfg.repeats, cfg.warmups, [&] { direct = direct_samples(ens, x, surface, cfg.c); });

  double num = 0.0, den = 0.0;
  for (std::size_t q = 0; q < direct.size(); ++q) {
    num = std::max(num, std::abs(direct[q] - surface.p[surface.valid_begin + static_cast<std::int64_t>(q)]));
    den = std::max(den, std::abs(direct[q]));
  }
  rep.error = den > 0.0 ? num / den : 0.0;
  rep.n_f = compute_breakeven(rep.t_p, rep.t_s, rep.t_d);

  if (cfg.parallel_points > 1) {
    const int P = cfg.parallel_points;
    auto parallel = [&](auto&& work) {
      return median_seconds(cfg.repeats, cfg.warmups, [&] {
               std::vector<std::thread> pool;
               for (int k = 0; k < P; ++k)
                 pool.emplace_back([&, k] { work(k); });
               for (auto& t : pool)
                 t.join();
             }) /
             P;
    };
    rep.t_s_parallel = parallel([&](int k) {
      const PropagationOperator op = assemble(nearby_point(cfg, k), frame, A, cfg.dt, cfg.c, cfg.order);
      (void)run(op, snaps, false);
    });
    rep.t_d_parallel =
        parallel([&](int k) { (void)direct_samples(ens, nearby_point(cfg, k).position(), surface, cfg.c); });
  }
  return rep;
}

void write_bench_csv_header(std::ostream& out) {
  out << "n_s,N_Q,N_S,K,n_t,dt,seed,rng,N_W,N_psi,valid_samples,t_p,t_s,t_d,n_f,n_f_over_N_Q,error,"
         "parallel_points,t_s_parallel,t_d_parallel,storage_tensor,storage_lebedev,cost_tensor,cost_lebedev\n";
}

void write_bench_csv_row(const BenchReport& r, std::ostream& out) {
  const auto old = out.precision(17);
  const BenchConfig& c = r.config;
  out << c.sources << ',' << c.node_count << ',' << c.band_limit << ',' << c.order << ',' << c.steps << ',' << c.dt
      << ',' << c.seed << ',' << r.rng << ',' << r.window << ',' << r.elevation_nodes << ',' << r.valid_samples << ','
      << r.t_p << ',' << r.t_s << ',' << r.t_d << ',';
  if (r.n_f)
    out << *r.n_f << ',' << *r.n_f / c.node_count;
  else
    out << "no break-even,";
  out << ',' << r.error << ',' << c.parallel_points << ',' << r.t_s_parallel << ',' << r.t_d_parallel << ','
      << r.storage_tensor << ',' << r.storage_lebedev << ',' << r.cost_tensor << ',' << r.cost_lebedev << '\n';
  out.precision(old);
}

} // namespace khs
