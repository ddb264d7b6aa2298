#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace khs {

struct BenchConfig {
  int sources = 1000;    ///< n_s
  int node_count = 434;  ///< N_Q
  int band_limit = 32;   ///< N_S
  int order = 8;         ///< K
  int steps = 128;       ///< n_t
  double dt = 1.0 / 16.0;
  double c = 1.0;
  double radius = 1.0;   ///< a
  double rho = 2.0;
  double theta = 1.0;
  double phi = 2.0;
  std::uint64_t seed = 1;
  int repeats = 5;
  int warmups = 1;
  double ramp_fraction = 0.05; ///< source onset ramp length as a fraction of the record
  int parallel_points = 0; ///< > 1: also time this many field points on as many threads
};

struct BenchReport {
  BenchConfig config;
  double t_p = 0.0; ///< surface data generation plus analysis matrix (s)
  double t_s = 0.0; ///< operator assembly plus propagation, one field point (s)
  double t_d = 0.0; ///< direct summation over the same output samples (s)
  std::optional<double> n_f;
  double error = 0.0; ///< relative max error of the surface path at this field point
  long long window = 0;
  int elevation_nodes = 0;
  long long valid_samples = 0;
  double t_s_parallel = 0.0; ///< wall time per field point with parallel_points threads
  double t_d_parallel = 0.0;
  // storage per time step and multiply cost per step, previous tensor-product method vs Lebedev
  double storage_tensor = 0.0;
  double storage_lebedev = 0.0;
  double cost_tensor = 0.0;
  double cost_lebedev = 0.0;
  std::string rng;
};

/// t_p / (t_d - t_s), or nothing when the surface path is not cheaper.
std::optional<double> compute_breakeven(double t_p, double t_s, double t_d);

/// Times both evaluation paths on one random ensemble. Each timing is the
/// median of `repeats` runs after `warmups` discarded runs, single-threaded.
BenchReport breakeven(const BenchConfig& config);

void write_bench_csv_header(std::ostream& out);
void write_bench_csv_row(const BenchReport& report, std::ostream& out);

} // namespace khs
