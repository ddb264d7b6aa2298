#include "khs/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "khs/bench.hpp"
#include "khs/experiments.hpp"

namespace khs {

namespace {

struct Options {
  std::string out_path;
  double a = 1.0;
  double rho = 2.0;
  double theta = 1.0;
  double phi = 2.0;
  std::vector<double> normal{0.48, 0.6, 0.64};
  bool no_normal = false;
  int band = 32;
  int nq = 974;
  int npsi = 0;
  std::string psi_scheme = "aligned";
  int nodes_per_bin = 0;
  int ngamma = 0;
  std::string azimuth = "closed";
  int order = 8;
  std::vector<int> orders{4, 6, 8};
  int nt = 1024;
  int nt_min = 64;
  int nt_max = 1024;
  double dt = 0.0;
  double c = 1.0;
  double duration = 4.0;
  std::uint64_t seed = 1;
  std::vector<int> band_list{8, 12, 16, 20, 24, 28, 32};
  std::vector<int> radius_bands{8, 12, 16, 20, 24, 32};
  std::vector<double> rho_list{1.5, 2.0, 3.0, 4.0, 6.0, 8.0};
  std::vector<int> sources{4340, 8680};
  int repeats = 5;
  int warmups = 1;
  int parallel = 0;
  std::string snapshots;
  std::string write_snapshots;
  bool valid_only = false;
  std::string save_op;
  std::string load_op;
};

AssemblyOptions assembly_options(const Options& o) {
  AssemblyOptions a;
  a.scheme = o.psi_scheme == "gauss" ? ElevationScheme::Gauss : ElevationScheme::DelayAligned;
  a.elevation_nodes = o.npsi;
  a.nodes_per_bin = o.nodes_per_bin;
  a.azimuth = o.azimuth == "trapezoid" ? AzimuthScheme::Trapezoid : AzimuthScheme::Closed;
  a.azimuth_nodes = o.ngamma;
  return a;
}

std::optional<Eigen::Vector3d> field_normal(const Options& o) {
  if (o.no_normal)
    return std::nullopt;
  return Eigen::Vector3d(o.normal[0], o.normal[1], o.normal[2]);
}

SingleSourceSetup single_source_setup(const Options& o) {
  SingleSourceSetup s;
  s.radius = o.a;
  s.rho = o.rho;
  s.theta = o.theta;
  s.phi = o.phi;
  s.normal = field_normal(o);
  s.band_limit = o.band;
  s.node_count = o.nq;
  s.c = o.c;
  s.duration = o.duration;
  s.assembly = assembly_options(o);
  return s;
}

std::vector<int> octaves(int lo, int hi) {
  if (lo < 1 || hi < lo)
    throw std::invalid_argument("invalid sweep bounds: need 1 <= nt-min <= nt-max");
  std::vector<int> v;
  for (long long n = lo; n <= hi; n *= 2)
    v.push_back(static_cast<int>(n));
  return v;
}

void cmd_convergence(const Options& o, std::ostream& out) {
  const SingleSourceSetup s = single_source_setup(o);
  const std::vector<int> steps = octaves(o.nt_min, o.nt_max);
  const auto rows = convergence_sweep(s, o.orders, steps);
  out << "n_t,K,eps_p,eps_pn\n";
  for (const auto& r : rows)
    out << r.steps << ',' << r.order << ',' << r.error_p << ',' << r.error_dpdn << '\n';
  if (steps.size() < 2)
    return;
  out << "\nK,slope_p,slope_pn\n";
  for (int K : o.orders) {
    std::vector<double> x, yp, yn;
    for (const auto& r : rows)
      if (r.order == K) {
        x.push_back(r.steps);
        yp.push_back(r.error_p);
        yn.push_back(r.error_dpdn);
      }
    out << K << ',' << loglog_slope(x, yp) << ',';
    if (s.normal)
      out << loglog_slope(x, yn);
    out << '\n';
  }
}

void cmd_nsph(const Options& o, std::ostream& out) {
  const auto rows = band_sweep(single_source_setup(o), o.band_list, o.order, o.nt);
  out << "N_S,N_Q,eps_p,eps_pn\n";
  for (const auto& r : rows)
    out << r.band_limit << ',' << r.node_count << ',' << r.error_p << ',' << r.error_dpdn << '\n';
}

void cmd_radius(const Options& o, std::ostream& out) {
  const auto rows = radius_sweep(single_source_setup(o), o.radius_bands, o.rho_list, o.order, o.nt);
  out << "N_S,N_Q,rho,eps_p\n";
  for (const auto& r : rows)
    out << r.band_limit << ',' << r.node_count << ',' << r.rho << ',' << r.error_p << '\n';
}

void cmd_breakeven(const Options& o, std::ostream& out) {
  write_bench_csv_header(out);
  for (int n : o.sources) {
    BenchConfig cfg;
    cfg.sources = n;
    cfg.node_count = o.nq;
    cfg.band_limit = o.band;
    cfg.order = o.order;
    cfg.steps = o.nt;
    cfg.dt = o.dt > 0.0 ? o.dt : 1.0 / 16.0;
    cfg.c = o.c;
    cfg.radius = o.a;
    cfg.rho = o.rho;
    cfg.theta = o.theta;
    cfg.phi = o.phi;
    cfg.seed = o.seed;
    cfg.repeats = o.repeats;
    cfg.warmups = o.warmups;
    cfg.parallel_points = o.parallel;
    write_bench_csv_row(breakeven(cfg), out);
  }
}

void cmd_propagate(const Options& o, std::ostream& out) {
  const int nq = o.nq > 0 ? o.nq : lebedev_size_for_band(o.band);
  const SurfaceFrame frame = make_surface_frame(o.a, nq, o.band);
  PropagationOperator op;
  if (!o.load_op.empty()) {
    op = load_operator(o.load_op);
    if (op.node_count() != nq)
      throw std::invalid_argument("operator in " + o.load_op + " has " + std::to_string(op.node_count()) +
                                  " nodes; expected " + std::to_string(nq));
  } else {
    const double dt = o.dt > 0.0 ? o.dt : o.duration / o.nt;
    const AnalysisMatrix A = build_analysis_matrix(frame.rule, frame.band, OrderCheck::Relaxed);
    const FieldPoint fp = make_field_point(o.rho, o.theta, o.phi, field_normal(o));
    op = assemble(fp, frame, A, dt, o.c, o.order, assembly_options(o));
  }
  if (!o.save_op.empty())
    save_operator(op, o.save_op);

  std::vector<SurfaceSnapshot> snaps;
  if (!o.snapshots.empty()) {
    std::ifstream in(o.snapshots);
    if (!in)
      throw std::runtime_error("cannot open snapshot file " + o.snapshots);
    snaps = read_snapshots_csv(in, nq);
  } else {
    const int steps = static_cast<int>(std::lround(o.duration / op.dt)) + 1;
    snaps = surface_data(single_source_ensemble(), frame, steps, op.dt, op.c);
  }
  if (!o.write_snapshots.empty()) {
    std::ofstream f(o.write_snapshots);
    if (!f)
      throw std::runtime_error("cannot open " + o.write_snapshots + " for writing");
    write_snapshots_csv(snaps, f);
  }
  const FieldSeries series = run(op, snaps, op.has_normal());
  write_series_csv(series, out, o.valid_only);
}

void cmd_dump_rule(const Options& o, std::ostream& out) {
  const LebedevRule r = lebedev_rule(o.nq);
  out << "# order=" << r.order << '\n' << "theta,phi,weight\n";
  for (int i = 0; i < r.size(); ++i)
    out << r.theta[i] << ',' << r.phi[i] << ',' << r.weight[i] << '\n';
}

void echo_config(const CLI::App& app, const std::string& command, std::ostream& out) {
  out << "# khsphere " << command << '\n';
  std::istringstream lines(app.config_to_str(true, false));
  std::string line;
  while (std::getline(lines, line))
    if (!line.empty() && line.rfind("config", 0) != 0)
      out << "# " << line << '\n';
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exterior acoustic field from sphere surface data"};
  app.require_subcommand(1);
  app.fallthrough();
  app.option_defaults()->always_capture_default();
  app.set_config("--config", "", "key=value file; command-line flags take precedence");
  Options o;

  app.add_option("--out", o.out_path, "Write results to this file instead of stdout");
  app.add_option("--a", o.a, "Sphere radius")->check(CLI::PositiveNumber);
  app.add_option("--rho", o.rho, "Field point radius")->check(CLI::PositiveNumber);
  app.add_option("--theta", o.theta, "Field point colatitude (rad)");
  app.add_option("--phi", o.phi, "Field point azimuth (rad)");
  app.add_option("--normal", o.normal, "Unit normal at the field point, nx,ny,nz")->expected(3)->delimiter(',');
  app.add_flag("--no-normal", o.no_normal, "Pressure only, no normal derivative");
  app.add_option("--band", o.band, "Spherical-harmonic band limit N_S")->check(CLI::NonNegativeNumber);
  app.add_option("--nq", o.nq, "Lebedev node count N_Q (0: smallest rule of order >= 2 N_S)");
  app.add_option("--npsi", o.npsi, "Elevation nodes (gauss) or minimum total (aligned); 0: 3 N_S / 2 + 4");
  app.add_option("--psi-scheme", o.psi_scheme, "Elevation rule")->check(CLI::IsMember({"aligned", "gauss"}));
  app.add_option("--nodes-per-bin", o.nodes_per_bin, "Aligned rule nodes per delay bin; 0: K / 2 + 2");
  app.add_option("--ngamma", o.ngamma, "Trapezoid azimuth nodes; 0: 2 N_S + 2");
  app.add_option("--azimuth", o.azimuth, "Azimuthal integration")->check(CLI::IsMember({"closed", "trapezoid"}));
  app.add_option("--K", o.order, "Time interpolation order")->check(CLI::Range(1, 12));
  app.add_option("--orders", o.orders, "Orders for the convergence sweep")->delimiter(',');
  app.add_option("--nt", o.nt, "Number of time steps")->check(CLI::PositiveNumber);
  app.add_option("--nt-min", o.nt_min, "Smallest n_t of the convergence sweep");
  app.add_option("--nt-max", o.nt_max, "Largest n_t of the convergence sweep");
  app.add_option("--dt", o.dt, "Time step (propagate, breakeven); 0: duration / nt or 1/16");
  app.add_option("--c", o.c, "Speed of sound")->check(CLI::PositiveNumber);
  app.add_option("--duration", o.duration, "Source record length for the single-source test")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", o.seed, "Random ensemble seed");
  app.add_option("--band-list", o.band_list, "Band limits for nsph")->delimiter(',');
  app.add_option("--radius-bands", o.radius_bands, "Band limits for radius-sweep")->delimiter(',');
  app.add_option("--rho-list", o.rho_list, "Field radii for radius-sweep")->delimiter(',');
  app.add_option("--ns", o.sources, "Source counts for breakeven")->delimiter(',');
  app.add_option("--repeats", o.repeats, "Timed repetitions (median)")->check(CLI::PositiveNumber);
  app.add_option("--warmups", o.warmups, "Discarded warm-up runs")->check(CLI::NonNegativeNumber);
  app.add_option("--parallel", o.parallel, "Also time this many field points in parallel");
  app.add_option("--snapshots", o.snapshots, "Surface data CSV (step,node,p,dpdn); default: single-source oracle");
  app.add_option("--write-snapshots", o.write_snapshots, "Write the surface data used to this CSV");
  app.add_flag("--valid-only", o.valid_only, "Only write samples that received every contribution");
  app.add_option("--save-op", o.save_op, "Save the assembled operator");
  app.add_option("--load-op", o.load_op, "Load a saved operator instead of assembling");

  std::map<std::string, void (*)(const Options&, std::ostream&)> commands{
      {"convergence", cmd_convergence}, {"nsph", cmd_nsph},           {"radius-sweep", cmd_radius},
      {"breakeven", cmd_breakeven},     {"propagate", cmd_propagate}, {"dump-rule", cmd_dump_rule}};
  std::map<std::string, std::string> help{
      {"convergence", "Error against n_t for each K, with fitted slopes"},
      {"nsph", "Error against band limit N_S at one radius"},
      {"radius-sweep", "Error against field radius for several band limits"},
      {"breakeven", "Break-even field-point count against direct summation"},
      {"propagate", "Propagate surface data to one field point"},
      {"dump-rule", "Print a Lebedev rule"}};
  for (const auto& [name, fn] : commands)
    app.add_subcommand(name, help[name]);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (o.normal.size() != 3)
      throw std::invalid_argument("--normal needs three components");
    std::ofstream file;
    std::ostream* dest = &out;
    if (!o.out_path.empty()) {
      file.open(o.out_path);
      if (!file)
        throw std::runtime_error("cannot open " + o.out_path + " for writing");
      dest = &file;
    }
    const std::string name = app.get_subcommands().front()->get_name();
    std::ostringstream body;
    body.precision(17);
    commands.at(name)(o, body);
    echo_config(app, name, *dest);
    *dest << body.str();
    dest->flush();
    if (!*dest)
      throw std::runtime_error("failed writing output");
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

} // namespace khs
