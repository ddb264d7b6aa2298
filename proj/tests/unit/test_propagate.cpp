#include <doctest.h>

#include <cmath>
#include <sstream>

#include "khs/experiments.hpp"
#include "khs/oracle.hpp"
#include "khs/propagate.hpp"

using namespace khs;

namespace {

struct Setup {
  SurfaceFrame frame = make_surface_frame(1.0, 110, 8);
  AnalysisMatrix A = build_analysis_matrix(frame.rule, frame.band);
  FieldPoint fp = make_field_point(2.0, 1.0, 2.0, Eigen::Vector3d(12, 15, 16) / 25.0);
  double dt = 4.0 / 128;
  PropagationOperator op = assemble(fp, frame, A, dt, 1.0, 6);
  std::vector<SurfaceSnapshot> record = surface_data(single_source_ensemble(), frame, 129, dt, 1.0);
};

const Setup& setup() {
  static const Setup s;
  return s;
}

SurfaceSnapshot scaled(const SurfaceSnapshot& s, double k, std::int64_t shift = 0) {
  return {s.step + shift, k * s.p, k * s.dpdn};
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

} // namespace

TEST_SUITE("propagate") {

TEST_CASE("zero snapshot leaves the series unchanged") {
  const Setup& s = setup();
  FieldSeries series(s.dt, s.op.base_delay, 40 + s.op.window(), true);
  step(s.op, s.record[10], series);
  const FieldSeries before = series;
  step(s.op, scaled(s.record[12], 0.0), series);
  CHECK(series.p == before.p);
  CHECK(series.dpdn == before.dpdn);
}

TEST_CASE("snapshot order does not matter") {
  const Setup& s = setup();
  FieldSeries a(s.dt, s.op.base_delay, 40 + s.op.window(), true), b = a;
  step(s.op, s.record[3], a);
  step(s.op, s.record[20], a);
  step(s.op, s.record[20], b);
  step(s.op, s.record[3], b);
  CHECK(max_abs_diff(a.p, b.p) < 1e-15);
  CHECK(max_abs_diff(a.dpdn, b.dpdn) < 1e-15);
}

TEST_CASE("step checks dimensions and window") {
  const Setup& s = setup();
  FieldSeries series(s.dt, s.op.base_delay, 10 + s.op.window(), true);
  SurfaceSnapshot small{0, Eigen::VectorXd::Zero(50), Eigen::VectorXd::Zero(50)};
  CHECK_THROWS_AS(step(s.op, small, series), std::invalid_argument);
  CHECK_THROWS_AS(step(s.op, s.record[11], series), std::out_of_range);
  CHECK_NOTHROW(step(s.op, s.record[10], series));
  const PropagationOperator bare = assemble(make_field_point(2.0, 1.0, 2.0), s.frame, s.A, s.dt, 1.0, 6);
  CHECK_THROWS_AS(step(bare, s.record[0], series), std::invalid_argument);
}

TEST_CASE("empty stream gives a zero series of window length") {
  const Setup& s = setup();
  const FieldSeries e = run(s.op, {}, true);
  CHECK(e.size() == static_cast<std::size_t>(s.op.window()));
  for (std::size_t j = 0; j < e.size(); ++j) {
    CHECK(e.p[j] == 0.0);
    CHECK(e.dpdn[j] == 0.0);
  }
  CHECK(e.valid_end == e.valid_begin);
}

TEST_CASE("run matches stepwise folding, sizes the buffer and marks the valid range") {
  const Setup& s = setup();
  const FieldSeries r = run(s.op, s.record, true);
  const std::int64_t nt = static_cast<std::int64_t>(s.record.size());
  CHECK(r.size() == static_cast<std::size_t>(nt + s.op.window()));
  CHECK(r.first_step == s.op.base_delay);
  CHECK(r.valid_begin == s.op.window() - 1);
  CHECK(r.valid_end == nt);
  CHECK(r.time(0) == doctest::Approx(s.op.base_delay * s.dt));
  FieldSeries manual(s.dt, s.op.base_delay, r.size(), true);
  for (const auto& snap : s.record)
    step(s.op, snap, manual);
  const double scale = *std::max_element(r.p.begin(), r.p.end());
  CHECK(max_abs_diff(r.p, manual.p) < 1e-14 * scale);
  CHECK(max_abs_diff(r.dpdn, manual.dpdn) < 1e-13 * scale);
}

TEST_CASE("gaps in the stream are rejected") {
  const Setup& s = setup();
  std::vector<SurfaceSnapshot> gap{s.record[0], s.record[2]};
  CHECK_THROWS_AS(run(s.op, gap, true), std::invalid_argument);
}

TEST_CASE("linearity and time invariance") {
  const Setup& s = setup();
  std::vector<SurfaceSnapshot> twice, shifted, other, sum;
  for (const auto& snap : s.record) {
    twice.push_back(scaled(snap, 2.0));
    shifted.push_back(scaled(snap, 1.0, 7));
    other.push_back({snap.step, snap.p.reverse(), snap.dpdn.reverse()});
    sum.push_back({snap.step, snap.p + other.back().p, snap.dpdn + other.back().dpdn});
  }
  const FieldSeries base = run(s.op, s.record, true);
  const FieldSeries dbl = run(s.op, twice, true);
  for (std::size_t j = 0; j < base.size(); ++j) {
    CHECK(dbl.p[j] == 2.0 * base.p[j]);
    CHECK(dbl.dpdn[j] == 2.0 * base.dpdn[j]);
  }
  const FieldSeries sh = run(s.op, shifted, true);
  CHECK(sh.first_step == base.first_step + 7);
  CHECK(sh.p == base.p);
  CHECK(sh.dpdn == base.dpdn);
  const FieldSeries o = run(s.op, other, true), su = run(s.op, sum, true);
  std::vector<double> added(base.size());
  for (std::size_t j = 0; j < base.size(); ++j)
    added[j] = base.p[j] + o.p[j];
  CHECK(max_abs_diff(added, su.p) < 1e-14);
}

TEST_CASE("no sample before the minimum travel time receives a contribution") {
  const Setup& s = setup();
  std::vector<SurfaceSnapshot> pulse;
  for (int i = 0; i < 60; ++i)
    pulse.push_back(scaled(s.record[50], i == 30 ? 1.0 : 0.0, i - 50));
  const FieldSeries r = run(s.op, pulse, true);
  const std::int64_t earliest = 30 + static_cast<std::int64_t>(std::floor(1.0 / s.dt));
  bool any_after = false;
  for (std::size_t j = 0; j < r.size(); ++j) {
    const std::int64_t step_abs = r.first_step + static_cast<std::int64_t>(j);
    if (step_abs < earliest) {
      CHECK(r.p[j] == 0.0);
      CHECK(r.dpdn[j] == 0.0);
    } else if (r.p[j] != 0.0)
      any_after = true;
  }
  CHECK(any_after);
}

TEST_CASE("field points do not interfere") {
  const Setup& s = setup();
  const PropagationOperator far = assemble(make_field_point(5.0, 2.0, 0.5), s.frame, s.A, s.dt, 1.0, 6);
  const FieldSeries alone = run(s.op, s.record, true);
  const FieldSeries other = run(far, s.record, false);
  const FieldSeries again = run(s.op, s.record, true);
  CHECK(alone.p == again.p);
  CHECK(other.first_step != alone.first_step);
}

TEST_CASE("ring buffer streaming reproduces the batch run") {
  const Setup& s = setup();
  const FieldSeries batch = run(s.op, s.record, true);
  std::vector<std::int64_t> steps;
  std::vector<double> p, pn;
  StreamingAccumulator acc(s.op, true, [&](std::int64_t st, double v, double vn) {
    steps.push_back(st);
    p.push_back(v);
    pn.push_back(vn);
  });
  CHECK(acc.capacity() == static_cast<std::size_t>(s.op.window() + s.op.order));
  for (const auto& snap : s.record)
    acc.push(snap);
  acc.flush();
  // the batch buffer carries one trailing sample that no snapshot reaches
  REQUIRE(steps.size() + 1 == batch.size());
  CHECK(batch.p.back() == 0.0);
  const double scale = *std::max_element(batch.p.begin(), batch.p.end());
  for (std::size_t j = 0; j < steps.size(); ++j) {
    CHECK(steps[j] == batch.first_step + static_cast<std::int64_t>(j));
    CHECK(std::abs(p[j] - batch.p[j]) < 1e-14 * scale);
    CHECK(std::abs(pn[j] - batch.dpdn[j]) < 1e-13 * scale);
  }
  StreamingAccumulator gap(s.op, false, [](std::int64_t, double, double) {});
  gap.push(s.record[0]);
  CHECK_THROWS_AS(gap.push(s.record[2]), std::invalid_argument);
}

TEST_CASE("error metric examples") {
  FieldSeries ref(0.1, 5, 20, true);
  for (std::size_t j = 0; j < 20; ++j) {
    ref.p[j] = std::sin(0.3 * j) + 0.1;
    ref.dpdn[j] = std::cos(0.2 * j);
  }
  CHECK(error_metric(ref, ref) == 0.0);
  CHECK(error_metric(ref, ref, true) == 0.0);
  FieldSeries scaled_series = ref;
  for (auto& v : scaled_series.p)
    v *= 1.01;
  CHECK(error_metric(ref, scaled_series) == doctest::Approx(0.01).epsilon(1e-12));
  FieldSeries zero(0.1, 5, 20, false);
  CHECK_THROWS_AS(error_metric(zero, ref), std::invalid_argument);
  FieldSeries other_dt(0.2, 5, 20, false);
  CHECK_THROWS_AS(error_metric(ref, other_dt), std::invalid_argument);
  CHECK_THROWS_AS(error_metric(ref, zero, true), std::invalid_argument);
}

TEST_CASE("error metric only uses the common valid range") {
  FieldSeries ref(0.1, 0, 10, false), got(0.1, 2, 10, false);
  for (int j = 0; j < 10; ++j) {
    ref.p[j] = 1.0;
    got.p[j] = 1.0;
  }
  got.p[9] = 100.0; // outside the valid range
  got.valid_end = 8;
  ref.p[0] = 50.0; // before the computed series starts
  CHECK(error_metric(ref, got) == 0.0);
}

TEST_CASE("snapshot CSV round trip is exact") {
  const Setup& s = setup();
  std::stringstream buf;
  write_snapshots_csv(std::span(s.record).subspan(0, 3), buf);
  const auto back = read_snapshots_csv(buf, 110);
  REQUIRE(back.size() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(back[i].step == i);
    CHECK(back[i].p == s.record[i].p);
    CHECK(back[i].dpdn == s.record[i].dpdn);
  }
}

TEST_CASE("malformed snapshot CSV reports line and column") {
  auto message = [](const std::string& text, int nq) {
    std::istringstream in(text);
    try {
      read_snapshots_csv(in, nq);
    } catch (const std::exception& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message("step,node,p,dpdn\n0,0,1,x\n", 1).find("line 2, column 4") != std::string::npos);
  CHECK(message("0,0,1\n", 1).find("line 1, column 4") != std::string::npos);
  CHECK(message("0,0,1,2,3\n", 1).find("line 1, column 5") != std::string::npos);
  CHECK(message("0,0,1,2\n2,0,1,2\n", 1).find("expected step 1") != std::string::npos);
  const std::string short_step = message("0,0,1,2\n0,1,1,2\n1,0,1,2\n", 3);
  CHECK(short_step.find("line 3") != std::string::npos);
  CHECK(short_step.find("expected 3") != std::string::npos);
  CHECK(message("0,0,1,2\n0,1,1,2\n0,2,1,2\n", 2).find("expected 2") != std::string::npos);
  CHECK(message("0,0,1,2\n", 2).find("expected 2") != std::string::npos);
}

TEST_CASE("series CSV has a header and full precision") {
  FieldSeries s(0.25, 4, 2, false);
  s.p = {1.0 / 3.0, 2.0};
  std::ostringstream out;
  write_series_csv(s, out);
  CHECK(out.str() == "t,p,dpdn\n1,0.33333333333333331,0\n1.25,2,0\n");
}

TEST_CASE("fine single-source run reaches the accuracy floor") {
  SingleSourceSetup cfg;
  cfg.node_count = 1454;
  const SingleSourceResult r = run_single_source(cfg, 8, 4096);
  CHECK(r.error_p < 1e-9);
}

}
