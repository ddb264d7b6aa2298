#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "khs/oracle.hpp"

using namespace khs;
using std::numbers::pi;

TEST_SUITE("oracle") {

TEST_CASE("Gaussian-cosine derivatives match an independent symbolic form") {
  const GaussianCosine g{0.5, 2.0, 10.0};
  for (double t = -1.0; t <= 5.0; t += 0.137) {
    const SignalValue v = evaluate(g, t);
    const double u = t - 2.0, e = std::exp(-0.5 * u * u), c = std::cos(10 * t), s = std::sin(10 * t);
    CHECK(std::abs(v.q - e * c) < 1e-13);
    CHECK(std::abs(v.dq - e * (-u * c - 10 * s)) < 1e-13);
    CHECK(std::abs(v.d2q - e * ((u * u - 1 - 100) * c + 20 * u * s)) < 1e-12);
  }
}

TEST_CASE("signal derivatives agree with central differences at second order") {
  const Signal signals[] = {GaussianCosine{}, RampedCosine{9.5, 0.2, 0.6}, RampedCosine{10.0, 0.0, 0.0}};
  for (const Signal& sig : signals)
    for (double t : {0.35, 0.5, 1.7}) {
      double prev = 0;
      for (double h : {1e-2, 5e-3, 2.5e-3}) {
        const SignalValue v = evaluate(sig, t);
        const double d1 = (evaluate(sig, t + h).q - evaluate(sig, t - h).q) / (2 * h);
        const double d2 = (evaluate(sig, t + h).dq - evaluate(sig, t - h).dq) / (2 * h);
        const double err = std::abs(d1 - v.dq) + std::abs(d2 - v.d2q);
        if (prev > 0)
          CHECK(err < 0.3 * prev);
        prev = err;
      }
    }
}

TEST_CASE("ramped cosine is zero before its onset and a plain cosine after") {
  const RampedCosine r{10.0, 1.0, 0.5};
  CHECK(evaluate(r, 0.99).q == 0.0);
  CHECK(evaluate(r, 0.99).dq == 0.0);
  CHECK(evaluate(r, 2.0).q == doctest::Approx(std::cos(20.0)).epsilon(1e-15));
}

TEST_CASE("static monopole and causality of the direct field") {
  SourceEnsemble e;
  e.sources.push_back({Eigen::Vector3d(0.1, 0.2, -0.3), RampedCosine{0.0, 0.0, 0.0}});
  const Eigen::Vector3d x(1.5, 0.3, 0.7);
  const double R = (x - e.sources[0].position).norm();
  CHECK(direct_field(e, x, 3.0, 1.0).p == doctest::Approx(1 / (4 * pi * R)).epsilon(1e-15));
  SourceEnsemble late;
  late.sources.push_back({Eigen::Vector3d::Zero(), RampedCosine{10.0, 1.0, 0.2}});
  CHECK(direct_field(late, x, 1.0 + x.norm() - 1e-9, 1.0).p == 0.0);
  CHECK(direct_pressure(late, x, 0.5, 1.0) == 0.0);
  CHECK(direct_field(late, x, 1.5 + x.norm(), 1.0).p != 0.0);
}

TEST_CASE("normal derivative agrees with central differences") {
  const SourceEnsemble e = single_source_ensemble();
  const Eigen::Vector3d x(0.4, 1.1, 1.6), n = Eigen::Vector3d(2, -1, 2) / 3.0;
  for (double t : {2.1, 3.4}) {
    const double exact = direct_field(e, x, t, 1.0, n).dpdn;
    double prev = 0;
    for (double h : {1e-2, 5e-3, 2.5e-3}) {
      const double fd =
          (direct_field(e, x + h * n, t, 1.0).p - direct_field(e, x - h * n, t, 1.0).p) / (2 * h);
      const double err = std::abs(fd - exact);
      if (prev > 0)
        CHECK(err == doctest::Approx(prev / 4).epsilon(0.1));
      prev = err;
    }
  }
}

TEST_CASE("direct field is linear in the ensemble and rejects coincident points") {
  const SourceEnsemble a = random_ensemble(3, 1), b = random_ensemble(4, 2);
  SourceEnsemble both = a;
  both.sources.insert(both.sources.end(), b.sources.begin(), b.sources.end());
  const Eigen::Vector3d x(1.2, -0.4, 0.9), n(0, 0.6, 0.8);
  const FieldValue fa = direct_field(a, x, 2.3, 1.0, n), fb = direct_field(b, x, 2.3, 1.0, n);
  const FieldValue fs = direct_field(both, x, 2.3, 1.0, n);
  CHECK(fs.p == doctest::Approx(fa.p + fb.p).epsilon(1e-14));
  CHECK(fs.dpdn == doctest::Approx(fa.dpdn + fb.dpdn).epsilon(1e-14));
  CHECK(direct_pressure(both, x, 2.3, 1.0) == doctest::Approx(fs.p).epsilon(1e-14));
  CHECK_THROWS_AS(direct_field(a, a.sources[0].position, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("surface data: centred source is uniform, off-centre source peaks at the nearest node") {
  const SurfaceFrame f = make_surface_frame(1.0, 302, 8);
  SourceEnsemble centred;
  centred.sources.push_back({Eigen::Vector3d::Zero(), GaussianCosine{}});
  const auto snaps = surface_data(centred, f, 50, 0.05, 1.0);
  for (const auto& s : snaps)
    for (int i = 1; i < f.node_count(); ++i) {
      REQUIRE(s.p[i] == doctest::Approx(s.p[0]).epsilon(1e-14));
      REQUIRE(s.dpdn[i] == doctest::Approx(s.dpdn[0]).epsilon(1e-14));
    }

  const SourceEnsemble e = single_source_ensemble();
  CHECK((e.sources[0].position - 0.7 * Eigen::Vector3d(1, -1, 1) / std::sqrt(3.0)).norm() < 1e-15);
  int nearest = 0;
  double best = 1e9;
  for (int i = 0; i < f.node_count(); ++i) {
    const double d = (Eigen::Vector3d(f.rule.x[i], f.rule.y[i], f.rule.z[i]) - e.sources[0].position).norm();
    if (d < best) {
      best = d;
      nearest = i;
    }
  }
  const auto pulse = surface_data(e, f, 161, 0.025, 1.0);
  double peak = 0;
  int arg = -1;
  for (const auto& s : pulse)
    for (int i = 0; i < f.node_count(); ++i)
      if (std::abs(s.p[i]) > peak) {
        peak = std::abs(s.p[i]);
        arg = i;
      }
  CHECK(arg == nearest);
}

TEST_CASE("surface data matches the direct field with the outward normal") {
  const SurfaceFrame f = make_surface_frame(1.5, 110, 8);
  const SourceEnsemble e = random_ensemble(5, 9);
  const auto snaps = surface_data(e, f, 3, 0.5, 2.0, 1.0);
  for (int i : {0, 50, 109}) {
    const Eigen::Vector3d n(f.rule.x[i], f.rule.y[i], f.rule.z[i]);
    const FieldValue v = direct_field(e, 1.5 * n, 2.0, 2.0, n);
    CHECK(snaps[2].step == 2);
    CHECK(snaps[2].p[i] == doctest::Approx(v.p).epsilon(1e-14));
    CHECK(snaps[2].dpdn[i] == doctest::Approx(v.dpdn).epsilon(1e-14));
  }
}

TEST_CASE("sources must be strictly inside the surface") {
  const SurfaceFrame f = make_surface_frame(0.5, 110, 8);
  CHECK_THROWS_AS(surface_data(random_ensemble(200, 3), f, 2, 0.1, 1.0), std::invalid_argument);
}

TEST_CASE("random ensembles are deterministic, inside the ball and span the frequency band") {
  const SourceEnsemble a = random_ensemble(1000, 42), b = random_ensemble(1000, 42), c = random_ensemble(1000, 43);
  REQUIRE(a.sources.size() == 1000);
  CHECK(a.seed == 42);
  double lo = 100, hi = 0;
  bool differs = false;
  for (std::size_t k = 0; k < 1000; ++k) {
    CHECK(a.sources[k].position == b.sources[k].position);
    const double w = std::get<RampedCosine>(a.sources[k].signal).omega;
    CHECK(w == std::get<RampedCosine>(b.sources[k].signal).omega);
    CHECK(a.sources[k].position.norm() <= kEnsembleRadius);
    lo = std::min(lo, w);
    hi = std::max(hi, w);
    differs |= a.sources[k].position != c.sources[k].position;
  }
  CHECK(lo >= 9.0);
  CHECK(hi <= 11.0);
  CHECK(lo < 9.05);
  CHECK(hi > 10.95);
  CHECK(differs);
  // first draw pinned so the generator cannot drift between builds
  CHECK(a.sources[0].position.x() == doctest::Approx(0.35300328104723722).epsilon(1e-15));
  CHECK(a.sources[0].position.y() == doctest::Approx(0.19464395139657639).epsilon(1e-15));
  CHECK(a.sources[0].position.z() == doctest::Approx(0.35721774613635454).epsilon(1e-15));
  CHECK(std::get<RampedCosine>(a.sources[0].signal).omega == doctest::Approx(9.2725453672648737).epsilon(1e-15));
  CHECK(std::string(kRngAlgorithm) == "mt19937_64/53-bit-mantissa");
  CHECK_THROWS(random_ensemble(0, 1));
}

TEST_CASE("ensemble CSV round trip and diagnostics") {
  const SourceEnsemble a = random_ensemble(7, 5);
  std::stringstream buf;
  write_ensemble_csv(a, buf);
  const SourceEnsemble b = read_ensemble_csv(buf);
  REQUIRE(b.sources.size() == 7);
  for (std::size_t k = 0; k < 7; ++k) {
    CHECK(b.sources[k].position == a.sources[k].position);
    CHECK(std::get<RampedCosine>(b.sources[k].signal).omega == std::get<RampedCosine>(a.sources[k].signal).omega);
  }
  std::istringstream bad("x,y,z,omega\n0.1,0.2,0.3,10\n0.1,abc,0.3,10\n");
  try {
    read_ensemble_csv(bad);
    FAIL("expected an error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("line 3, column 2") != std::string::npos);
  }
  std::ostringstream out;
  CHECK_THROWS(write_ensemble_csv(single_source_ensemble(), out));
}

}
