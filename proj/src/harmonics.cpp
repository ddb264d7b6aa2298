#include "khs/harmonics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace khs {

BandLimit::BandLimit(int n) : n_max(n) {
  if (n < 0)
    throw std::invalid_argument("band limit must be non-negative");
}

namespace {

// Recurrence factors for one band limit, reused across calls on a thread.
struct RecurrenceFactors {
  int n_max = -1;
  std::vector<double> diag; // sqrt((2m+1)/(2m))
  std::vector<double> sub;  // sqrt(2m+3)
  std::vector<double> a, b; // three-term factors at slot(n, m)
};

const RecurrenceFactors& recurrence_factors(int n_max) {
  thread_local RecurrenceFactors f;
  if (f.n_max == n_max)
    return f;
  f.n_max = n_max;
  f.diag.assign(n_max + 1, 0.0);
  f.sub.assign(n_max + 1, 0.0);
  const int count = (n_max + 1) * (n_max + 2) / 2;
  f.a.assign(count, 0.0);
  f.b.assign(count, 0.0);
  for (int m = 0; m <= n_max; ++m) {
    if (m > 0)
      f.diag[m] = std::sqrt((2.0 * m + 1.0) / (2.0 * m));
    f.sub[m] = std::sqrt(2.0 * m + 3.0);
    for (int n = m + 2; n <= n_max; ++n) {
      const double nn = n, mm = m;
      f.a[BandLimit::slot(n, m)] = std::sqrt((4.0 * nn * nn - 1.0) / (nn * nn - mm * mm));
      f.b[BandLimit::slot(n, m)] =
          std::sqrt(((nn - 1.0) * (nn - 1.0) - mm * mm) / (4.0 * (nn - 1.0) * (nn - 1.0) - 1.0));
    }
  }
  return f;
}

} // namespace

void legendre_table(int n_max, double x, double* out) {
  const RecurrenceFactors& f = recurrence_factors(n_max);
  const double s = std::sqrt(std::max(0.0, (1.0 - x) * (1.0 + x)));
  double pmm = std::sqrt(0.5);
  for (int m = 0; m <= n_max; ++m) {
    if (m > 0)
      pmm *= f.diag[m] * s;
    out[BandLimit::slot(m, m)] = pmm;
    if (m == n_max)
      break;
    double p1 = x * f.sub[m] * pmm;
    out[BandLimit::slot(m + 1, m)] = p1;
    double p0 = pmm;
    for (int n = m + 2; n <= n_max; ++n) {
      const int j = BandLimit::slot(n, m);
      const double p2 = f.a[j] * (x * p1 - f.b[j] * p0);
      out[j] = p2;
      p0 = p1;
      p1 = p2;
    }
  }
}

void legendre_table_over_sine(int n_max, double x, double* out) {
  const RecurrenceFactors& f = recurrence_factors(n_max);
  const double s = std::sqrt(std::max(0.0, (1.0 - x) * (1.0 + x)));
  for (int n = 0; n <= n_max; ++n)
    out[BandLimit::slot(n, 0)] = 0.0;
  // same recurrence in n, seeded with P_m^m / s = sqrt(1/2) prod(diag) s^(m-1)
  double qmm = std::sqrt(0.5);
  for (int m = 1; m <= n_max; ++m) {
    qmm *= f.diag[m] * (m > 1 ? s : 1.0);
    out[BandLimit::slot(m, m)] = qmm;
    if (m == n_max)
      break;
    double q1 = x * f.sub[m] * qmm;
    out[BandLimit::slot(m + 1, m)] = q1;
    double q0 = qmm;
    for (int n = m + 2; n <= n_max; ++n) {
      const int j = BandLimit::slot(n, m);
      const double q2 = f.a[j] * (x * q1 - f.b[j] * q0);
      out[j] = q2;
      q0 = q1;
      q1 = q2;
    }
  }
}

double legendre_normalized(int n, int m, double x) {
  if (m < 0 || m > n)
    throw std::invalid_argument("associated Legendre function needs 0 <= m <= n");
  if (!(std::abs(x) <= 1.0))
    throw std::invalid_argument("associated Legendre argument outside [-1, 1]");
  std::vector<double> table((n + 1) * (n + 2) / 2);
  legendre_table(n, x, table.data());
  return table[BandLimit::slot(n, m)];
}

AnalysisMatrix build_analysis_matrix(const LebedevRule& rule, BandLimit band, OrderCheck check) {
  const int required = check == OrderCheck::Strict ? 2 * band.n_max : band.n_max;
  if (rule.order < required)
    throw std::invalid_argument("Lebedev rule of order " + std::to_string(rule.order) +
                                " is too low for band limit " + std::to_string(band.n_max) +
                                "; required order " + std::to_string(required));
  AnalysisMatrix A;
  A.band = band;
  A.node_count = rule.size();
  A.entries = Eigen::MatrixXd::Zero(band.size(), rule.size());
  std::vector<double> plm((band.n_max + 1) * (band.n_max + 2) / 2);
  const double norm = 1.0 / std::numbers::pi;
  for (int i = 0; i < rule.size(); ++i) {
    legendre_table(band.n_max, std::cos(rule.theta[i]), plm.data());
    for (int m = 0; m <= band.n_max; ++m) {
      const double cm = std::cos(m * rule.phi[i]);
      const double sm = std::sin(m * rule.phi[i]);
      const double wc = norm * rule.weight[i] / (m == 0 ? 2.0 : 1.0);
      const double ws = norm * rule.weight[i];
      for (int n = m; n <= band.n_max; ++n) {
        const double p = plm[BandLimit::slot(n, m)];
        A.entries(BandLimit::cos_row(n, m), i) = wc * p * cm;
        if (m > 0)
          A.entries(BandLimit::sin_row(n, m), i) = ws * p * sm;
      }
    }
  }
  return A;
}

void accumulate_eval_vector(BandLimit band, double theta, double phi, double scale,
                            Eigen::Ref<Eigen::VectorXd> acc, std::vector<double>& scratch) {
  scratch.resize((band.n_max + 1) * (band.n_max + 2) / 2);
  legendre_table(band.n_max, std::cos(theta), scratch.data());
  // cos(m phi), sin(m phi) by the angle-addition recurrence
  const double c1 = std::cos(phi), s1 = std::sin(phi);
  double cm = 1.0, sm = 0.0;
  for (int m = 0; m <= band.n_max; ++m) {
    const double sc = scale * cm, ss = scale * sm;
    for (int n = m; n <= band.n_max; ++n) {
      const int j = BandLimit::slot(n, m);
      const double p = scratch[j];
      acc[2 * j] += sc * p;
      acc[2 * j + 1] += ss * p;
    }
    const double c = cm * c1 - sm * s1;
    sm = sm * c1 + cm * s1;
    cm = c;
  }
}

Eigen::VectorXd eval_vector(BandLimit band, double theta, double phi) {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(band.size());
  std::vector<double> scratch;
  accumulate_eval_vector(band, theta, phi, 1.0, b, scratch);
  return b;
}

double synthesise(BandLimit band, const Eigen::VectorXd& coeffs, double theta, double phi) {
  if (coeffs.size() != band.size())
    throw std::invalid_argument("coefficient vector length does not match band limit");
  return eval_vector(band, theta, phi).dot(coeffs);
}

HarmonicGradient eval_gradient(BandLimit band, double theta, double phi, const Eigen::Vector3d& e1,
                               const Eigen::Vector3d& e2) {
  const int nm = band.n_max;
  std::vector<double> p((nm + 1) * (nm + 2) / 2 + 1), q((nm + 1) * (nm + 2) / 2 + 1);
  const double x = std::cos(theta);
  legendre_table(nm, x, p.data());
  legendre_table_over_sine(nm, x, q.data());
  const double st = std::sin(theta), ct = std::cos(theta), sp = std::sin(phi), cp = std::cos(phi);
  const Eigen::Vector3d th{ct * cp, ct * sp, -st}, ph{-sp, cp, 0.0};
  const double t1 = th.dot(e1), f1 = ph.dot(e1), t2 = th.dot(e2), f2 = ph.dot(e2);
  HarmonicGradient g;
  g.along_first = Eigen::VectorXd::Zero(band.size());
  g.along_second = Eigen::VectorXd::Zero(band.size());
  for (int m = 0; m <= nm; ++m) {
    const double cm = std::cos(m * phi), sm = std::sin(m * phi);
    for (int n = m; n <= nm; ++n) {
      const int j = BandLimit::slot(n, m);
      // d/dtheta = m x P/s - sqrt((n-m)(n+m+1)) P_n^{m+1}; (1/s) d/dphi brings m P/s
      const double over = m * q[j];
      const double upper = m < n ? std::sqrt((n - m) * (n + m + 1.0)) * p[BandLimit::slot(n, m + 1)] : 0.0;
      const double dth = x * over - upper;
      // cosine slot: dtheta cos, -over * sin along phi-hat; sine slot: dtheta sin, +over * cos
      g.along_first[2 * j] = dth * cm * t1 - over * sm * f1;
      g.along_second[2 * j] = dth * cm * t2 - over * sm * f2;
      g.along_first[2 * j + 1] = dth * sm * t1 + over * cm * f1;
      g.along_second[2 * j + 1] = dth * sm * t2 + over * cm * f2;
    }
  }
  return g;
}

void zonal_profiles(int n_max, double psi, std::vector<double>& mean, std::vector<double>& first) {
  const double x = std::cos(psi), s = std::sin(psi);
  mean.assign(n_max + 1, 0.0);
  first.assign(n_max + 1, 0.0);
  mean[0] = 1.0;
  if (n_max == 0)
    return;
  mean[1] = x;
  // P_n^1 = sin(psi) P_n'(cos psi), without the Condon-Shortley phase
  double q0 = 0.0, q1 = s;
  first[1] = q1;
  for (int n = 2; n <= n_max; ++n) {
    mean[n] = ((2.0 * n - 1.0) * x * mean[n - 1] - (n - 1.0) * mean[n - 2]) / n;
    const double q2 = ((2.0 * n - 1.0) * x * q1 - n * q0) / (n - 1.0);
    first[n] = q2;
    q0 = q1;
    q1 = q2;
  }
}

Eigen::VectorXd interpolation_weights(const AnalysisMatrix& A, double theta, double phi) {
  if (A.entries.rows() != A.band.size() || A.entries.cols() != A.node_count)
    throw std::invalid_argument("analysis matrix shape does not match its band and node count");
  return A.entries.transpose() * eval_vector(A.band, theta, phi);
}

} // namespace khs
