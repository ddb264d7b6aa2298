#include "khs/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace khs {

namespace {

struct OrbitGenerator {
  int type;
  double a, b, v;
};

struct RuleTable {
  int nodes;
  int order;
  std::span<const OrbitGenerator> generators;
};

#include "lebedev_tables.inc"

constexpr int kSizes[] = {6,    14,   26,   38,   50,   86,   110,  146,  170,  194,  230,
                          266,  302,  350,  434,  590,  770,  974,  1202, 1454, 1730, 2030,
                          2354, 2702, 3074, 3470, 3890, 4334, 4802, 5294, 5810};

const RuleTable* find_table(int node_count) {
  if (std::find(std::begin(kSizes), std::end(kSizes), node_count) == std::end(kSizes))
    return nullptr;
  for (const auto& t : kRuleTables)
    if (t.nodes == node_count)
      return &t;
  return nullptr;
}

// Octahedral orbit expansion, Lebedev-Laikov generator types 1..6.
void expand_orbit(const OrbitGenerator& g, std::vector<std::array<double, 4>>& out) {
  auto push = [&](double x, double y, double z) { out.push_back({x, y, z, g.v}); };
  auto signs3 = [&](double x, double y, double z) {
    // all sign combinations of a point with nonzero components
    for (int sx : {1, -1})
      for (int sy : {1, -1})
        for (int sz : {1, -1})
          push(sx * x, sy * y, sz * z);
  };
  switch (g.type) {
  case 1:
    for (int s : {1, -1}) {
      push(s, 0, 0);
      push(0, s, 0);
      push(0, 0, s);
    }
    break;
  case 2: {
    const double a = std::sqrt(0.5);
    for (int s1 : {1, -1})
      for (int s2 : {1, -1}) {
        push(0, s1 * a, s2 * a);
        push(s1 * a, 0, s2 * a);
        push(s1 * a, s2 * a, 0);
      }
    break;
  }
  case 3: {
    const double a = std::sqrt(1.0 / 3.0);
    signs3(a, a, a);
    break;
  }
  case 4: {
    const double a = g.a, b = std::sqrt(1.0 - 2.0 * a * a);
    signs3(a, a, b);
    signs3(a, b, a);
    signs3(b, a, a);
    break;
  }
  case 5: {
    const double a = g.a, b = std::sqrt(1.0 - a * a);
    for (int s1 : {1, -1})
      for (int s2 : {1, -1}) {
        push(s1 * a, s2 * b, 0);
        push(s1 * b, s2 * a, 0);
        push(s1 * a, 0, s2 * b);
        push(s1 * b, 0, s2 * a);
        push(0, s1 * a, s2 * b);
        push(0, s1 * b, s2 * a);
      }
    break;
  }
  case 6: {
    const double a = g.a, b = g.b, c = std::sqrt(1.0 - a * a - b * b);
    signs3(a, b, c);
    signs3(b, a, c);
    signs3(c, a, b);
    signs3(c, b, a);
    signs3(a, c, b);
    signs3(b, c, a);
    break;
  }
  default:
    throw std::logic_error("bad Lebedev orbit type");
  }
}

} // namespace

double AzimuthGrid::weight() const { return 2.0 * std::numbers::pi / static_cast<double>(gamma.size()); }

std::span<const int> lebedev_sizes() { return kSizes; }

int lebedev_order(int node_count) {
  const RuleTable* t = find_table(node_count);
  if (!t)
    throw std::invalid_argument("no Lebedev rule of size " + std::to_string(node_count));
  return t->order;
}

LebedevRule lebedev_rule(int node_count) {
  const RuleTable* table = find_table(node_count);
  if (!table) {
    std::ostringstream msg;
    msg << "no Lebedev rule of size " << node_count << "; available sizes:";
    for (int n : kSizes)
      msg << ' ' << n;
    throw std::invalid_argument(msg.str());
  }

  std::vector<std::array<double, 4>> pts;
  pts.reserve(node_count);
  for (const auto& g : table->generators)
    expand_orbit(g, pts);

  LebedevRule rule;
  rule.order = table->order;
  double total = 0.0;
  for (const auto& p : pts)
    total += p[3];
  const double scale = 4.0 * std::numbers::pi / total;
  for (const auto& p : pts) {
    rule.x.push_back(p[0]);
    rule.y.push_back(p[1]);
    rule.z.push_back(p[2]);
    rule.weight.push_back(p[3] * scale);
    rule.theta.push_back(std::acos(std::clamp(p[2], -1.0, 1.0)));
    double ph = std::atan2(p[1], p[0]);
    if (ph < 0.0)
      ph += 2.0 * std::numbers::pi;
    if (ph >= 2.0 * std::numbers::pi)
      ph = 0.0;
    rule.phi.push_back(ph);
  }
  return rule;
}

int lebedev_size_for_band(int band_limit) {
  if (band_limit < 0)
    throw std::invalid_argument("band limit must be non-negative");
  for (int n : kSizes)
    if (lebedev_order(n) >= 2 * band_limit)
      return n;
  throw std::invalid_argument("no embedded Lebedev rule resolves band limit " +
                              std::to_string(band_limit) + " (largest order is 131)");
}

void gauss_legendre(int length, std::vector<double>& nodes, std::vector<double>& weights) {
  if (length < 1)
    throw std::invalid_argument("Gauss-Legendre rule length must be at least 1");
  nodes.assign(length, 0.0);
  weights.assign(length, 0.0);
  const int half = (length + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Newton iteration from the Chebyshev-like initial guess
    double x = std::cos(std::numbers::pi * (i + 0.75) / (length + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= length; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = length * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16)
        break;
    }
    // final derivative at the converged root
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= length; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = length * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[i] = -x;
    nodes[length - 1 - i] = x;
    weights[i] = w;
    weights[length - 1 - i] = w;
  }
  if (length % 2 == 1)
    nodes[length / 2] = 0.0;
}

ElevationRule gauss_legendre_elevation(int length) {
  if (length < 1)
    throw std::invalid_argument("elevation rule length must be at least 1");
  std::vector<double> x, w;
  gauss_legendre(length, x, w);
  ElevationRule rule;
  const double h = 0.5 * std::numbers::pi;
  for (int i = 0; i < length; ++i) {
    rule.psi.push_back(h * (x[i] + 1.0));
    rule.weight.push_back(h * w[i]);
  }
  return rule;
}

AzimuthGrid azimuth_grid(int count) {
  if (count < 1)
    throw std::invalid_argument("azimuth grid needs at least one node");
  AzimuthGrid grid;
  grid.gamma.resize(count);
  for (int j = 0; j < count; ++j)
    grid.gamma[j] = 2.0 * std::numbers::pi * j / count;
  return grid;
}

} // namespace khs
