#include "khs/propagate.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace khs {

FieldSeries::FieldSeries(double dt_, std::int64_t first, std::size_t length, bool with_normal, double origin)
    : dt(dt_), time_origin(origin), first_step(first), p(length, 0.0), valid_begin(0),
      valid_end(static_cast<std::int64_t>(length)) {
  if (with_normal)
    dpdn.assign(length, 0.0);
}

namespace {

void check_snapshot(const PropagationOperator& op, const SurfaceSnapshot& snap, bool normal) {
  if (snap.p.size() != op.node_count() || snap.dpdn.size() != op.node_count())
    throw std::invalid_argument("snapshot has " + std::to_string(snap.p.size()) + " nodes; operator expects " +
                                std::to_string(op.node_count()));
  if (normal && !op.has_normal())
    throw std::invalid_argument("normal derivative requested from an operator assembled without a normal");
}

} // namespace

void step(const PropagationOperator& op, const SurfaceSnapshot& snap, FieldSeries& series) {
  const bool normal = series.has_normal();
  check_snapshot(op, snap, normal);
  const std::int64_t begin = snap.step + op.base_delay - series.first_step;
  const std::int64_t end = begin + op.window();
  if (begin < 0 || end > static_cast<std::int64_t>(series.size()))
    throw std::out_of_range("snapshot " + std::to_string(snap.step) + " overflows the series window");
  Eigen::Map<Eigen::VectorXd> p(series.p.data() + begin, op.window());
  p.noalias() += op.S * snap.p;
  p.noalias() += op.S_N * snap.dpdn;
  if (normal) {
    Eigen::Map<Eigen::VectorXd> pn(series.dpdn.data() + begin, op.window());
    pn.noalias() += op.Sb * snap.p;
    pn.noalias() += op.Sb_N * snap.dpdn;
  }
}

FieldSeries run(const PropagationOperator& op, std::span<const SurfaceSnapshot> snapshots, bool want_normal,
                double time_origin) {
  const std::int64_t nw = op.window();
  if (snapshots.empty()) {
    FieldSeries empty(op.dt, op.base_delay, static_cast<std::size_t>(nw), want_normal, time_origin);
    empty.valid_begin = 0;
    empty.valid_end = 0;
    return empty;
  }
  const std::int64_t start = snapshots.front().step;
  for (std::size_t i = 0; i < snapshots.size(); ++i) {
    if (snapshots[i].step != start + static_cast<std::int64_t>(i))
      throw std::invalid_argument("gap in snapshot stream at step " + std::to_string(start + i));
    check_snapshot(op, snapshots[i], want_normal);
  }
  const std::int64_t nt = static_cast<std::int64_t>(snapshots.size());
  FieldSeries series(op.dt, start + op.base_delay, static_cast<std::size_t>(nt + nw), want_normal, time_origin);

  // Batched form of step(): Y = S Sigma for a block of snapshots, then
  // sample (i + r) receives Y(r, i).
  constexpr std::int64_t kBlock = 64;
  const Eigen::Index nq = op.node_count();
  Eigen::MatrixXd sig(nq, kBlock), sign(nq, kBlock), y(nw, kBlock);
  for (std::int64_t b0 = 0; b0 < nt; b0 += kBlock) {
    const std::int64_t nb = std::min(kBlock, nt - b0);
    for (std::int64_t i = 0; i < nb; ++i) {
      sig.col(i) = snapshots[b0 + i].p;
      sign.col(i) = snapshots[b0 + i].dpdn;
    }
    auto scatter = [&](std::vector<double>& dst) {
      for (std::int64_t i = 0; i < nb; ++i) {
        double* out = dst.data() + b0 + i;
        const double* col = y.col(i).data();
        for (std::int64_t r = 0; r < nw; ++r)
          out[r] += col[r];
      }
    };
    y.leftCols(nb).noalias() = op.S * sig.leftCols(nb);
    y.leftCols(nb).noalias() += op.S_N * sign.leftCols(nb);
    scatter(series.p);
    if (want_normal) {
      y.leftCols(nb).noalias() = op.Sb * sig.leftCols(nb);
      y.leftCols(nb).noalias() += op.Sb_N * sign.leftCols(nb);
      scatter(series.dpdn);
    }
  }
  series.valid_begin = nw - 1;
  series.valid_end = nt;
  return series;
}

StreamingAccumulator::StreamingAccumulator(const PropagationOperator& op, bool want_normal, Sink sink)
    : op_(op), normal_(want_normal), sink_(std::move(sink)) {
  const std::size_t cap = static_cast<std::size_t>(op.window() + op.order);
  p_.assign(cap, 0.0);
  if (normal_)
    dpdn_.assign(cap, 0.0);
  if (normal_ && !op.has_normal())
    throw std::invalid_argument("normal derivative requested from an operator assembled without a normal");
}

void StreamingAccumulator::emit_until(std::int64_t limit) {
  const std::int64_t cap = static_cast<std::int64_t>(p_.size());
  for (; next_emit_ < limit; ++next_emit_) {
    const std::size_t slot = static_cast<std::size_t>(((next_emit_ % cap) + cap) % cap);
    sink_(next_emit_, p_[slot], normal_ ? dpdn_[slot] : 0.0);
    p_[slot] = 0.0;
    if (normal_)
      dpdn_[slot] = 0.0;
  }
}

void StreamingAccumulator::push(const SurfaceSnapshot& snap) {
  check_snapshot(op_, snap, normal_);
  if (!started_) {
    started_ = true;
    next_snapshot_ = snap.step;
    next_emit_ = snap.step + op_.base_delay;
  }
  if (snap.step != next_snapshot_)
    throw std::invalid_argument("gap in snapshot stream at step " + std::to_string(next_snapshot_));
  ++next_snapshot_;

  const std::int64_t cap = static_cast<std::int64_t>(p_.size());
  const std::int64_t begin = snap.step + op_.base_delay;
  // samples before this snapshot's window are final
  emit_until(begin);
  auto add = [&](std::vector<double>& ring, const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
    tmp_.noalias() = A * snap.p;
    tmp_.noalias() += B * snap.dpdn;
    for (Eigen::Index r = 0; r < tmp_.size(); ++r)
      ring[static_cast<std::size_t>(((begin + r) % cap + cap) % cap)] += tmp_[r];
  };
  add(p_, op_.S, op_.S_N);
  if (normal_)
    add(dpdn_, op_.Sb, op_.Sb_N);
}

void StreamingAccumulator::flush() {
  if (started_)
    emit_until(next_snapshot_ - 1 + op_.base_delay + op_.window());
}

double error_metric(const FieldSeries& reference, const FieldSeries& computed, bool normal) {
  if (std::abs(reference.dt - computed.dt) > 1e-15 * std::abs(reference.dt))
    throw std::invalid_argument("series have different time steps");
  if (normal && (!reference.has_normal() || !computed.has_normal()))
    throw std::invalid_argument("normal-derivative records missing");
  const auto& ref = normal ? reference.dpdn : reference.p;
  const auto& cmp = normal ? computed.dpdn : computed.p;
  // absolute step ranges
  const std::int64_t lo = std::max(reference.first_step + reference.valid_begin, computed.first_step + computed.valid_begin);
  const std::int64_t hi = std::min(reference.first_step + reference.valid_end, computed.first_step + computed.valid_end);
  if (hi <= lo)
    throw std::invalid_argument("series have no common valid range");
  double num = 0.0, den = 0.0;
  for (std::int64_t s = lo; s < hi; ++s) {
    const double r = ref[static_cast<std::size_t>(s - reference.first_step)];
    const double c = cmp[static_cast<std::size_t>(s - computed.first_step)];
    num = std::max(num, std::abs(r - c));
    den = std::max(den, std::abs(r));
  }
  if (den == 0.0)
    throw std::invalid_argument("reference series is identically zero on the common range");
  return num / den;
}

void write_series_csv(const FieldSeries& series, std::ostream& out, bool valid_only) {
  const auto old = out.precision(17);
  out << "t,p,dpdn\n";
  const std::int64_t lo = valid_only ? series.valid_begin : 0;
  const std::int64_t hi = valid_only ? series.valid_end : static_cast<std::int64_t>(series.size());
  for (std::int64_t j = lo; j < hi; ++j) {
    out << series.time(j) << ',' << series.p[j] << ',' << (series.has_normal() ? series.dpdn[j] : 0.0) << '\n';
  }
  out.precision(old);
}

namespace {

[[noreturn]] void parse_error(std::size_t line, int column, const std::string& what) {
  throw std::runtime_error("snapshot CSV line " + std::to_string(line) + ", column " + std::to_string(column) +
                           ": " + what);
}

} // namespace

std::vector<SurfaceSnapshot> read_snapshots_csv(std::istream& in, int node_count) {
  std::vector<SurfaceSnapshot> out;
  std::string line;
  std::size_t lineno = 0;
  std::int64_t current = 0;
  int filled = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.empty() || line[0] == '#')
      continue;
    if (!header_seen) {
      header_seen = true;
      if (line.rfind("step", 0) == 0)
        continue;
    }
    std::string fields[4];
    int nf = 0;
    std::size_t pos = 0;
    while (true) {
      const std::size_t comma = line.find(',', pos);
      if (nf == 4)
        parse_error(lineno, 5, "too many columns (expected step,node,p,dpdn)");
      fields[nf++] = line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      if (comma == std::string::npos)
        break;
      pos = comma + 1;
    }
    if (nf != 4)
      parse_error(lineno, nf + 1, "expected 4 columns (step,node,p,dpdn)");
    std::int64_t s = 0, node = 0;
    for (int c = 0; c < 2; ++c) {
      std::int64_t& dst = c == 0 ? s : node;
      const auto& f = fields[c];
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), dst);
      if (ec != std::errc() || ptr != f.data() + f.size())
        parse_error(lineno, c + 1, "not an integer: '" + f + "'");
    }
    double vals[2];
    for (int c = 0; c < 2; ++c) {
      const auto& f = fields[c + 2];
      std::size_t used = 0;
      try {
        vals[c] = std::stod(f, &used);
      } catch (const std::exception&) {
        parse_error(lineno, c + 3, "not a number: '" + f + "'");
      }
      if (used != f.size() || !std::isfinite(vals[c]))
        parse_error(lineno, c + 3, "not a finite number: '" + f + "'");
    }
    if (!out.empty() && filled == node_count && s == current)
      parse_error(lineno, 2,
                  "step " + std::to_string(current) + " has more than " + std::to_string(node_count) +
                      " nodes; expected " + std::to_string(node_count));
    if (out.empty() || filled == node_count) {
      if (!out.empty() && s != current + 1)
        parse_error(lineno, 1, "expected step " + std::to_string(current + 1) + ", found " + std::to_string(s));
      SurfaceSnapshot snap;
      snap.step = s;
      snap.p = Eigen::VectorXd::Zero(node_count);
      snap.dpdn = Eigen::VectorXd::Zero(node_count);
      out.push_back(std::move(snap));
      current = s;
      filled = 0;
    }
    if (s != current)
      parse_error(lineno, 1,
                  "step " + std::to_string(current) + " has " + std::to_string(filled) + " nodes; expected " +
                      std::to_string(node_count));
    if (node != filled)
      parse_error(lineno, 2,
                  "node index " + std::to_string(node) + " out of order (expected " + std::to_string(filled) +
                      "; surface has " + std::to_string(node_count) + " nodes)");
    out.back().p[filled] = vals[0];
    out.back().dpdn[filled] = vals[1];
    ++filled;
  }
  if (!out.empty() && filled != node_count)
    parse_error(lineno, 2,
                "step " + std::to_string(current) + " has " + std::to_string(filled) + " nodes; expected " +
                    std::to_string(node_count));
  return out;
}

void write_snapshots_csv(std::span<const SurfaceSnapshot> snapshots, std::ostream& out) {
  const auto old = out.precision(17);
  out << "step,node,p,dpdn\n";
  for (const auto& s : snapshots)
    for (Eigen::Index i = 0; i < s.p.size(); ++i)
      out << s.step << ',' << i << ',' << s.p[i] << ',' << s.dpdn[i] << '\n';
  out.precision(old);
}

} // namespace khs
