#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "khs/operator.hpp"

namespace khs {

/// Surface pressure and outward normal derivative at the N_Q nodes for
/// one source time step.
struct SurfaceSnapshot {
  std::int64_t step = 0;
  Eigen::VectorXd p;
  Eigen::VectorXd dpdn;
};

/// Received record at one field point. Sample j is at time
/// time_origin + (first_step + j) * dt, where time_origin is the source
/// time of snapshot step 0. Samples outside [valid_begin, valid_end) are
/// missing contributions from source times outside the snapshot record.
class FieldSeries {
public:
  FieldSeries() = default;
  FieldSeries(double dt, std::int64_t first_step, std::size_t length, bool with_normal, double time_origin = 0.0);

  double dt = 0.0;
  double time_origin = 0.0;
  std::int64_t first_step = 0;
  std::vector<double> p;
  std::vector<double> dpdn; ///< empty without normal-derivative output
  std::int64_t valid_begin = 0;
  std::int64_t valid_end = 0;

  std::size_t size() const { return p.size(); }
  bool has_normal() const { return !dpdn.empty(); }
  double time(std::int64_t j) const { return time_origin + static_cast<double>(first_step + j) * dt; }
};

/// Add the products of one snapshot into the window
/// [step + N_1, step + N_1 + N_W) of the series (absolute steps).
void step(const PropagationOperator& op, const SurfaceSnapshot& snap, FieldSeries& series);

/// Fold a contiguous snapshot stream through the operator. The result has
/// length n_t + N_W, starts at absolute step first.step + N_1 and is valid
/// on [N_W - 1, n_t - 1], the samples that received every contribution.
FieldSeries run(const PropagationOperator& op, std::span<const SurfaceSnapshot> snapshots, bool want_normal,
                double time_origin = 0.0);

/// Memory-bounded alternative to run(): keeps a ring of N_W + K samples
/// and emits each output sample once no later snapshot can touch it.
class StreamingAccumulator {
public:
  using Sink = std::function<void(std::int64_t step, double p, double dpdn)>;

  StreamingAccumulator(const PropagationOperator& op, bool want_normal, Sink sink);

  void push(const SurfaceSnapshot& snap);
  /// Emit everything still buffered.
  void flush();
  std::size_t capacity() const { return p_.size(); }

private:
  void emit_until(std::int64_t step);

  const PropagationOperator& op_;
  bool normal_;
  Sink sink_;
  std::vector<double> p_, dpdn_;
  std::int64_t next_snapshot_ = 0;
  std::int64_t next_emit_ = 0; ///< absolute output step
  bool started_ = false;
  Eigen::VectorXd tmp_;
};

/// max |reference - computed| / max |reference| over the common valid
/// range. `normal` selects the dp/dn records.
double error_metric(const FieldSeries& reference, const FieldSeries& computed, bool normal = false);

/// CSV with columns t,p,dpdn, 17 significant digits.
void write_series_csv(const FieldSeries& series, std::ostream& out, bool valid_only = false);

/// CSV with columns step,node,p,dpdn. Throws with line and column context
/// on malformed input and when the node count differs from node_count.
std::vector<SurfaceSnapshot> read_snapshots_csv(std::istream& in, int node_count);
void write_snapshots_csv(std::span<const SurfaceSnapshot> snapshots, std::ostream& out);

} // namespace khs
