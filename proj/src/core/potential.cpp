// Copyright 2026 The qelab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "core/potential.hpp"

#include <cmath>
#include <string>

#include "core/error.hpp"
#include "core/wht.hpp"

namespace qel {

double entropy_kernel(double x) {
  if (x == 0.0) return 0.0;
  return x * std::log2(std::abs(x));
}

// ---------------------------------------------------------------------------
// Operand

Operand Operand::identity(std::size_t n, double scale) {
  if (n == 0) fail(ErrorCode::kInvalidArgument, "operand dimension must be positive");
  return Operand(Kind::kIdentity, n, scale, Matrix());
}

Operand Operand::wht(std::size_t n, double scale) {
  if (!is_power_of_two(n)) fail(ErrorCode::kInvalidArgument, "WHT operand needs a power-of-two dimension");
  return Operand(Kind::kWht, n, scale, Matrix());
}

Operand Operand::dense(Matrix m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    fail(ErrorCode::kInvalidArgument, "preconditioner slices must be square and nonempty");
  }
  const auto n = static_cast<std::size_t>(m.rows());
  return Operand(Kind::kDense, n, 1.0, std::move(m));
}

Matrix Operand::to_dense() const {
  const auto dim = static_cast<Eigen::Index>(n_);
  switch (kind_) {
    case Kind::kIdentity:
      return scale_ * Matrix::Identity(dim, dim);
    case Kind::kWht:
      return scale_ * wht_matrix(n_);
    case Kind::kDense:
      break;
  }
  return dense_;
}

Matrix Operand::right_multiply(const Matrix& m) const {
  if (static_cast<std::size_t>(m.cols()) != n_) {
    fail(ErrorCode::kInvalidArgument, "operand dimension mismatch");
  }
  switch (kind_) {
    case Kind::kIdentity:
      return scale_ == 1.0 ? m : Matrix(scale_ * m);
    case Kind::kWht: {
      Matrix out = multiply_wht_right(m);
      if (scale_ != 1.0) out *= scale_;
      return out;
    }
    case Kind::kDense:
      break;
  }
  return m * dense_;
}

double Operand::norm() const {
  if (kind_ != Kind::kDense) return std::abs(scale_);
  return singular_values(dense_)(0);
}

// ---------------------------------------------------------------------------
// PotentialSpec

PotentialSpec::PotentialSpec(std::vector<Slice> slices, std::string name, bool plain)
    : slices_(std::move(slices)), n_(0), name_(std::move(name)), plain_(plain) {
  if (slices_.empty()) fail(ErrorCode::kInvalidArgument, "a potential needs at least one slice");
  n_ = slices_.front().a.dim();
  for (const auto& s : slices_) {
    if (s.a.dim() != n_ || s.b.dim() != n_) {
      fail(ErrorCode::kInvalidArgument, "all preconditioner slices must share the dimension");
    }
  }
}

PotentialSpec PotentialSpec::plain(std::size_t n) {
  return PotentialSpec({Slice{Operand::identity(n), Operand::identity(n)}}, "plain", true);
}

PotentialSpec PotentialSpec::preconditioned(Operand a, Operand b) {
  return PotentialSpec({Slice{std::move(a), std::move(b)}}, "preconditioned", false);
}

PotentialSpec PotentialSpec::precond_id_wht(std::size_t n) {
  return PotentialSpec({Slice{Operand::identity(n), Operand::wht(n)}}, "precond-id-f", false);
}

PotentialSpec PotentialSpec::hat(const Matrix& p, const Matrix& q) {
  const Eigen::Index n = p.rows();
  if (n == 0 || p.cols() != 2 * n || q.rows() != n || q.cols() != 2 * n) {
    fail(ErrorCode::kInvalidArgument, "hat preconditioners must both be n x 2n");
  }
  std::vector<Slice> slices;
  slices.push_back({Operand::dense(p.leftCols(n)), Operand::dense(q.leftCols(n))});
  slices.push_back({Operand::dense(p.rightCols(n)), Operand::dense(q.rightCols(n))});
  return PotentialSpec(std::move(slices), "hat", false);
}

PotentialSpec PotentialSpec::hat_wht(std::size_t n) {
  std::vector<Slice> slices;
  slices.push_back({Operand::identity(n), Operand::wht(n)});
  slices.push_back({Operand::wht(n, -1.0), Operand::identity(n)});
  return PotentialSpec(std::move(slices), "hat-pq", false);
}

PotentialSpec PotentialSpec::k_slice(std::vector<Slice> slices) {
  return PotentialSpec(std::move(slices), "k-slice", false);
}

// ---------------------------------------------------------------------------
// Direct evaluation

std::vector<SliceProducts> slice_products(const Matrix& m, const Matrix& m_inv_t, const PotentialSpec& spec) {
  if (m.rows() != m.cols() || static_cast<std::size_t>(m.rows()) != spec.dim() ||
      m_inv_t.rows() != m.rows() || m_inv_t.cols() != m.cols()) {
    fail(ErrorCode::kInvalidArgument, "matrix dimension does not match the potential");
  }
  std::vector<SliceProducts> out;
  out.reserve(spec.k());
  for (const auto& s : spec.slices()) {
    out.push_back({s.a.right_multiply(m), s.b.right_multiply(m_inv_t)});
  }
  return out;
}

double row_contribution(std::span<const SliceProducts> products, Eigen::Index row) {
  const Eigen::Index cols = products.front().ma.cols();
  double acc = 0.0;
  if (products.size() == 1) {
    const double* a = products[0].ma.row(row).data();
    const double* b = products[0].nb.row(row).data();
    for (Eigen::Index j = 0; j < cols; ++j) acc -= entropy_kernel(a[j] * b[j]);
    return acc;
  }
  for (Eigen::Index j = 0; j < cols; ++j) {
    double s = 0.0;
    for (const auto& p : products) s += p.ma(row, j) * p.nb(row, j);
    acc -= entropy_kernel(s);
  }
  return acc;
}

double potential_from_products(std::span<const SliceProducts> products) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < products.front().ma.rows(); ++i) total += row_contribution(products, i);
  return total;
}

Matrix inverse_transpose(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    fail(ErrorCode::kInvalidArgument, "inverse needs a nonempty square matrix");
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
  // rcond() is unreliable once a pivot is exactly zero, so look at U too.
  const Eigen::VectorXd pivots = lu.matrixLU().diagonal().cwiseAbs();
  const double rcond = pivots.minCoeff() > 1e-14 * pivots.maxCoeff() ? lu.rcond() : 0.0;
  if (!(rcond > 1e-14)) {
    fail(ErrorCode::kSingular, "matrix is singular (reciprocal condition estimate " + format_double(rcond) + ")");
  }
  return lu.inverse().transpose();
}

double k_slice_quasi_entropy(const Matrix& m, const PotentialSpec& spec) {
  return k_slice_quasi_entropy(m, inverse_transpose(m), spec);
}

double k_slice_quasi_entropy(const Matrix& m, const Matrix& m_inv_t, const PotentialSpec& spec) {
  const auto products = slice_products(m, m_inv_t, spec);
  return potential_from_products(products);
}

double quasi_entropy(const Matrix& m) {
  return k_slice_quasi_entropy(m, PotentialSpec::plain(static_cast<std::size_t>(m.rows())));
}

double preconditioned_quasi_entropy(const Matrix& m, const Matrix& a, const Matrix& b) {
  if (a.rows() != m.rows() || b.rows() != m.rows()) {
    fail(ErrorCode::kInvalidArgument, "preconditioner dimension mismatch");
  }
  return k_slice_quasi_entropy(m, PotentialSpec::preconditioned(Operand::dense(a), Operand::dense(b)));
}

double hat_quasi_entropy(const Matrix& m, const Matrix& p, const Matrix& q) {
  if (p.rows() != m.rows()) fail(ErrorCode::kInvalidArgument, "preconditioner dimension mismatch");
  return k_slice_quasi_entropy(m, PotentialSpec::hat(p, q));
}

namespace {

void require_rows(std::size_t n, std::size_t i, std::size_t i2) {
  if (i < 1 || i > n || i2 < 1 || i2 > n) {
    fail(ErrorCode::kOutOfRange, "row pair (" + std::to_string(i) + ", " + std::to_string(i2) +
                                     ") outside [1, " + std::to_string(n) + "]");
  }
}

double pair_norm(const Matrix& m, std::size_t i, std::size_t i2) {
  const auto r0 = static_cast<Eigen::Index>(i - 1);
  const auto r1 = static_cast<Eigen::Index>(i2 - 1);
  double sq = m.row(r0).squaredNorm();
  if (r1 != r0) sq += m.row(r1).squaredNorm();
  return std::sqrt(sq);
}

}  // namespace

double theorem2_bound(const TrackedState& state, const PotentialSpec& spec, std::size_t i, std::size_t i2) {
  if (spec.k() != 1) fail(ErrorCode::kInvalidArgument, "the rotation bound is defined for one-slice potentials");
  if (spec.dim() != state.dim()) fail(ErrorCode::kInvalidArgument, "state dimension does not match the potential");
  require_rows(state.dim(), i, i2);
  const auto& s = spec.slices().front();
  Matrix rows_m(2, state.m().cols());
  Matrix rows_n(2, state.m().cols());
  rows_m << state.m().row(static_cast<Eigen::Index>(i - 1)), state.m().row(static_cast<Eigen::Index>(i2 - 1));
  rows_n << state.m_inv_t().row(static_cast<Eigen::Index>(i - 1)),
      state.m_inv_t().row(static_cast<Eigen::Index>(i2 - 1));
  return s.a.right_multiply(rows_m).norm() * s.b.right_multiply(rows_n).norm();
}

// ---------------------------------------------------------------------------
// PotentialTracker

PotentialTracker::PotentialTracker(PotentialSpec spec, const TrackedState& state, std::size_t recompute_every)
    : spec_(std::move(spec)), recompute_every_(recompute_every) {
  products_ = slice_products(state.m(), state.m_inv_t(), spec_);
  value_ = potential_from_products(products_);
}

double PotentialTracker::bound(std::size_t i, std::size_t i2) const {
  if (spec_.k() != 1) fail(ErrorCode::kInvalidArgument, "the rotation bound is defined for one-slice potentials");
  require_rows(spec_.dim(), i, i2);
  return pair_norm(products_[0].ma, i, i2) * pair_norm(products_[0].nb, i, i2);
}

double PotentialTracker::step(const Gate& gate, const TrackedState& state_after) {
  validate_gate(gate, spec_.dim());
  double delta = 0.0;
  if (const auto* r = std::get_if<Rotation>(&gate)) {
    const auto i = static_cast<Eigen::Index>(r->i - 1);
    const auto i2 = static_cast<Eigen::Index>(r->i2 - 1);
    const double before = row_contribution(products_, i) + row_contribution(products_, i2);
    const double c = std::cos(r->theta);
    const double s = std::sin(r->theta);
    for (auto& p : products_) {
      rotate_rows(p.ma, i, i2, c, s);
      rotate_rows(p.nb, i, i2, c, s);
    }
    delta = row_contribution(products_, i) + row_contribution(products_, i2) - before;
  } else {
    const auto& k = std::get<Constant>(gate);
    const auto i = static_cast<Eigen::Index>(k.i - 1);
    // Row i of every product M A_p scales by c and of M^{-T} B_p by 1/c.
    const double before = spec_.is_plain() ? 0.0 : row_contribution(products_, i);
    for (auto& p : products_) {
      p.ma.row(i) *= k.c;
      p.nb.row(i) /= k.c;
    }
    if (!spec_.is_plain()) delta = row_contribution(products_, i) - before;
  }
  value_ += delta;
  ++steps_;
  if (recompute_every_ != 0 && steps_ % recompute_every_ == 0) {
    const double discrepancy = recompute(state_after);
    if (!(discrepancy <= kDesyncTolerance)) {
      fail(ErrorCode::kDesync, "potential cache desynchronized at step " + std::to_string(state_after.step()) +
                                   ": discrepancy " + format_double(discrepancy));
    }
  }
  return delta;
}

double PotentialTracker::recompute(const TrackedState& state) {
  products_ = slice_products(state.m(), state.m_inv_t(), spec_);
  const double fresh = potential_from_products(products_);
  const double discrepancy = std::abs(fresh - value_);
  value_ = fresh;
  ++recompute_count_;
  max_discrepancy_ = std::max(max_discrepancy_, discrepancy);
  return discrepancy;
}

// ---------------------------------------------------------------------------
// Traces

std::vector<TraceSummary> trace_potentials_streaming(const GateProgram& program,
                                                     std::span<const PotentialSpec> specs,
                                                     const TraceOptions& options, const TraceSink& sink) {
  TrackedState initial(program.dim());
  std::vector<PotentialTracker> trackers;
  std::vector<TraceSummary> summaries(specs.size());
  trackers.reserve(specs.size());
  for (std::size_t s = 0; s < specs.size(); ++s) {
    if (specs[s].dim() != program.dim()) {
      fail(ErrorCode::kInvalidArgument, "potential '" + specs[s].name() + "' has dimension " +
                                            std::to_string(specs[s].dim()) + ", program has " +
                                            std::to_string(program.dim()));
    }
    trackers.emplace_back(specs[s], initial, options.recompute_every);
    summaries[s].spec_name = specs[s].name();
    summaries[s].initial = trackers.back().value();
  }

  std::optional<ConditionTracker> condition;
  if (options.track_kappa) condition.emplace(program.dim());
  const double initial_kappa = options.track_kappa ? 1.0 : std::numeric_limits<double>::quiet_NaN();
  for (std::size_t s = 0; s < specs.size(); ++s) {
    summaries[s].max_kappa = initial_kappa;
    TraceRecord first;
    first.potential = trackers[s].value();
    first.kappa = initial_kappa;
    if (sink) sink(s, first);
  }

  std::vector<std::optional<double>> bounds(specs.size());
  StepObserver observe = [&](std::size_t step, const Gate& gate, const TrackedState& state) {
    const auto* rot = std::get_if<Rotation>(&gate);
    for (std::size_t s = 0; s < specs.size(); ++s) {
      bounds[s].reset();
      if (rot != nullptr && specs[s].k() == 1) bounds[s] = trackers[s].bound(rot->i, rot->i2);
    }
    double kappa = std::numeric_limits<double>::quiet_NaN();
    if (condition) {
      condition->observe(gate, state);
      if (step == program.size()) condition->recompute(state);
      kappa = condition->kappa();
    }
    for (std::size_t s = 0; s < specs.size(); ++s) {
      auto& summary = summaries[s];
      TraceRecord record;
      record.step = step;
      record.gate = gate;
      record.delta = trackers[s].step(gate, state);
      record.potential = trackers[s].value();
      record.bound = bounds[s];
      record.kappa = kappa;

      const double mag = std::abs(record.delta);
      summary.delta_sum += record.delta;
      summary.max_abs_delta = std::max(summary.max_abs_delta, mag);
      if (rot == nullptr) summary.max_constant_delta = std::max(summary.max_constant_delta, mag);
      if (condition) summary.max_kappa = std::max(summary.max_kappa, kappa);
      if (record.bound) {
        if (*record.bound > 0.0) summary.max_bound_ratio = std::max(summary.max_bound_ratio, mag / *record.bound);
        if (mag > *record.bound + options.theorem2_tolerance) {
          ++summary.theorem2_violations;
          if (!summary.first_violation_step) summary.first_violation_step = step;
          if (options.enforce_theorem2) {
            fail(ErrorCode::kBoundViolation, "step " + std::to_string(step) + " (" + describe(gate) +
                                                 "): |delta| = " + format_double(mag) + " exceeds bound " +
                                                 format_double(*record.bound));
          }
        }
      }
      if (sink) sink(s, record);
    }
  };

  run_program(program, {observe}, options.run);
  for (std::size_t s = 0; s < specs.size(); ++s) {
    summaries[s].steps = program.size();
    summaries[s].final_value = trackers[s].value();
    summaries[s].max_recompute_discrepancy = trackers[s].max_discrepancy();
  }
  return summaries;
}

std::vector<Trajectory> trace_potentials(const GateProgram& program, std::span<const PotentialSpec> specs,
                                         const TraceOptions& options) {
  std::vector<Trajectory> out(specs.size());
  for (auto& t : out) t.records.reserve(program.size() + 1);
  auto summaries = trace_potentials_streaming(
      program, specs, options, [&](std::size_t s, const TraceRecord& r) { out[s].records.push_back(r); });
  for (std::size_t s = 0; s < specs.size(); ++s) out[s].summary = std::move(summaries[s]);
  return out;
}

}  // namespace qel
