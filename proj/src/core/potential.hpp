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

#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core/conditioning.hpp"
#include "core/gate.hpp"
#include "core/linalg.hpp"
#include "core/state.hpp"

namespace qel {

// L(x) = x log2|x|, with L(0) = 0.
double entropy_kernel(double x);

// A fixed preconditioner. Identity and Walsh-Hadamard operands are kept
// symbolic so M * op costs O(n^2) or O(n^2 log n) instead of a dense product.
class Operand {
 public:
  enum class Kind { kIdentity, kWht, kDense };

  static Operand identity(std::size_t n, double scale = 1.0);
  static Operand wht(std::size_t n, double scale = 1.0);
  static Operand dense(Matrix m);

  Kind kind() const noexcept { return kind_; }
  std::size_t dim() const noexcept { return n_; }
  double scale() const noexcept { return scale_; }

  Matrix to_dense() const;
  // m * op
  Matrix right_multiply(const Matrix& m) const;
  // Spectral norm.
  double norm() const;

 private:
  Operand(Kind kind, std::size_t n, double scale, Matrix dense)
      : kind_(kind), n_(n), scale_(scale), dense_(std::move(dense)) {}

  Kind kind_;
  std::size_t n_;
  double scale_;
  Matrix dense_;
};

struct Slice {
  Operand a;
  Operand b;
};

// k slice pairs (A_p, B_p). The tracked functional is
//   -sum_{i,j} L( sum_p (M A_p)(i,j) (M^{-T} B_p)(i,j) ).
class PotentialSpec {
 public:
  // (Id, Id): the plain quasi-entropy.
  static PotentialSpec plain(std::size_t n);
  static PotentialSpec preconditioned(Operand a, Operand b);
  // A = Id, B = F.
  static PotentialSpec precond_id_wht(std::size_t n);
  // Column blocks of n x 2n preconditioners P, Q become two slices.
  static PotentialSpec hat(const Matrix& p, const Matrix& q);
  // P = [Id, -F], Q = [F, Id], kept symbolic.
  static PotentialSpec hat_wht(std::size_t n);
  static PotentialSpec k_slice(std::vector<Slice> slices);

  std::size_t dim() const noexcept { return n_; }
  std::size_t k() const noexcept { return slices_.size(); }
  std::span<const Slice> slices() const noexcept { return slices_; }
  bool is_plain() const noexcept { return plain_; }
  const std::string& name() const noexcept { return name_; }

 private:
  PotentialSpec(std::vector<Slice> slices, std::string name, bool plain);

  std::vector<Slice> slices_;
  std::size_t n_;
  std::string name_;
  bool plain_;
};

// The cached pair (M A_p, M^{-T} B_p) for one slice.
struct SliceProducts {
  Matrix ma;
  Matrix nb;
};

std::vector<SliceProducts> slice_products(const Matrix& m, const Matrix& m_inv_t, const PotentialSpec& spec);

// -sum_j L(sum_p ma_p(row,j) nb_p(row,j)).
double row_contribution(std::span<const SliceProducts> products, Eigen::Index row);
double potential_from_products(std::span<const SliceProducts> products);

// M^{-T} via LU; Error(kSingular) when M is numerically singular.
Matrix inverse_transpose(const Matrix& m);

double k_slice_quasi_entropy(const Matrix& m, const PotentialSpec& spec);
double k_slice_quasi_entropy(const Matrix& m, const Matrix& m_inv_t, const PotentialSpec& spec);
double quasi_entropy(const Matrix& m);
double preconditioned_quasi_entropy(const Matrix& m, const Matrix& a, const Matrix& b);
double hat_quasi_entropy(const Matrix& m, const Matrix& p, const Matrix& q);

// ||(M A)([i i'], :)||_F * ||(M^{-T} B)([i i'], :)||_F for a one-slice spec,
// rows 1-based.
double theorem2_bound(const TrackedState& state, const PotentialSpec& spec, std::size_t i, std::size_t i2);

// Incremental evaluation along a run. A rotation on rows (i, i') changes only
// those rows of every cached product, so the delta costs O(k n).
class PotentialTracker {
 public:
  static constexpr double kDesyncTolerance = 1e-6;

  PotentialTracker(PotentialSpec spec, const TrackedState& state, std::size_t recompute_every = 1024);

  const PotentialSpec& spec() const noexcept { return spec_; }
  double value() const noexcept { return value_; }
  std::span<const SliceProducts> products() const noexcept { return products_; }

  // Theorem-2 right-hand side from the current caches (k = 1 only).
  double bound(std::size_t i, std::size_t i2) const;

  // Applies `gate` to the caches and returns the potential change.
  // `state_after` is the state with the gate already applied; every
  // `recompute_every` calls the caches are rebuilt from it and the running
  // value replaced. Error(kDesync) if the two disagree by more than
  // kDesyncTolerance.
  double step(const Gate& gate, const TrackedState& state_after);

  // Rebuilds caches from `state`; returns |running - recomputed|.
  double recompute(const TrackedState& state);

  std::size_t recompute_count() const noexcept { return recompute_count_; }
  double max_discrepancy() const noexcept { return max_discrepancy_; }

 private:
  PotentialSpec spec_;
  std::vector<SliceProducts> products_;
  double value_ = 0.0;
  std::size_t recompute_every_;
  std::size_t steps_ = 0;
  std::size_t recompute_count_ = 0;
  double max_discrepancy_ = 0.0;
};

// One step of a trajectory; step 0 carries no gate.
struct TraceRecord {
  std::size_t step = 0;
  std::optional<Gate> gate;
  double potential = 0.0;
  double delta = 0.0;
  std::optional<double> bound;
  double kappa = std::numeric_limits<double>::quiet_NaN();
};

struct TraceSummary {
  std::string spec_name;
  std::size_t steps = 0;
  double initial = 0.0;
  double final_value = 0.0;
  double delta_sum = 0.0;
  double max_abs_delta = 0.0;
  // Largest |delta| / bound over rotations with a positive bound.
  double max_bound_ratio = 0.0;
  std::size_t theorem2_violations = 0;
  std::optional<std::size_t> first_violation_step;
  double max_constant_delta = 0.0;
  double max_kappa = std::numeric_limits<double>::quiet_NaN();
  double max_recompute_discrepancy = 0.0;
};

struct Trajectory {
  TraceSummary summary;
  std::vector<TraceRecord> records;
};

struct TraceOptions {
  std::size_t recompute_every = 1024;
  bool track_kappa = true;
  // Throw Error(kBoundViolation) at the first rotation with |delta| > bound + tol.
  bool enforce_theorem2 = true;
  double theorem2_tolerance = 1e-8;
  RunOptions run;
};

using TraceSink = std::function<void(std::size_t spec_index, const TraceRecord& record)>;

std::vector<TraceSummary> trace_potentials_streaming(const GateProgram& program,
                                                     std::span<const PotentialSpec> specs,
                                                     const TraceOptions& options, const TraceSink& sink);

std::vector<Trajectory> trace_potentials(const GateProgram& program, std::span<const PotentialSpec> specs,
                                         const TraceOptions& options = {});

}  // namespace qel
