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

#include "core/gate.hpp"
#include "core/linalg.hpp"
#include "core/state.hpp"

namespace qel {

inline constexpr double kDefaultSingularFloor = 1e-12;

// Singular values in decreasing order.
Vector singular_values(const Matrix& m);

// sigma_max / sigma_min from a full singular value computation. Throws
// Error(kSingular) when sigma_min is below `floor`.
double condition_number(const Matrix& m, double floor = kDefaultSingularFloor);

// Follows kappa(M^(t)) along a run without an SVD per step. Rotations and
// sign flips leave the singular values untouched, so kappa is carried
// forward; after any other constant gate it is recomputed. The Gram matrix
// M M^T is maintained in O(n) per gate: when it is diagonal up to rounding
// the Gershgorin discs give kappa directly, otherwise a full SVD of M runs.
class ConditionTracker {
 public:
  explicit ConditionTracker(std::size_t n, double floor = kDefaultSingularFloor);

  // Call after `gate` has been applied to `state`.
  void observe(const Gate& gate, const TrackedState& state);
  // Replaces the carried value with a full SVD of the current state.
  void recompute(const TrackedState& state);

  double kappa() const noexcept { return kappa_; }
  std::size_t svd_count() const noexcept { return svd_count_; }

 private:
  bool kappa_from_diagonal_gram();

  Matrix gram_;
  double kappa_ = 1.0;
  double floor_;
  std::size_t svd_count_ = 0;
};

struct ConditionReport {
  double max_kappa = 1.0;
  std::size_t argmax_step = 0;
  double final_kappa = 1.0;
  double kappa_max = 0.0;
  bool passed = false;
};

// Runs the program from Id and reports max_t kappa(M^(t)). When
// `final_matrix` is given it receives M^(m).
ConditionReport verify_well_conditioned(const GateProgram& program, double kappa_max,
                                        const RunOptions& options = {}, Matrix* final_matrix = nullptr);

}  // namespace qel
