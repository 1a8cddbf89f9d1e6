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
#include <vector>

#include "core/gate.hpp"
#include "core/linalg.hpp"

namespace qel {

// Machine state of a no-extra-memory linear program: the transformation M
// taking the input to the current registers, its inverse-transpose, and the
// number of gates applied since M = Id.
class TrackedState {
 public:
  explicit TrackedState(std::size_t n);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(m_.rows()); }
  std::size_t step() const noexcept { return t_; }
  const Matrix& m() const noexcept { return m_; }
  const Matrix& m_inv_t() const noexcept { return m_inv_t_; }

  // Rotations left-multiply both matrices by R (R^{-T} = R); a constant gate
  // scales row i of M by c and row i of M^{-T} by 1/c.
  void apply(const Gate& gate);

  // max |M^T * M^{-T} - Id| entrywise.
  double inverse_residual() const;

 private:
  Matrix m_;
  Matrix m_inv_t_;
  std::size_t t_ = 0;
};

inline void apply_gate(TrackedState& state, const Gate& gate) { state.apply(gate); }

// Called after every gate with the 1-based step index.
using StepObserver = std::function<void(std::size_t step, const Gate& gate, const TrackedState& state)>;

struct RunOptions {
  // Every this many gates M^T * M^{-T} is checked against the identity; 0
  // disables the periodic check (the final state is always checked).
  std::size_t crosscheck_every = 1024;
  double inverse_tolerance = 1e-8;
};

TrackedState run_program(const GateProgram& program, const std::vector<StepObserver>& observers = {},
                         const RunOptions& options = {});

Matrix program_matrix(const GateProgram& program, const RunOptions& options = {});

// Dense matrix of a single gate in dimension n (test and debugging aid).
Matrix gate_matrix(const Gate& gate, std::size_t n);

}  // namespace qel
