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

#include "core/state.hpp"

#include <cmath>
#include <string>

#include "core/error.hpp"

namespace qel {

TrackedState::TrackedState(std::size_t n) {
  if (n == 0) fail(ErrorCode::kInvalidArgument, "state dimension must be positive");
  const auto dim = static_cast<Eigen::Index>(n);
  m_ = Matrix::Identity(dim, dim);
  m_inv_t_ = Matrix::Identity(dim, dim);
}

void TrackedState::apply(const Gate& gate) {
  validate_gate(gate, dim());
  if (const auto* r = std::get_if<Rotation>(&gate)) {
    const double c = std::cos(r->theta);
    const double s = std::sin(r->theta);
    const auto i = static_cast<Eigen::Index>(r->i - 1);
    const auto i2 = static_cast<Eigen::Index>(r->i2 - 1);
    rotate_rows(m_, i, i2, c, s);
    rotate_rows(m_inv_t_, i, i2, c, s);
  } else {
    const auto& k = std::get<Constant>(gate);
    const auto i = static_cast<Eigen::Index>(k.i - 1);
    m_.row(i) *= k.c;
    m_inv_t_.row(i) /= k.c;
  }
  ++t_;
}

double TrackedState::inverse_residual() const {
  Matrix prod = m_.transpose() * m_inv_t_;
  prod.diagonal().array() -= 1.0;
  return max_abs_entry(prod);
}

namespace {

void crosscheck(const TrackedState& state, double tolerance) {
  const double residual = state.inverse_residual();
  if (!(residual <= tolerance)) {
    fail(ErrorCode::kDesync, "inverse-transpose drifted at step " + std::to_string(state.step()) +
                                 ": max|M^T M^-T - Id| = " + format_double(residual));
  }
}

}  // namespace

TrackedState run_program(const GateProgram& program, const std::vector<StepObserver>& observers,
                         const RunOptions& options) {
  TrackedState state(program.dim());
  std::size_t step = 0;
  for (const auto& gate : program.gates()) {
    ++step;
    try {
      state.apply(gate);
    } catch (const Error& e) {
      fail(e.code(), "step " + std::to_string(step) + ": " + e.what());
    }
    for (const auto& observe : observers) observe(step, gate, state);
    if (options.crosscheck_every != 0 && step % options.crosscheck_every == 0) {
      crosscheck(state, options.inverse_tolerance);
    }
  }
  if (!program.empty()) crosscheck(state, options.inverse_tolerance);
  return state;
}

Matrix program_matrix(const GateProgram& program, const RunOptions& options) {
  return run_program(program, {}, options).m();
}

Matrix gate_matrix(const Gate& gate, std::size_t n) {
  validate_gate(gate, n);
  const auto dim = static_cast<Eigen::Index>(n);
  Matrix g = Matrix::Identity(dim, dim);
  if (const auto* r = std::get_if<Rotation>(&gate)) {
    const auto i = static_cast<Eigen::Index>(r->i - 1);
    const auto i2 = static_cast<Eigen::Index>(r->i2 - 1);
    g(i, i) = std::cos(r->theta);
    g(i, i2) = std::sin(r->theta);
    g(i2, i) = -std::sin(r->theta);
    g(i2, i2) = std::cos(r->theta);
  } else {
    const auto& k = std::get<Constant>(gate);
    g(static_cast<Eigen::Index>(k.i - 1), static_cast<Eigen::Index>(k.i - 1)) = k.c;
  }
  return g;
}

}  // namespace qel
