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

#include "core/conditioning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "core/error.hpp"

namespace qel {

// Eigen 3.4's BDCSVD can return wrong values when the spectrum is tightly
// clustered (near-identity products hit this), so go through the Gram
// matrix. Squaring costs relative accuracy in sigma_min of order
// eps_mach * kappa^2; past kappa ~ 1e4 fall back to one-sided Jacobi.
Vector singular_values(const Matrix& m) {
  if (m.size() == 0) return Vector();
  const Eigen::MatrixXd gram = m.rows() <= m.cols() ? Eigen::MatrixXd(m * m.transpose())
                                                    : Eigen::MatrixXd(m.transpose() * m);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  if (eig.info() == Eigen::Success) {
    // Ascending eigenvalues; return singular values descending.
    Vector sv = eig.eigenvalues().reverse().cwiseMax(0.0).cwiseSqrt();
    if (sv(sv.size() - 1) > 1e-4 * sv(0)) return sv;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues();
}

double condition_number(const Matrix& m, double floor) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    fail(ErrorCode::kInvalidArgument, "condition number needs a nonempty square matrix");
  }
  const Vector sv = singular_values(m);
  const double smax = sv(0);
  const double smin = sv(sv.size() - 1);
  if (!(smin > floor)) {
    fail(ErrorCode::kSingular, "matrix is singular or near-singular: sigma_min = " + format_double(smin));
  }
  return smax / smin;
}

ConditionTracker::ConditionTracker(std::size_t n, double floor)
    : gram_(Matrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n))), floor_(floor) {}

void ConditionTracker::observe(const Gate& gate, const TrackedState& state) {
  if (const auto* r = std::get_if<Rotation>(&gate)) {
    const double c = std::cos(r->theta);
    const double s = std::sin(r->theta);
    const auto i = static_cast<Eigen::Index>(r->i - 1);
    const auto k = static_cast<Eigen::Index>(r->i2 - 1);
    rotate_rows(gram_, i, k, c, s);
    for (Eigen::Index j = 0; j < gram_.rows(); ++j) {
      const double x = gram_(j, i);
      const double y = gram_(j, k);
      gram_(j, i) = c * x + s * y;
      gram_(j, k) = c * y - s * x;
    }
    return;
  }
  const auto& g = std::get<Constant>(gate);
  const auto i = static_cast<Eigen::Index>(g.i - 1);
  gram_.row(i) *= g.c;
  gram_.col(i) *= g.c;
  if (std::abs(g.c) == 1.0) return;
  if (!kappa_from_diagonal_gram()) recompute(state);
}

void ConditionTracker::recompute(const TrackedState& state) {
  ++svd_count_;
  kappa_ = condition_number(state.m(), floor_);
}

bool ConditionTracker::kappa_from_diagonal_gram() {
  const Eigen::Index n = gram_.rows();
  double upper = 0.0;
  double lower = std::numeric_limits<double>::infinity();
  double min_diag = std::numeric_limits<double>::infinity();
  double max_radius = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = gram_(i, i);
    const double radius = gram_.row(i).cwiseAbs().sum() - std::abs(d);
    upper = std::max(upper, d + radius);
    lower = std::min(lower, d - radius);
    min_diag = std::min(min_diag, d);
    max_radius = std::max(max_radius, radius);
  }
  if (!(max_radius <= 1e-10 * min_diag) || !(lower > 0.0)) return false;
  if (!(std::sqrt(lower) > floor_)) {
    fail(ErrorCode::kSingular, "matrix is singular or near-singular: sigma_min = " +
                                   format_double(std::sqrt(std::max(lower, 0.0))));
  }
  kappa_ = std::sqrt(upper / lower);
  return true;
}

ConditionReport verify_well_conditioned(const GateProgram& program, double kappa_max,
                                        const RunOptions& options, Matrix* final_matrix) {
  ConditionReport report;
  report.kappa_max = kappa_max;
  ConditionTracker tracker(program.dim());
  StepObserver observe = [&](std::size_t step, const Gate& gate, const TrackedState& state) {
    try {
      tracker.observe(gate, state);
    } catch (const Error& e) {
      fail(e.code(), "step " + std::to_string(step) + ": " + e.what());
    }
    if (tracker.kappa() > report.max_kappa) {
      report.max_kappa = tracker.kappa();
      report.argmax_step = step;
    }
  };
  TrackedState final_state = run_program(program, {observe}, options);
  if (!program.empty()) {
    try {
      tracker.recompute(final_state);
    } catch (const Error& e) {
      fail(e.code(), "step " + std::to_string(program.size()) + ": " + e.what());
    }
    if (tracker.kappa() > report.max_kappa) {
      report.max_kappa = tracker.kappa();
      report.argmax_step = program.size();
    }
  }
  report.final_kappa = tracker.kappa();
  if (final_matrix != nullptr) *final_matrix = final_state.m();
  // Relative slack for rounding in the SVD, so a bound met exactly in exact
  // arithmetic is not failed by the last bit.
  report.passed = report.max_kappa <= kappa_max * (1.0 + 1e-12);
  return report;
}

}  // namespace qel
