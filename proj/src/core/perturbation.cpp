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

#include "core/perturbation.hpp"

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "core/conditioning.hpp"
#include "core/error.hpp"
#include "core/state.hpp"
#include "core/wht.hpp"

namespace qel {

namespace {

void check_args(std::size_t n, double eps) {
  if (!is_power_of_two(n)) {
    fail(ErrorCode::kInvalidArgument, "perturbation dimension " + std::to_string(n) + " is not a power of two");
  }
  if (!(eps >= 0.0 && eps < 0.5)) {
    fail(ErrorCode::kInvalidArgument, "eps = " + format_double(eps) + " outside [0, 1/2)");
  }
}

}  // namespace

Matrix perturbation_matrix(std::size_t n, double eps) {
  check_args(n, eps);
  const auto dim = static_cast<Eigen::Index>(n);
  return Matrix::Identity(dim, dim) + eps * wht_matrix(n);
}

Matrix exact_inverse_perturbation(std::size_t n, double eps) {
  check_args(n, eps);
  const auto dim = static_cast<Eigen::Index>(n);
  return (Matrix::Identity(dim, dim) - eps * wht_matrix(n)) / (1.0 - eps * eps);
}

Matrix perturbation_residual(std::size_t n, double eps) {
  check_args(n, eps);
  const auto dim = static_cast<Eigen::Index>(n);
  return (eps * eps / (1.0 - eps * eps)) * (Matrix::Identity(dim, dim) - eps * wht_matrix(n));
}

WhtEigenbasis wht_eigenbasis(std::size_t n) {
  if (!is_power_of_two(n)) {
    fail(ErrorCode::kInvalidArgument, "eigenbasis dimension " + std::to_string(n) + " is not a power of two");
  }
  const double c = std::cos(std::numbers::pi / 8.0);
  const double s = std::sin(std::numbers::pi / 8.0);
  // Entries of the 2x2 factor indexed by (row bit, column bit).
  const double factor[2][2] = {{c, -s}, {s, c}};
  const unsigned k = log2_floor(n);
  const auto dim = static_cast<Eigen::Index>(n);
  WhtEigenbasis out{Matrix(dim, dim), Vector(dim)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double v = 1.0;
      for (unsigned b = 0; b < k; ++b) v *= factor[(i >> b) & 1][(j >> b) & 1];
      out.w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
    }
    out.d(static_cast<Eigen::Index>(i)) = (__builtin_popcountll(i) & 1) ? -1.0 : 1.0;
  }
  return out;
}

GateProgram givens_decompose(const Matrix& orthogonal, double tol) {
  const Eigen::Index n = orthogonal.rows();
  if (n == 0 || orthogonal.cols() != n) {
    fail(ErrorCode::kInvalidArgument, "givens_decompose needs a nonempty square matrix");
  }
  Matrix gram = orthogonal.transpose() * orthogonal;
  gram.diagonal().array() -= 1.0;
  if (!(max_abs_entry(gram) <= tol)) {
    fail(ErrorCode::kInvalidArgument,
         "matrix is not orthogonal: max|Q^T Q - Id| = " + format_double(max_abs_entry(gram)));
  }

  Matrix work = orthogonal;
  std::vector<Rotation> eliminations;
  for (Eigen::Index col = 0; col + 1 < n; ++col) {
    for (Eigen::Index row = n - 1; row > col; --row) {
      const double below = work(row, col);
      if (below == 0.0) continue;
      const double above = work(row - 1, col);
      const double theta = std::atan2(below, above);
      rotate_rows(work, row - 1, row, std::cos(theta), std::sin(theta));
      work(row, col) = 0.0;
      eliminations.push_back(Rotation{static_cast<std::size_t>(row), static_cast<std::size_t>(row + 1), theta});
    }
  }

  GateProgram program(static_cast<std::size_t>(n));
  program.reserve(eliminations.size() + static_cast<std::size_t>(n));
  Matrix residue = work;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = work(i, i);
    if (!(std::abs(std::abs(d) - 1.0) <= tol)) {
      fail(ErrorCode::kInvalidArgument, "triangular residue is not +-1 on the diagonal (entry " +
                                            std::to_string(i + 1) + " = " + format_double(d) + ")");
    }
    residue(i, i) -= d > 0.0 ? 1.0 : -1.0;
    if (d < 0.0) program.add_constant(static_cast<std::size_t>(i + 1), -1.0);
  }
  if (!(max_abs_entry(residue) <= tol)) {
    fail(ErrorCode::kInvalidArgument, "triangular residue is not diagonal: max off-diagonal " +
                                          format_double(max_abs_entry(residue)));
  }
  // Q_r ... Q_1 X = D, so X = Q_1^T ... Q_r^T D: signs first, then the
  // transposed eliminations in reverse.
  for (auto it = eliminations.rbegin(); it != eliminations.rend(); ++it) {
    program.add_rotation(it->i, it->i2, -it->theta);
  }
  return program;
}

std::string_view route_name(Route route) {
  return route == Route::kAppendixB ? "AppendixB" : "FastKronecker";
}

Route parse_route(std::string_view name) {
  if (name == "AppendixB" || name == "appendix-b") return Route::kAppendixB;
  if (name == "FastKronecker" || name == "fast") return Route::kFastKronecker;
  fail(ErrorCode::kInvalidArgument, "unknown route '" + std::string(name) + "'");
}

PerturbationPlan synth_perturbation(std::size_t n, double eps, Route route) {
  check_args(n, eps);
  PerturbationPlan plan;
  plan.n = n;
  plan.eps = eps;
  plan.route = route;
  const WhtEigenbasis basis = wht_eigenbasis(n);
  const unsigned k = log2_floor(n);

  GateProgram program(n);
  if (route == Route::kAppendixB) {
    program.append(givens_decompose(basis.w.transpose()));
  } else {
    // W^T has 2x2 factor [[c, s], [-s, c]], the gate block at +pi/8.
    for (unsigned stage = 1; stage <= k; ++stage) {
      program.append(kron_rotation_layer(n, stage, std::numbers::pi / 8.0));
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    program.add_constant(i + 1, 1.0 + eps * basis.d(static_cast<Eigen::Index>(i)));
  }
  if (route == Route::kAppendixB) {
    program.append(givens_decompose(basis.w));
  } else {
    for (unsigned stage = 1; stage <= k; ++stage) {
      program.append(kron_rotation_layer(n, stage, -std::numbers::pi / 8.0));
    }
  }

  const double kappa_bound = (1.0 + eps) / (1.0 - eps) + 1e-9;
  RunOptions run;
  run.crosscheck_every = 0;
  Matrix realized;
  const ConditionReport report = verify_well_conditioned(program, kappa_bound, run, &realized);
  plan.kappa_certificate = report.max_kappa;
  plan.realized_error = (realized - perturbation_matrix(n, eps)).norm();
  if (!(plan.realized_error <= 1e-9 * static_cast<double>(n))) {
    fail(ErrorCode::kVerificationFailed, std::string(route_name(route)) + " program misses Id + eps F by " +
                                             format_double(plan.realized_error) + " (Frobenius)");
  }
  if (!report.passed) {
    fail(ErrorCode::kVerificationFailed, std::string(route_name(route)) + " program reaches kappa " +
                                             format_double(report.max_kappa) + " at step " +
                                             std::to_string(report.argmax_step) + ", above " +
                                             format_double(kappa_bound));
  }
  plan.program = std::move(program);
  return plan;
}

std::string plan_header(const PerturbationPlan& plan) {
  return "route=" + std::string(route_name(plan.route)) + " n=" + std::to_string(plan.n) +
         " eps=" + format_double(plan.eps) + " kappa=" + format_double(plan.kappa_certificate);
}

}  // namespace qel
