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
#include <string>
#include <string_view>

#include "core/gate.hpp"
#include "core/linalg.hpp"

namespace qel {

// Id + eps F for the Walsh-Hadamard matrix F; eps in [0, 1/2).
Matrix perturbation_matrix(std::size_t n, double eps);

// (Id - eps F) / (1 - eps^2), exact since F^2 = Id.
Matrix exact_inverse_perturbation(std::size_t n, double eps);

// Z = (Id + eps F)^{-1} - (Id - eps F) = eps^2/(1 - eps^2) (Id - eps F).
Matrix perturbation_residual(std::size_t n, double eps);

// Closed-form ||Z||_2 = eps^2 / (1 - eps).
inline double perturbation_residual_norm(double eps) { return eps * eps / (1.0 - eps); }

// F = W diag(d) W^T with W = R(pi/8)^{(x) log2 n}, R(t) = [[cos t, -sin t], [sin t, cos t]],
// and d_i = (-1)^{popcount(i-1)}.
struct WhtEigenbasis {
  Matrix w;
  Vector d;
};

WhtEigenbasis wht_eigenbasis(std::size_t n);

// Givens triangularization of an orthogonal matrix: subdiagonal entries are
// zeroed column by column, bottom-up, with rotations on adjacent rows
// (entries already exactly zero emit nothing). The leftover diagonal is +-1
// and becomes sign gates, which run first. At most n(n-1)/2 rotations.
// Error(kInvalidArgument) if the input is not orthogonal within `tol`.
GateProgram givens_decompose(const Matrix& orthogonal, double tol = 1e-10);

enum class Route { kAppendixB, kFastKronecker };

std::string_view route_name(Route route);
Route parse_route(std::string_view name);

struct PerturbationPlan {
  std::size_t n = 0;
  double eps = 0.0;
  Route route = Route::kFastKronecker;
  GateProgram program{1};
  // Largest kappa(M^(t)) along the program.
  double kappa_certificate = 1.0;
  // ||realized - (Id + eps F)||_F.
  double realized_error = 0.0;
};

// Program order: gates of W^T, then one constant gate 1 + eps d_i per row,
// then gates of W. kAppendixB decomposes W and W^T with Givens rotations
// (O(n^2) gates); kFastKronecker emits each as log2 n commuting rotation
// layers (n log2 n rotations in total). The realized matrix and the
// condition certificate are verified before returning; failures raise
// Error(kVerificationFailed).
PerturbationPlan synth_perturbation(std::size_t n, double eps, Route route);

// "route=<name> n=<n> eps=<eps> kappa=<cert>"
std::string plan_header(const PerturbationPlan& plan);

}  // namespace qel
