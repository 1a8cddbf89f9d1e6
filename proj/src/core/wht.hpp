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
#include <span>
#include <vector>

#include "core/gate.hpp"
#include "core/linalg.hpp"

namespace qel {

// Normalized Walsh-Hadamard matrix: F(i,j) = n^{-1/2} (-1)^{<i-1, j-1>}.
Matrix wht_matrix(std::size_t n);

// Sign of F(i,j) for 0-based indices.
inline double wht_sign(std::size_t i, std::size_t j) {
  return (__builtin_popcountll(static_cast<unsigned long long>(i & j)) & 1) ? -1.0 : 1.0;
}

// In-place butterflies, low bit to high bit. Each butterfly on the pair
// (a, b), b = a + 2^s, is Rotation(a, b, pi/4) followed by Constant(b, -1).
// (n/2) log2 n gates of each kind.
GateProgram fast_wht_program(std::size_t n);

// Id_{2^{s-1}} (x) R(theta) (x) Id_{2^{k-s}} as n/2 disjoint rotations, with
// R(theta) the 2x2 gate block [[cos, sin], [-sin, cos]]. Stage s = k acts on
// pairs differing in the lowest bit.
GateProgram kron_rotation_layer(std::size_t n, std::size_t stage, double theta);

// F x in O(n log n).
std::vector<double> fast_apply_wht(std::span<const double> x);
void fast_apply_wht_inplace(std::span<double> x);

// M F, one row at a time (F is symmetric, so each row is transformed).
Matrix multiply_wht_right(const Matrix& m);

}  // namespace qel
