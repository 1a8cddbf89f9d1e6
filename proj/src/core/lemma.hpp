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
#include <cstdint>
#include <vector>

namespace qel {

// Entropy-with-noise inequality
//   -sum_i L(x_i + y_i) >= ||x||_1 log2(ell / ||x||_1) - 10
// under x >= 0, ||x||_1 <= 1, ||x||_inf <= 4 ||x||_1 / ell, ||y||_1 <= C ||x||_1.
struct LemmaInstance {
  std::size_t ell = 0;
  std::vector<double> x;
  std::vector<double> y;
  double c = 0.0;
};

inline constexpr double kLemmaMaxC = 0.125;
inline constexpr std::size_t kLemmaEllFloor = 64;
inline constexpr double kLemmaSlack = 10.0;
inline constexpr double kLemmaTolerance = 1e-9;

// Throws Error(kInvalidArgument) naming the violated precondition.
void validate_instance(const LemmaInstance& inst);

double lemma_lhs(const LemmaInstance& inst);
double lemma_rhs(const LemmaInstance& inst);

// Deterministic in `seed`. x has ||x||_1 = norm1_target with entries capped at
// 4 norm1_target / ell; the shape of x and the noise pattern of y vary with
// the seed. ||y||_1 is a uniform random fraction of C ||x||_1.
LemmaInstance sample_instance(std::size_t ell, double c, double norm1_target, std::uint64_t seed);

struct LemmaReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  bool holds = false;
  // Split by |y_i| >= x_i / 2.
  std::size_t big_count = 0;
  std::size_t small_count = 0;
  // Whether |x_i + y_i| <= 1/e on the small set (the proof's hypothesis);
  // reported only.
  bool small_hypothesis = true;
};

// holds := lhs >= rhs - kLemmaTolerance. Rejects invalid instances and
// ell below the floor.
LemmaReport check_lemma(const LemmaInstance& inst, std::size_t ell_floor = kLemmaEllFloor);

}  // namespace qel
