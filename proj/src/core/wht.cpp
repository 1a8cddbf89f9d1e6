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

#include "core/wht.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "core/error.hpp"

namespace qel {

namespace {

void require_power_of_two(std::size_t n, const char* what) {
  if (!is_power_of_two(n)) {
    fail(ErrorCode::kInvalidArgument, std::string(what) + ": " + std::to_string(n) + " is not a power of two");
  }
}

}  // namespace

Matrix wht_matrix(std::size_t n) {
  require_power_of_two(n, "wht_matrix");
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  const auto dim = static_cast<Eigen::Index>(n);
  Matrix f(dim, dim);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      f(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = wht_sign(i, j) * scale;
    }
  }
  return f;
}

GateProgram fast_wht_program(std::size_t n) {
  require_power_of_two(n, "fast_wht_program");
  if (n < 2) fail(ErrorCode::kInvalidArgument, "fast_wht_program needs n >= 2");
  GateProgram program(n);
  const unsigned k = log2_floor(n);
  program.reserve(n * k);
  constexpr double kQuarterTurn = std::numbers::pi / 4.0;
  for (std::size_t h = 1; h < n; h <<= 1) {
    for (std::size_t block = 0; block < n; block += 2 * h) {
      for (std::size_t a = block; a < block + h; ++a) {
        program.add_rotation(a + 1, a + h + 1, kQuarterTurn);
        program.add_constant(a + h + 1, -1.0);
      }
    }
  }
  return program;
}

GateProgram kron_rotation_layer(std::size_t n, std::size_t stage, double theta) {
  require_power_of_two(n, "kron_rotation_layer");
  const unsigned k = log2_floor(n);
  if (stage < 1 || stage > k) {
    fail(ErrorCode::kInvalidArgument,
         "stage " + std::to_string(stage) + " outside [1, " + std::to_string(k) + "]");
  }
  const std::size_t h = std::size_t{1} << (k - stage);
  GateProgram layer(n);
  layer.reserve(n / 2);
  for (std::size_t block = 0; block < n; block += 2 * h) {
    for (std::size_t a = block; a < block + h; ++a) layer.add_rotation(a + 1, a + h + 1, theta);
  }
  return layer;
}

void fast_apply_wht_inplace(std::span<double> x) {
  const std::size_t n = x.size();
  require_power_of_two(n, "fast_apply_wht");
  for (std::size_t h = 1; h < n; h <<= 1) {
    for (std::size_t block = 0; block < n; block += 2 * h) {
      for (std::size_t a = block; a < block + h; ++a) {
        const double u = x[a];
        const double v = x[a + h];
        x[a] = u + v;
        x[a + h] = u - v;
      }
    }
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (auto& v : x) v *= scale;
}

std::vector<double> fast_apply_wht(std::span<const double> x) {
  std::vector<double> out(x.begin(), x.end());
  fast_apply_wht_inplace(out);
  return out;
}

Matrix multiply_wht_right(const Matrix& m) {
  Matrix out = m;
  const auto cols = static_cast<std::size_t>(out.cols());
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    fast_apply_wht_inplace(std::span<double>(out.row(r).data(), cols));
  }
  return out;
}

}  // namespace qel
