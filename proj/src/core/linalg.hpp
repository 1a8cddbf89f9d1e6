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

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>

namespace qel {

// Row-major storage: every gate acts on rows, so row operations stay contiguous.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

inline bool is_power_of_two(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

// floor(log2(n)) for n >= 1.
inline unsigned log2_floor(std::size_t n) {
  unsigned k = 0;
  while (n > 1) {
    n >>= 1;
    ++k;
  }
  return k;
}

inline double max_abs_entry(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace qel

namespace qel {

// Applies the planar rotation [[c, s], [-s, c]] to rows r0 and r1 (0-based).
inline void rotate_rows(Matrix& m, Eigen::Index r0, Eigen::Index r1, double c, double s) {
  double* a = m.row(r0).data();
  double* b = m.row(r1).data();
  const Eigen::Index cols = m.cols();
  for (Eigen::Index j = 0; j < cols; ++j) {
    const double x = a[j];
    const double y = b[j];
    a[j] = c * x + s * y;
    b[j] = c * y - s * x;
  }
}

}  // namespace qel
