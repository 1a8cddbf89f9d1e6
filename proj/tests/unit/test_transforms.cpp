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

#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <numbers>
#include <random>

#include "core/error.hpp"
#include "core/state.hpp"
#include "core/wht.hpp"

namespace qel {
namespace {

constexpr double kPi = std::numbers::pi;

// Sylvester recursion, built independently of wht_matrix.
Matrix sylvester(std::size_t n) {
  Matrix h = Matrix::Ones(1, 1);
  while (static_cast<std::size_t>(h.rows()) < n) {
    const auto m = h.rows();
    Matrix next(2 * m, 2 * m);
    next << h, h, h, -h;
    h = next;
  }
  return h / std::sqrt(static_cast<double>(n));
}

TEST(Wht, SmallCases) {
  EXPECT_EQ(wht_matrix(1), Matrix::Ones(1, 1));
  Matrix f2(2, 2);
  f2 << 1, 1, 1, -1;
  f2 /= std::sqrt(2.0);
  EXPECT_LT((wht_matrix(2) - f2).norm(), 1e-16);
  const Matrix f4 = wht_matrix(4);
  EXPECT_LT((f4 * f4 - Matrix::Identity(4, 4)).norm(), 1e-14);
}

TEST(Wht, MatchesSylvesterAndIsSymmetricInvolution) {
  for (std::size_t n = 2; n <= 256; n *= 2) {
    const Matrix f = wht_matrix(n);
    EXPECT_LT((f - sylvester(n)).cwiseAbs().maxCoeff(), 1e-15) << n;
    EXPECT_EQ(f, f.transpose());
    EXPECT_LT((f * f - Matrix::Identity(f.rows(), f.cols())).cwiseAbs().maxCoeff(), 1e-13);
    const double mag = 1.0 / std::sqrt(static_cast<double>(n));
    EXPECT_EQ(f.cwiseAbs(), Matrix::Constant(f.rows(), f.cols(), mag));
  }
}

TEST(Wht, RejectsNonPowerOfTwo) {
  EXPECT_THROW(wht_matrix(0), Error);
  EXPECT_THROW(wht_matrix(6), Error);
  EXPECT_THROW(fast_wht_program(12), Error);
}

TEST(Wht, FastProgramN2) {
  const GateProgram p = fast_wht_program(2);
  ASSERT_EQ(p.size(), 2u);
  EXPECT_EQ(std::get<Rotation>(p[0]), (Rotation{1, 2, kPi / 4}));
  EXPECT_EQ(std::get<Constant>(p[1]), (Constant{2, -1.0}));
  EXPECT_LT((program_matrix(p) - wht_matrix(2)).norm(), 1e-15);
}

TEST(Wht, FastProgramCountsAndMatrix) {
  for (std::size_t n = 4; n <= 256; n *= 2) {
    const GateProgram p = fast_wht_program(n);
    const std::size_t expected = n / 2 * static_cast<std::size_t>(std::countr_zero(n));
    EXPECT_EQ(p.rotation_count(), expected);
    EXPECT_EQ(p.constant_count(), expected);
    EXPECT_LT((program_matrix(p) - wht_matrix(n)).norm(), 1e-12) << n;
  }
}

TEST(Wht, KronLayerPairs) {
  const GateProgram a = kron_rotation_layer(2, 1, kPi / 4);
  ASSERT_EQ(a.size(), 1u);
  EXPECT_EQ(std::get<Rotation>(a[0]), (Rotation{1, 2, kPi / 4}));

  const GateProgram b = kron_rotation_layer(4, 2, 0.3);
  ASSERT_EQ(b.size(), 2u);
  EXPECT_EQ(std::get<Rotation>(b[0]), (Rotation{1, 2, 0.3}));
  EXPECT_EQ(std::get<Rotation>(b[1]), (Rotation{3, 4, 0.3}));

  const GateProgram c = kron_rotation_layer(4, 1, 0.3);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(std::get<Rotation>(c[0]), (Rotation{1, 3, 0.3}));
  EXPECT_EQ(std::get<Rotation>(c[1]), (Rotation{2, 4, 0.3}));

  EXPECT_THROW(kron_rotation_layer(4, 0, 0.1), Error);
  EXPECT_THROW(kron_rotation_layer(4, 3, 0.1), Error);
}

TEST(Wht, LayersAtDistinctStagesCommute) {
  const double thetas[] = {0.3, -0.7, 1.1};
  GateProgram fwd(8);
  GateProgram rev(8);
  for (std::size_t s = 1; s <= 3; ++s) fwd.append(kron_rotation_layer(8, s, thetas[s - 1]));
  for (std::size_t s = 3; s >= 1; --s) rev.append(kron_rotation_layer(8, s, thetas[s - 1]));
  EXPECT_LT((program_matrix(fwd) - program_matrix(rev)).norm(), 1e-12);
}

TEST(Wht, FastApplyBasisVector) {
  std::vector<double> e1{1, 0, 0, 0};
  const auto y = fast_apply_wht(e1);
  for (double v : y) EXPECT_NEAR(v, 0.5, 1e-16);
}

TEST(Wht, FastApplyInvolutionAndDenseAgreement) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  std::vector<double> x(1024);
  for (auto& v : x) v = g(rng);
  const auto back = fast_apply_wht(fast_apply_wht(x));
  for (std::size_t k = 0; k < x.size(); ++k) EXPECT_NEAR(back[k], x[k], 1e-12);

  for (std::size_t n = 2; n <= 256; n *= 2) {
    Vector v(static_cast<Eigen::Index>(n));
    for (auto& e : v) e = g(rng);
    const Vector dense = sylvester(n) * v;
    const auto fast = fast_apply_wht(std::span<const double>(v.data(), n));
    for (std::size_t k = 0; k < n; ++k) EXPECT_NEAR(fast[k], dense(static_cast<Eigen::Index>(k)), 1e-12);
  }
}

TEST(Wht, MultiplyRight) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  Matrix m(16, 16);
  for (auto& e : m.reshaped()) e = g(rng);
  EXPECT_LT((multiply_wht_right(m) - m * sylvester(16)).cwiseAbs().maxCoeff(), 1e-13);
}

}  // namespace
}  // namespace qel
