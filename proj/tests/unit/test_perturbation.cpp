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

#include <cmath>
#include <numbers>
#include <random>

#include "core/conditioning.hpp"
#include "core/error.hpp"
#include "core/perturbation.hpp"
#include "core/state.hpp"
#include "core/wht.hpp"

namespace qel {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(Perturbation, MatrixSmallCases) {
  EXPECT_EQ(perturbation_matrix(2, 0.0), Matrix::Identity(2, 2));
  const double h = 0.1 / std::sqrt(2.0);
  Matrix expect(2, 2);
  expect << 1 + h, h, h, 1 - h;
  EXPECT_LT((perturbation_matrix(2, 0.1) - expect).norm(), 1e-16);
  const Matrix m = perturbation_matrix(32, 0.2);
  EXPECT_EQ(m, m.transpose());
}

TEST(Perturbation, EpsRange) {
  EXPECT_THROW(perturbation_matrix(4, -0.1), Error);
  EXPECT_THROW(perturbation_matrix(4, 0.5), Error);
  EXPECT_THROW(perturbation_matrix(6, 0.1), Error);
}

TEST(Perturbation, ExactInverseByMultiplication) {
  for (std::size_t n = 2; n <= 512; n *= 2) {
    const Matrix prod = perturbation_matrix(n, 0.1) * exact_inverse_perturbation(n, 0.1);
    EXPECT_LT((prod - Matrix::Identity(prod.rows(), prod.cols())).cwiseAbs().maxCoeff(), 1e-12) << n;
  }
  EXPECT_EQ(exact_inverse_perturbation(8, 0.0), Matrix::Identity(8, 8));
}

TEST(Perturbation, ResidualSpectralNorm) {
  for (double eps : {0.1, 0.25, 1.0 / 64}) {
    const Matrix z = perturbation_residual(64, eps);
    const double sigma = singular_values(z).maxCoeff();
    const double expect = eps * eps / (1 - eps);
    EXPECT_NEAR(sigma, expect, 1e-9 * expect);
    EXPECT_DOUBLE_EQ(perturbation_residual_norm(eps), expect);
  }
  EXPECT_NEAR(perturbation_residual_norm(0.1), 0.011111111111111112, 1e-17);
}

TEST(Perturbation, ConditionNumberOfPerturbation) {
  EXPECT_NEAR(condition_number(perturbation_matrix(8, 0.1)), 1.1 / 0.9, 1e-12);
}

TEST(Eigenbasis, TwoByTwo) {
  const auto eb = wht_eigenbasis(2);
  const double c = std::cos(kPi / 8), s = std::sin(kPi / 8);
  Matrix w(2, 2);
  w << c, -s, s, c;
  EXPECT_LT((eb.w - w).norm(), 1e-15);
  EXPECT_EQ(eb.d(0), 1.0);
  EXPECT_EQ(eb.d(1), -1.0);
  EXPECT_LT((eb.w * eb.d.asDiagonal() * eb.w.transpose() - wht_matrix(2)).norm(), 1e-14);
}

TEST(Eigenbasis, SignPatternAndOrthogonality) {
  EXPECT_EQ(wht_eigenbasis(4).d, Vector((Vector(4) << 1, -1, -1, 1).finished()));
  for (std::size_t n = 2; n <= 1024; n *= 4) {
    const auto eb = wht_eigenbasis(n);
    const auto nn = static_cast<Eigen::Index>(n);
    EXPECT_LT((eb.w.transpose() * eb.w - Matrix::Identity(nn, nn)).cwiseAbs().maxCoeff(), 1e-12);
    if (n <= 256) {
      EXPECT_LT((eb.w * eb.d.asDiagonal() * eb.w.transpose() - wht_matrix(n)).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(Givens, IdentityGivesEmptyProgram) { EXPECT_TRUE(givens_decompose(Matrix::Identity(5, 5)).empty()); }

TEST(Givens, SingleRotation) {
  const Matrix w = wht_eigenbasis(2).w;
  const GateProgram p = givens_decompose(w);
  ASSERT_EQ(p.rotation_count(), 1u);
  EXPECT_NEAR(std::abs(std::get<Rotation>(p[0]).theta), kPi / 8, 1e-14);
  EXPECT_LT((program_matrix(p) - w).norm(), 1e-14);
}

TEST(Givens, RandomOrthogonalReconstruction) {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> g;
  Matrix a(32, 32);
  for (auto& e : a.reshaped()) e = g(rng);
  const Matrix q = Eigen::HouseholderQR<Matrix>(a).householderQ();
  const GateProgram p = givens_decompose(q);
  EXPECT_LE(p.rotation_count(), 32u * 31u / 2u);
  EXPECT_LT((program_matrix(p) - q).norm(), 1e-9);
}

TEST(Givens, RejectsNonOrthogonal) {
  Matrix m = Matrix::Identity(3, 3);
  m(0, 1) = 0.5;
  EXPECT_THROW(givens_decompose(m), Error);
}

TEST(Synth, FastKroneckerN4) {
  const auto plan = synth_perturbation(4, 0.1, Route::kFastKronecker);
  EXPECT_EQ(plan.program.rotation_count(), 8u);
  ASSERT_EQ(plan.program.constant_count(), 4u);
  std::vector<double> cs;
  for (const Gate& g : plan.program.gates()) {
    if (const auto* c = std::get_if<Constant>(&g)) cs.push_back(c->c);
  }
  const double expect[] = {1.1, 0.9, 0.9, 1.1};
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(cs[k], expect[k], 1e-15);
  EXPECT_LT((program_matrix(plan.program) - perturbation_matrix(4, 0.1)).norm(), 1e-10);
}

TEST(Synth, AppendixBN4) {
  const auto plan = synth_perturbation(4, 0.1, Route::kAppendixB);
  EXPECT_LE(plan.program.rotation_count(), 12u);
  EXPECT_LT((program_matrix(plan.program) - perturbation_matrix(4, 0.1)).norm(), 1e-10);
}

TEST(Synth, ZeroEpsRealizesIdentity) {
  for (Route r : {Route::kFastKronecker, Route::kAppendixB}) {
    const auto plan = synth_perturbation(16, 0.0, r);
    for (const Gate& g : plan.program.gates()) {
      if (const auto* c = std::get_if<Constant>(&g)) {
        EXPECT_EQ(std::abs(c->c), 1.0);
      }
    }
    EXPECT_LT((program_matrix(plan.program) - Matrix::Identity(16, 16)).norm(), 1e-10);
  }
}

TEST(Synth, CertificatesAcrossSizes) {
  for (Route r : {Route::kFastKronecker, Route::kAppendixB}) {
    for (std::size_t n = 2; n <= 64; n *= 2) {
      for (double eps : {0.125, 0.05, 1.0 / 256}) {
        const auto plan = synth_perturbation(n, eps, r);
        EXPECT_LE(plan.realized_error, 1e-9 * static_cast<double>(n));
        EXPECT_LE(plan.kappa_certificate, (1 + eps) / (1 - eps) + 1e-9);
        const auto report = verify_well_conditioned(plan.program, (1 + eps) / (1 - eps) + 1e-9);
        EXPECT_TRUE(report.passed);
      }
    }
  }
}

TEST(Synth, FastKroneckerGateCount) {
  for (std::size_t n = 2; n <= 512; n *= 2) {
    const auto plan = synth_perturbation(n, 1.0 / 16, Route::kFastKronecker);
    const std::size_t k = static_cast<std::size_t>(std::log2(static_cast<double>(n)));
    EXPECT_EQ(plan.program.size(), n * k + n);
  }
}

// Clustered singular values of this realized matrix once broke the SVD.
TEST(Synth, ClusteredSpectrumCertificate) {
  const double eps = std::ldexp(1.0, -7);
  const auto plan = synth_perturbation(16, eps, Route::kFastKronecker);
  EXPECT_NEAR(plan.kappa_certificate, (1 + eps) / (1 - eps), 1e-12);
  const Vector sv = singular_values(program_matrix(plan.program));
  EXPECT_NEAR(sv(0), 1 + eps, 1e-13);
  EXPECT_NEAR(sv(15), 1 - eps, 1e-13);
}

TEST(Synth, WellConditionedAtSixteen) {
  const auto plan = synth_perturbation(16, 0.05, Route::kFastKronecker);
  EXPECT_TRUE(verify_well_conditioned(plan.program, 1.05 / 0.95).passed);
}

TEST(Synth, RouteNames) {
  EXPECT_EQ(parse_route("appendix-b"), Route::kAppendixB);
  EXPECT_EQ(parse_route("fast"), Route::kFastKronecker);
  EXPECT_EQ(route_name(Route::kFastKronecker), "FastKronecker");
  EXPECT_THROW(parse_route("slow"), Error);
}

}  // namespace
}  // namespace qel
