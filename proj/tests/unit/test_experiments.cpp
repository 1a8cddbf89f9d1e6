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

#include <atomic>
#include <cmath>

#include "core/conditioning.hpp"
#include "core/error.hpp"
#include "core/experiments.hpp"
#include "core/perturbation.hpp"
#include "core/potential.hpp"
#include "core/wht.hpp"

namespace qel {
namespace {

// Direct dense evaluation at n = 64 by an independent script
// (tests/oracles/endpoint_anchors.py): eps = 2^-e, plain, precond, hat.
struct Anchor {
  int e;
  double plain, precond, hat;
};
constexpr Anchor kAnchors[] = {
    {3, -13.431187770349457, 55.8182393879993, 95.63647877599865},
    {4, -3.81454611549413, 33.09978450957423, 47.25567186578758},
    {5, -1.074139491378201, 18.576407966732894, 23.558546091448363},
    {6, -0.2991156332980106, 10.278088662575353, 11.770643541661375},
    {7, -0.08245663007036128, 5.631803342395235, 5.884244070451483},
    {8, -0.022535882861115006, 3.062054776398083, 2.9419873535120713},
};

TEST(Endpoints, MatchIndependentAnchorsAtN64) {
  for (const auto& a : kAnchors) {
    const auto v = perturbation_endpoints(64, std::ldexp(1.0, -a.e));
    EXPECT_NEAR(v.plain, a.plain, 1e-9 * std::abs(a.plain)) << a.e;
    EXPECT_NEAR(v.precond, a.precond, 1e-9 * a.precond) << a.e;
    EXPECT_NEAR(v.hat, a.hat, 1e-9 * a.hat) << a.e;
  }
}

TEST(Endpoints, ClosedFormMatchesDenseEvaluation) {
  for (std::size_t n : {4u, 32u, 128u}) {
    for (double eps : {0.2, 1.0 / 64}) {
      const auto v = perturbation_endpoints(n, eps);
      const Matrix m = perturbation_matrix(n, eps);
      EXPECT_NEAR(v.plain, quasi_entropy(m), 1e-10 * (1 + std::abs(v.plain)));
      EXPECT_NEAR(v.precond, k_slice_quasi_entropy(m, PotentialSpec::precond_id_wht(n)), 1e-9 * (1 + v.precond));
      EXPECT_NEAR(v.hat, k_slice_quasi_entropy(m, PotentialSpec::hat_wht(n)), 1e-9 * (1 + std::abs(v.hat)));
    }
  }
}

TEST(Endpoints, EpsToZeroDrivesHatToZero) {
  double prev = perturbation_endpoints(64, 0.1).hat;
  for (double eps = 0.05; eps > 1e-6; eps /= 4) {
    const double h = perturbation_endpoints(64, eps).hat;
    EXPECT_LT(h, prev);
    prev = h;
  }
  EXPECT_LT(prev, 5e-3);
}

TEST(Sweep, DeterministicAcrossThreadCounts) {
  const std::size_t ns[] = {64, 128, 256};
  const double epss[] = {0.125, 0.0625};
  const auto one = scaling_sweep(ns, epss, 1);
  const auto three = scaling_sweep(ns, epss, 3);
  ASSERT_EQ(one.size(), 6u);
  for (std::size_t k = 0; k < one.size(); ++k) {
    EXPECT_EQ(one[k].n, ns[k / 2]);
    EXPECT_EQ(one[k].eps, epss[k % 2]);
    EXPECT_EQ(one[k].plain, three[k].plain);
    EXPECT_EQ(one[k].hat, three[k].hat);
  }
}

TEST(Sweep, RejectsBadGrid) {
  const std::size_t bad_n[] = {48};
  const double eps[] = {0.1};
  EXPECT_THROW(scaling_sweep(bad_n, eps), Error);
  const std::size_t ns[] = {64};
  EXPECT_THROW(scaling_sweep(ns, std::span<const double>{}), Error);
}

TEST(ParallelFor, RunsEveryIndexOnceAndPropagatesErrors) {
  std::vector<std::atomic<int>> hits(37);
  parallel_for(hits.size(), 4, [&](std::size_t i) { ++hits[i]; });
  for (auto& h : hits) EXPECT_EQ(h.load(), 1);
  EXPECT_THROW(parallel_for(10, 3, [](std::size_t i) { if (i == 7) fail(ErrorCode::kInvalidArgument, "x"); }), Error);
}

TEST(PerturbationRun, EndpointMatchesDirectEvaluation) {
  for (Route r : {Route::kFastKronecker, Route::kAppendixB}) {
    const auto run = run_perturbation(64, 1.0 / 64, r, PotentialSpec::hat_wht(64));
    EXPECT_NEAR(run.endpoint, run.direct_endpoint, 1e-8);
    EXPECT_NEAR(run.direct_endpoint, kAnchors[3].hat, 1e-9);
    EXPECT_GT(run.drift_ratio, 0.0);
    EXPECT_TRUE(std::isfinite(run.drift_ratio));
    EXPECT_EQ(run.trace.steps, run.plan.program.size());
  }
}

TEST(PerturbationRun, SinkSeesEveryStep) {
  std::size_t rows = 0;
  const auto run = run_perturbation(16, 0.125, Route::kFastKronecker, PotentialSpec::plain(16), {},
                                    [&](std::size_t, const TraceRecord& rec) { EXPECT_EQ(rec.step, rows++); });
  EXPECT_EQ(rows, run.plan.program.size() + 1);
}

TEST(RandomProgram, DeterministicAndMixed) {
  const auto a = random_program(32, 1000, 0.9, 4);
  const auto b = random_program(32, 1000, 0.9, 4);
  EXPECT_EQ(a, b);
  EXPECT_GT(a.rotation_count(), 850u);
  EXPECT_LT(a.rotation_count(), 950u);
}

TEST(RandomProgram, PreconditionerNorm) {
  const Matrix m = random_matrix_with_norm(40, 2.0, 3);
  EXPECT_NEAR(singular_values(m).maxCoeff(), 2.0, 1e-12);
}

TEST(Theorem2Campaign, SmallCampaignHasNoViolations) {
  Theorem2Config config;
  config.n = 32;
  config.gates = 2000;
  const auto report = verify_theorem2(config);
  EXPECT_EQ(report.violations, 0u);
  EXPECT_LE(report.max_ratio, 1.0 + 1e-8);
  std::size_t total = 0;
  for (auto h : report.histogram) total += h;
  EXPECT_EQ(total, report.rotations_checked);
  EXPECT_FALSE(report.program.has_value());
}

TEST(Theorem2Campaign, ZeroAngleRotationsHaveZeroRatio) {
  // Build the trace directly so every rotation has theta = 0.
  GateProgram p(8);
  for (std::size_t i = 1; i < 8; ++i) p.add_rotation(i, i + 1, 0.0);
  const PotentialSpec spec[] = {PotentialSpec::plain(8)};
  const auto traj = trace_potentials(p, spec);
  EXPECT_EQ(traj[0].summary.max_bound_ratio, 0.0);
}

TEST(LemmaCampaign, ZeroNoiseMarginsNonNegative) {
  LemmaCampaignConfig config;
  config.ells = {64, 1024};
  config.instances_per_ell = 200;
  config.c = 0.0;
  std::size_t rows = 0;
  const auto report = run_lemma_campaign(config, [&](const LemmaRow& row) {
    ++rows;
    EXPECT_GE(row.report.margin, 0.0);
  });
  EXPECT_EQ(rows, 400u);
  EXPECT_EQ(report.violations, 0u);
}

TEST(LemmaCampaign, RejectsLargeCBeforeSampling) {
  LemmaCampaignConfig config;
  config.c = 0.2;
  bool sampled = false;
  EXPECT_THROW(run_lemma_campaign(config, [&](const LemmaRow&) { sampled = true; }), Error);
  EXPECT_FALSE(sampled);
}

TEST(LemmaCampaign, SeededRowsReproduce) {
  LemmaCampaignConfig config;
  config.ells = {256};
  config.instances_per_ell = 50;
  std::vector<double> first, second;
  run_lemma_campaign(config, [&](const LemmaRow& r) { first.push_back(r.report.lhs); });
  run_lemma_campaign(config, [&](const LemmaRow& r) { second.push_back(r.report.lhs); });
  EXPECT_EQ(first, second);
}

TEST(PotentialKinds, ParseAndBuild) {
  EXPECT_EQ(parse_potential_kind("hat-pq"), PotentialKind::kHatPQ);
  EXPECT_EQ(potential_kind_name(PotentialKind::kPrecondIdF), "precond-id-f");
  EXPECT_THROW(parse_potential_kind("bogus"), Error);
  EXPECT_EQ(make_potential(PotentialKind::kHatPQ, 8).k(), 2u);
  EXPECT_THROW(make_potential(PotentialKind::kKSlice, 8), Error);
}

}  // namespace
}  // namespace qel
