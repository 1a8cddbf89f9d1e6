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

#include <qel/qel.h>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace {

constexpr double kPi = std::numbers::pi;

TEST(CApi, StatusStrings) {
  EXPECT_STREQ(qel_status_string(QEL_OK), "ok");
  EXPECT_STREQ(qel_status_string(QEL_ERR_SINGULAR), "singular matrix");
  EXPECT_STREQ(qel_status_string(static_cast<qel_status>(12345)), "unknown status");
}

TEST(CApi, ProgramLifecycleAndErrors) {
  qel_program* p = nullptr;
  ASSERT_EQ(qel_program_create(4, &p), QEL_OK);
  EXPECT_EQ(qel_program_add_rotation(p, 1, 1, 0.1), QEL_ERR_INVALID_ARGUMENT);
  EXPECT_NE(std::string(qel_last_error()).size(), 0u);
  EXPECT_EQ(qel_program_add_rotation(p, 1, 9, 0.1), QEL_ERR_OUT_OF_RANGE);
  EXPECT_EQ(qel_program_add_rotation(p, 1, 2, kPi / 4), QEL_OK);
  EXPECT_EQ(qel_program_add_constant(p, 2, -1.0), QEL_OK);
  EXPECT_EQ(qel_program_add_constant(p, 2, 0.0), QEL_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(qel_program_dim(p), 4u);
  EXPECT_EQ(qel_program_size(p), 2u);
  EXPECT_EQ(qel_program_rotation_count(p), 1u);

  qel_gate g{};
  ASSERT_EQ(qel_program_gate(p, 0, &g), QEL_OK);
  EXPECT_EQ(g.kind, QEL_GATE_ROTATION);
  EXPECT_EQ(g.i, 1u);
  EXPECT_EQ(g.i2, 2u);
  EXPECT_DOUBLE_EQ(g.param, kPi / 4);
  EXPECT_EQ(qel_program_gate(p, 2, &g), QEL_ERR_OUT_OF_RANGE);
  qel_program_destroy(p);
  qel_program_destroy(nullptr);
  EXPECT_EQ(qel_program_create(0, &p), QEL_ERR_INVALID_ARGUMENT);
}

TEST(CApi, SerializeBufferSizing) {
  qel_program* p = nullptr;
  ASSERT_EQ(qel_fast_wht_program(4, &p), QEL_OK);
  size_t need = 0;
  EXPECT_EQ(qel_program_serialize(p, "wht", nullptr, 0, &need), QEL_ERR_BUFFER_TOO_SMALL);
  ASSERT_GT(need, 1u);
  std::string buf(need, '\0');
  ASSERT_EQ(qel_program_serialize(p, "wht", buf.data(), buf.size(), &need), QEL_OK);
  qel_program* q = nullptr;
  ASSERT_EQ(qel_program_parse(buf.c_str(), &q), QEL_OK);
  EXPECT_EQ(qel_program_size(q), 8u);
  qel_program_destroy(q);
  EXPECT_EQ(qel_program_parse("n 2 m 3\n", &q), QEL_ERR_PARSE);
  EXPECT_EQ(qel_program_load("/nonexistent/p.txt", &q), QEL_ERR_IO);
  qel_program_destroy(p);
}

TEST(CApi, FastWhtMatchesMatrix) {
  const size_t n = 16;
  qel_program* p = nullptr;
  ASSERT_EQ(qel_fast_wht_program(n, &p), QEL_OK);
  std::vector<double> realized(n * n), f(n * n);
  ASSERT_EQ(qel_program_matrix(p, realized.data()), QEL_OK);
  ASSERT_EQ(qel_wht_matrix(n, f.data()), QEL_OK);
  for (size_t k = 0; k < n * n; ++k) EXPECT_NEAR(realized[k], f[k], 1e-14);
  qel_condition_report report{};
  ASSERT_EQ(qel_verify_well_conditioned(p, 1.0 + 1e-9, &report), QEL_OK);
  EXPECT_EQ(report.passed, 1);
  qel_program_destroy(p);

  std::vector<double> x{1, 0, 0, 0};
  ASSERT_EQ(qel_fast_apply_wht(4, x.data()), QEL_OK);
  for (double v : x) EXPECT_NEAR(v, 0.5, 1e-16);
  EXPECT_EQ(qel_fast_apply_wht(3, x.data()), QEL_ERR_INVALID_ARGUMENT);
}

TEST(CApi, Potentials) {
  const size_t n = 8;
  std::vector<double> f(n * n), id(n * n, 0.0);
  for (size_t i = 0; i < n; ++i) id[i * n + i] = 1.0;
  ASSERT_EQ(qel_wht_matrix(n, f.data()), QEL_OK);

  qel_potential* plain = nullptr;
  ASSERT_EQ(qel_potential_create(QEL_POTENTIAL_PLAIN, n, &plain), QEL_OK);
  double v = 0;
  ASSERT_EQ(qel_potential_evaluate(plain, f.data(), &v), QEL_OK);
  EXPECT_NEAR(v, 24.0, 1e-12);
  std::vector<double> singular(n * n, 0.0);
  EXPECT_EQ(qel_potential_evaluate(plain, singular.data(), &v), QEL_ERR_SINGULAR);
  qel_potential_destroy(plain);

  const double* a[] = {id.data()};
  const double* b[] = {f.data()};
  qel_potential* pre = nullptr;
  ASSERT_EQ(qel_potential_from_slices(n, 1, a, b, &pre), QEL_OK);
  ASSERT_EQ(qel_potential_evaluate(pre, id.data(), &v), QEL_OK);
  EXPECT_EQ(v, 0.0);
  EXPECT_EQ(qel_potential_slices(pre), 1u);
  qel_potential_destroy(pre);

  qel_potential* hat = nullptr;
  ASSERT_EQ(qel_potential_create(QEL_POTENTIAL_HAT_PQ, n, &hat), QEL_OK);
  EXPECT_EQ(qel_potential_slices(hat), 2u);
  std::vector<double> m(n * n);
  ASSERT_EQ(qel_perturbation_matrix(n, 0.125, m.data()), QEL_OK);
  ASSERT_EQ(qel_potential_evaluate(hat, m.data(), &v), QEL_OK);
  EXPECT_GT(v, 0.0);
  qel_potential_destroy(hat);

  EXPECT_DOUBLE_EQ(qel_entropy_kernel(0.5), -0.5);
  EXPECT_EQ(qel_potential_load("/nonexistent/s.txt", &hat), QEL_ERR_IO);
}

struct Collected {
  std::vector<qel_trace_record> rows;
  size_t stop_after = 0;
};

int collect(const qel_trace_record* r, void* user) {
  auto* c = static_cast<Collected*>(user);
  c->rows.push_back(*r);
  return c->stop_after != 0 && c->rows.size() >= c->stop_after;
}

TEST(CApi, TraceStreamsRecords) {
  qel_program* p = nullptr;
  ASSERT_EQ(qel_fast_wht_program(2, &p), QEL_OK);
  qel_potential* plain = nullptr;
  ASSERT_EQ(qel_potential_create(QEL_POTENTIAL_PLAIN, 2, &plain), QEL_OK);
  Collected c;
  qel_trace_summary s{};
  const qel_trace_options opt = qel_trace_default_options();
  ASSERT_EQ(qel_trace(p, plain, &opt, collect, &c, &s), QEL_OK);
  ASSERT_EQ(c.rows.size(), 3u);
  EXPECT_EQ(c.rows[0].has_gate, 0);
  EXPECT_EQ(c.rows[1].gate.kind, QEL_GATE_ROTATION);
  EXPECT_NEAR(c.rows[1].delta, 2.0, 1e-14);
  EXPECT_EQ(c.rows[1].has_bound, 1);
  EXPECT_EQ(c.rows[2].delta, 0.0);
  EXPECT_NEAR(s.final_value, 2.0, 1e-14);

  Collected stop;
  stop.stop_after = 2;
  EXPECT_EQ(qel_trace(p, plain, nullptr, collect, &stop, nullptr), QEL_ERR_INTERNAL);
  EXPECT_EQ(stop.rows.size(), 2u);

  qel_potential* wrong = nullptr;
  ASSERT_EQ(qel_potential_create(QEL_POTENTIAL_PLAIN, 4, &wrong), QEL_OK);
  EXPECT_EQ(qel_trace(p, wrong, nullptr, nullptr, nullptr, nullptr), QEL_ERR_INVALID_ARGUMENT);
  qel_potential_destroy(wrong);
  qel_potential_destroy(plain);
  qel_program_destroy(p);
}

TEST(CApi, PerturbationSynthesisAndRun) {
  qel_program* p = nullptr;
  qel_plan_info info{};
  ASSERT_EQ(qel_synth_perturbation(8, 0.125, QEL_ROUTE_FAST_KRONECKER, &p, &info), QEL_OK);
  EXPECT_EQ(qel_program_size(p), 8u * 3u + 8u);
  EXPECT_LE(info.kappa_certificate, 1.125 / 0.875 + 1e-9);
  std::vector<double> realized(64), expect(64), inv(64);
  ASSERT_EQ(qel_program_matrix(p, realized.data()), QEL_OK);
  ASSERT_EQ(qel_perturbation_matrix(8, 0.125, expect.data()), QEL_OK);
  for (size_t k = 0; k < 64; ++k) EXPECT_NEAR(realized[k], expect[k], 1e-12);
  ASSERT_EQ(qel_exact_inverse_perturbation(8, 0.125, inv.data()), QEL_OK);
  qel_program_destroy(p);
  EXPECT_EQ(qel_synth_perturbation(8, 0.6, QEL_ROUTE_APPENDIX_B, &p, nullptr), QEL_ERR_INVALID_ARGUMENT);

  char header[128];
  size_t need = 0;
  ASSERT_EQ(qel_plan_header(8, 0.125, QEL_ROUTE_APPENDIX_B, 1.25, header, sizeof header, &need), QEL_OK);
  EXPECT_NE(std::string(header).find("AppendixB"), std::string::npos);

  qel_potential* hat = nullptr;
  ASSERT_EQ(qel_potential_create(QEL_POTENTIAL_HAT_PQ, 64, &hat), QEL_OK);
  qel_perturbation_run run{};
  ASSERT_EQ(qel_run_perturbation(64, 1.0 / 64, QEL_ROUTE_FAST_KRONECKER, hat, nullptr, nullptr, nullptr, &run),
            QEL_OK);
  EXPECT_NEAR(run.endpoint, run.direct_endpoint, 1e-8);
  EXPECT_NEAR(run.direct_endpoint, 11.770643541661375, 1e-9);
  EXPECT_EQ(run.gate_count, 64u * 6u + 64u);
  qel_potential_destroy(hat);
}

TEST(CApi, SweepTheoremAndLemma) {
  const size_t ns[] = {64, 128};
  const double eps[] = {0.125};
  qel_endpoint_values values[2];
  ASSERT_EQ(qel_scaling_sweep(ns, 2, eps, 1, 0, values), QEL_OK);
  EXPECT_EQ(values[1].n, 128u);
  EXPECT_LT(values[0].plain, 0.0);
  EXPECT_NEAR(values[0].hat, 95.63647877599865, 1e-9 * 95.6);

  qel_theorem2_config config = qel_theorem2_default_config();
  config.n = 16;
  config.gates = 500;
  qel_theorem2_report report{};
  qel_program* offending = reinterpret_cast<qel_program*>(0x1);
  ASSERT_EQ(qel_verify_theorem2(&config, &report, &offending), QEL_OK);
  EXPECT_EQ(report.violations, 0u);
  EXPECT_EQ(offending, nullptr);

  // Tightness witness: R(1,2,pi/4) from the identity with A = B = Id.
  std::vector<double> id(16, 0.0);
  for (int i = 0; i < 4; ++i) id[i * 4 + i] = 1.0;
  double bound = 0;
  ASSERT_EQ(qel_theorem2_bound(4, id.data(), id.data(), id.data(), 1, 2, &bound), QEL_OK);
  EXPECT_NEAR(bound, 2.0, 1e-15);
  EXPECT_EQ(qel_theorem2_bound(4, id.data(), id.data(), id.data(), 1, 5, &bound), QEL_ERR_OUT_OF_RANGE);

  std::vector<double> x(256), y(256);
  ASSERT_EQ(qel_lemma_sample(256, 0.125, 0.5, 3, x.data(), y.data()), QEL_OK);
  qel_lemma_report lr{};
  ASSERT_EQ(qel_lemma_check(256, x.data(), y.data(), 0.125, &lr), QEL_OK);
  EXPECT_EQ(lr.holds, 1);
  EXPECT_EQ(qel_lemma_sample(256, 0.5, 0.5, 3, x.data(), y.data()), QEL_ERR_INVALID_ARGUMENT);

  const size_t ells[] = {64};
  qel_lemma_campaign_report cr{};
  ASSERT_EQ(qel_lemma_campaign(ells, 1, 100, 0.125, 1, nullptr, nullptr, &cr), QEL_OK);
  EXPECT_EQ(cr.instances, 100u);
  EXPECT_EQ(cr.violations, 0u);
  EXPECT_EQ(qel_lemma_campaign(ells, 1, 100, 0.2, 1, nullptr, nullptr, &cr), QEL_ERR_INVALID_ARGUMENT);
}

}  // namespace
