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

/*
 * qel.h: C interface to the quasi-entropy lab.
 *
 * Objects are opaque handles created by qel_*_create / builder functions and
 * released with the matching *_destroy. Every fallible call returns a
 * qel_status; on failure qel_last_error() holds a message for the calling
 * thread until its next failing call. Row indices are 1-based. Matrices are
 * passed as dense row-major double arrays.
 */
#ifndef QEL_QEL_H
#define QEL_QEL_H

#include <stddef.h>
#include <stdint.h>

#if defined(QEL_BUILDING_LIBRARY)
#define QEL_API __attribute__((visibility("default")))
#else
#define QEL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qel_status {
  QEL_OK = 0,
  QEL_ERR_INVALID_ARGUMENT = 1,
  QEL_ERR_OUT_OF_RANGE = 2,
  QEL_ERR_SINGULAR = 3,
  QEL_ERR_VERIFICATION = 4,
  QEL_ERR_PARSE = 5,
  QEL_ERR_IO = 6,
  QEL_ERR_DESYNC = 7,
  QEL_ERR_BOUND_VIOLATION = 8,
  QEL_ERR_BUFFER_TOO_SMALL = 9,
  QEL_ERR_INTERNAL = 99
} qel_status;

QEL_API const char* qel_status_string(qel_status status);
QEL_API const char* qel_last_error(void);

/* ---- programs --------------------------------------------------------- */

typedef struct qel_program qel_program;

typedef enum qel_gate_kind { QEL_GATE_ROTATION = 0, QEL_GATE_CONSTANT = 1 } qel_gate_kind;

typedef struct qel_gate {
  qel_gate_kind kind;
  size_t i;
  size_t i2;    /* rotations only */
  double param; /* theta for rotations, c for constants */
} qel_gate;

QEL_API qel_status qel_program_create(size_t n, qel_program** out);
QEL_API void qel_program_destroy(qel_program* program);
QEL_API qel_status qel_program_add_rotation(qel_program* program, size_t i, size_t i2, double theta);
QEL_API qel_status qel_program_add_constant(qel_program* program, size_t i, double c);
QEL_API size_t qel_program_dim(const qel_program* program);
QEL_API size_t qel_program_size(const qel_program* program);
QEL_API size_t qel_program_rotation_count(const qel_program* program);
QEL_API qel_status qel_program_gate(const qel_program* program, size_t index, qel_gate* out);

/* Text form: "n <dim> m <count>", then "R i i' theta" / "C i c" lines.
 * Serialization writes at most `capacity` bytes including the terminating
 * NUL and always stores the required size (with NUL) in *required. */
QEL_API qel_status qel_program_serialize(const qel_program* program, const char* header_comment, char* buffer,
                                         size_t capacity, size_t* required);
QEL_API qel_status qel_program_parse(const char* text, qel_program** out);
QEL_API qel_status qel_program_load(const char* path, qel_program** out);
QEL_API qel_status qel_program_save(const qel_program* program, const char* header_comment, const char* path);

/* out: n*n doubles, the realized matrix M^(m). */
QEL_API qel_status qel_program_matrix(const qel_program* program, double* out);

typedef struct qel_condition_report {
  double max_kappa;
  size_t argmax_step;
  double final_kappa;
  int passed;
} qel_condition_report;

QEL_API qel_status qel_verify_well_conditioned(const qel_program* program, double kappa_max,
                                               qel_condition_report* out);
/* m: n*n doubles. */
QEL_API qel_status qel_condition_number(size_t n, const double* m, double* out);

/* ---- transforms ------------------------------------------------------- */

QEL_API qel_status qel_wht_matrix(size_t n, double* out);
QEL_API qel_status qel_fast_wht_program(size_t n, qel_program** out);
QEL_API qel_status qel_kron_rotation_layer(size_t n, size_t stage, double theta, qel_program** out);
/* In place, length n. */
QEL_API qel_status qel_fast_apply_wht(size_t n, double* x);

/* ---- Fourier perturbation -------------------------------------------- */

typedef enum qel_route { QEL_ROUTE_APPENDIX_B = 0, QEL_ROUTE_FAST_KRONECKER = 1 } qel_route;

typedef struct qel_plan_info {
  double kappa_certificate;
  double realized_error;
} qel_plan_info;

QEL_API qel_status qel_perturbation_matrix(size_t n, double eps, double* out);
QEL_API qel_status qel_exact_inverse_perturbation(size_t n, double eps, double* out);
/* Program for Id + eps F, verified before it is returned. */
QEL_API qel_status qel_synth_perturbation(size_t n, double eps, qel_route route, qel_program** out,
                                          qel_plan_info* info);
/* Header line content "route=... n=... eps=... kappa=..." (see serialize for buffer rules). */
QEL_API qel_status qel_plan_header(size_t n, double eps, qel_route route, double kappa, char* buffer,
                                   size_t capacity, size_t* required);

/* ---- potentials ------------------------------------------------------- */

typedef struct qel_potential qel_potential;

typedef enum qel_potential_kind {
  QEL_POTENTIAL_PLAIN = 0,
  QEL_POTENTIAL_PRECOND_ID_F = 1,
  QEL_POTENTIAL_HAT_PQ = 2
} qel_potential_kind;

QEL_API qel_status qel_potential_create(qel_potential_kind kind, size_t n, qel_potential** out);
/* k slices; a[p], b[p] each n*n. */
QEL_API qel_status qel_potential_from_slices(size_t n, size_t k, const double* const* a, const double* const* b,
                                             qel_potential** out);
/* p, q: n x 2n each. */
QEL_API qel_status qel_potential_hat(size_t n, const double* p, const double* q, qel_potential** out);
/* Slice file: blocks "n <rows> <cols>" + row-major values. */
QEL_API qel_status qel_potential_load(const char* path, qel_potential** out);
QEL_API void qel_potential_destroy(qel_potential* potential);
QEL_API size_t qel_potential_dim(const qel_potential* potential);
QEL_API size_t qel_potential_slices(const qel_potential* potential);
/* Value at the nonsingular matrix m (n*n). */
QEL_API qel_status qel_potential_evaluate(const qel_potential* potential, const double* m, double* out);

QEL_API double qel_entropy_kernel(double x);

/* ---- traces ----------------------------------------------------------- */

typedef struct qel_trace_record {
  size_t step; /* 0 is the initial state */
  int has_gate;
  qel_gate gate;
  double potential;
  double delta;
  int has_bound; /* one-slice potentials, rotation steps */
  double bound;
  double kappa; /* NaN when not tracked */
} qel_trace_record;

/* Return nonzero to abort the trace (reported as QEL_ERR_INTERNAL). */
typedef int (*qel_trace_callback)(const qel_trace_record* record, void* user);

typedef struct qel_trace_options {
  size_t recompute_every; /* 0 disables periodic recomputation */
  int track_kappa;
  int enforce_theorem2;
  double theorem2_tolerance;
} qel_trace_options;

QEL_API qel_trace_options qel_trace_default_options(void);

typedef struct qel_trace_summary {
  size_t steps;
  double initial;
  double final_value;
  double delta_sum;
  double max_abs_delta;
  double max_bound_ratio;
  size_t theorem2_violations;
  double max_constant_delta;
  double max_kappa;
  double max_recompute_discrepancy;
} qel_trace_summary;

QEL_API qel_status qel_trace(const qel_program* program, const qel_potential* potential,
                             const qel_trace_options* options, qel_trace_callback callback, void* user,
                             qel_trace_summary* out);

typedef struct qel_perturbation_run {
  double kappa_certificate;
  size_t gate_count;
  size_t rotation_count;
  double endpoint;
  double direct_endpoint;
  double max_abs_delta;
  double drift_ratio;       /* max |delta| / (eps log2(1/eps)) */
  double lower_bound_steps; /* (n log2 n) / log2(1/eps) */
  double gate_ratio;        /* gate_count / lower_bound_steps */
  double max_recompute_discrepancy;
} qel_perturbation_run;

/* Synthesizes Id + eps F along `route` and traces `potential` over it. */
QEL_API qel_status qel_run_perturbation(size_t n, double eps, qel_route route, const qel_potential* potential,
                                        const qel_trace_options* options, qel_trace_callback callback, void* user,
                                        qel_perturbation_run* out);

/* ---- sweeps and campaigns -------------------------------------------- */

typedef struct qel_endpoint_values {
  size_t n;
  double eps;
  double plain, plain_scale, plain_ratio;
  double precond, precond_scale, precond_ratio;
  double hat, hat_scale, hat_ratio;
} qel_endpoint_values;

/* out: count_n * count_eps entries, n outer, eps inner. threads = 0 means 1. */
QEL_API qel_status qel_scaling_sweep(const size_t* ns, size_t count_n, const double* eps, size_t count_eps,
                                     unsigned threads, qel_endpoint_values* out);

typedef struct qel_theorem2_config {
  size_t n;
  size_t gates;
  double rotation_fraction;
  size_t random_preconditioners;
  double preconditioner_norm;
  uint64_t seed;
  double tolerance;
} qel_theorem2_config;

QEL_API qel_theorem2_config qel_theorem2_default_config(void);

typedef struct qel_theorem2_report {
  size_t rotations_checked;
  size_t violations;
  double max_ratio;
  size_t histogram[10];
  size_t first_violation_step; /* 0 when none */
} qel_theorem2_report;

/* When a violation occurs and offending != NULL, *offending receives the program. */
QEL_API qel_status qel_verify_theorem2(const qel_theorem2_config* config, qel_theorem2_report* out,
                                       qel_program** offending);
/* Rotation-bound right-hand side for M (n*n) with one slice (a, b), rows 1-based. */
QEL_API qel_status qel_theorem2_bound(size_t n, const double* m, const double* a, const double* b, size_t i,
                                      size_t i2, double* out);

typedef struct qel_lemma_report {
  double lhs;
  double rhs;
  double margin;
  int holds;
  size_t big_count;
  size_t small_count;
  int small_hypothesis;
} qel_lemma_report;

/* x, y: ell doubles each. */
QEL_API qel_status qel_lemma_sample(size_t ell, double c, double norm1, uint64_t seed, double* x, double* y);
QEL_API qel_status qel_lemma_check(size_t ell, const double* x, const double* y, double c, qel_lemma_report* out);

typedef struct qel_lemma_row {
  uint64_t seed;
  size_t ell;
  double c;
  double norm1;
  qel_lemma_report report;
} qel_lemma_row;

typedef int (*qel_lemma_callback)(const qel_lemma_row* row, void* user);

typedef struct qel_lemma_campaign_report {
  size_t instances;
  size_t violations;
  double min_margin;
} qel_lemma_campaign_report;

QEL_API qel_status qel_lemma_campaign(const size_t* ells, size_t count_ell, size_t instances_per_ell, double c,
                                      uint64_t seed, qel_lemma_callback callback, void* user,
                                      qel_lemma_campaign_report* out);

#ifdef __cplusplus
}
#endif

#endif /* QEL_QEL_H */
