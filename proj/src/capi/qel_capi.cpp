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

#include "qel/qel.h"

#include <cmath>
#include <cstring>
#include <algorithm>
#include <exception>
#include <functional>
#include <limits>
#include <new>
#include <string>
#include <vector>

#include "core/conditioning.hpp"
#include "core/error.hpp"
#include "core/experiments.hpp"
#include "core/gate.hpp"
#include "core/lemma.hpp"
#include "core/matrix_io.hpp"
#include "core/perturbation.hpp"
#include "core/potential.hpp"
#include "core/state.hpp"
#include "core/wht.hpp"

struct qel_program {
  qel::GateProgram program;
};

struct qel_potential {
  qel::PotentialSpec spec;
};

namespace {

thread_local std::string g_last_error;

// Thrown from inside a callback wrapper when the user asks to stop.
struct CallbackAbort {};

qel_status to_status(qel::ErrorCode code) {
  switch (code) {
    case qel::ErrorCode::kInvalidArgument:
      return QEL_ERR_INVALID_ARGUMENT;
    case qel::ErrorCode::kOutOfRange:
      return QEL_ERR_OUT_OF_RANGE;
    case qel::ErrorCode::kSingular:
      return QEL_ERR_SINGULAR;
    case qel::ErrorCode::kVerificationFailed:
      return QEL_ERR_VERIFICATION;
    case qel::ErrorCode::kParse:
      return QEL_ERR_PARSE;
    case qel::ErrorCode::kIo:
      return QEL_ERR_IO;
    case qel::ErrorCode::kDesync:
      return QEL_ERR_DESYNC;
    case qel::ErrorCode::kBoundViolation:
      return QEL_ERR_BOUND_VIOLATION;
  }
  return QEL_ERR_INTERNAL;
}

qel_status set_error(qel_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

template <typename Fn>
qel_status guarded(Fn&& fn) {
  try {
    fn();
    return QEL_OK;
  } catch (const qel::Error& e) {
    return set_error(to_status(e.code()), e.what());
  } catch (const CallbackAbort&) {
    return set_error(QEL_ERR_INTERNAL, "aborted by callback");
  } catch (const std::bad_alloc&) {
    return set_error(QEL_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(QEL_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(QEL_ERR_INTERNAL, "unknown error");
  }
}

void require(bool ok, const char* what) {
  if (!ok) qel::fail(qel::ErrorCode::kInvalidArgument, what);
}

qel::Matrix read_matrix(const double* data, std::size_t rows, std::size_t cols) {
  require(data != nullptr, "null matrix pointer");
  return Eigen::Map<const qel::Matrix>(data, static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}

void write_matrix(const qel::Matrix& m, double* out) {
  require(out != nullptr, "null output pointer");
  std::memcpy(out, m.data(), sizeof(double) * static_cast<std::size_t>(m.size()));
}

qel_gate to_c(const qel::Gate& gate) {
  qel_gate out{};
  if (const auto* r = std::get_if<qel::Rotation>(&gate)) {
    out.kind = QEL_GATE_ROTATION;
    out.i = r->i;
    out.i2 = r->i2;
    out.param = r->theta;
  } else {
    const auto& c = std::get<qel::Constant>(gate);
    out.kind = QEL_GATE_CONSTANT;
    out.i = c.i;
    out.param = c.c;
  }
  return out;
}

qel::Route to_route(qel_route route) {
  switch (route) {
    case QEL_ROUTE_APPENDIX_B:
      return qel::Route::kAppendixB;
    case QEL_ROUTE_FAST_KRONECKER:
      return qel::Route::kFastKronecker;
  }
  qel::fail(qel::ErrorCode::kInvalidArgument, "unknown route");
}

void copy_string(const std::string& s, char* buffer, size_t capacity, size_t* required) {
  if (required != nullptr) *required = s.size() + 1;
  if (buffer == nullptr || capacity < s.size() + 1) {
    if (buffer != nullptr && capacity > 0) buffer[0] = '\0';
    qel::fail(qel::ErrorCode::kInvalidArgument, "buffer too small");
  }
  std::memcpy(buffer, s.c_str(), s.size() + 1);
}

qel::TraceOptions to_options(const qel_trace_options* options) {
  qel::TraceOptions out;
  if (options != nullptr) {
    out.recompute_every = options->recompute_every;
    out.track_kappa = options->track_kappa != 0;
    out.enforce_theorem2 = options->enforce_theorem2 != 0;
    out.theorem2_tolerance = options->theorem2_tolerance;
  }
  return out;
}

qel::TraceSink make_sink(qel_trace_callback callback, void* user) {
  if (callback == nullptr) return {};
  return [callback, user](std::size_t, const qel::TraceRecord& r) {
    qel_trace_record rec{};
    rec.step = r.step;
    rec.has_gate = r.gate.has_value() ? 1 : 0;
    if (r.gate) rec.gate = to_c(*r.gate);
    rec.potential = r.potential;
    rec.delta = r.delta;
    rec.has_bound = r.bound.has_value() ? 1 : 0;
    rec.bound = r.bound.value_or(0.0);
    rec.kappa = r.kappa;
    if (callback(&rec, user) != 0) throw CallbackAbort{};
  };
}

void fill_summary(const qel::TraceSummary& s, qel_trace_summary* out) {
  out->steps = s.steps;
  out->initial = s.initial;
  out->final_value = s.final_value;
  out->delta_sum = s.delta_sum;
  out->max_abs_delta = s.max_abs_delta;
  out->max_bound_ratio = s.max_bound_ratio;
  out->theorem2_violations = s.theorem2_violations;
  out->max_constant_delta = s.max_constant_delta;
  out->max_kappa = s.max_kappa;
  out->max_recompute_discrepancy = s.max_recompute_discrepancy;
}

}  // namespace

extern "C" {

const char* qel_status_string(qel_status status) {
  switch (status) {
    case QEL_OK:
      return "ok";
    case QEL_ERR_INVALID_ARGUMENT:
      return "invalid argument";
    case QEL_ERR_OUT_OF_RANGE:
      return "index out of range";
    case QEL_ERR_SINGULAR:
      return "singular matrix";
    case QEL_ERR_VERIFICATION:
      return "verification failed";
    case QEL_ERR_PARSE:
      return "parse error";
    case QEL_ERR_IO:
      return "i/o error";
    case QEL_ERR_DESYNC:
      return "incremental state desynchronized";
    case QEL_ERR_BOUND_VIOLATION:
      return "rotation bound violated";
    case QEL_ERR_BUFFER_TOO_SMALL:
      return "buffer too small";
    case QEL_ERR_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

const char* qel_last_error(void) { return g_last_error.c_str(); }

// ---- programs -------------------------------------------------------------

qel_status qel_program_create(size_t n, qel_program** out) {
  return guarded([&] {
    require(out != nullptr, "null output handle");
    *out = new qel_program{qel::GateProgram(n)};
  });
}

void qel_program_destroy(qel_program* program) { delete program; }

qel_status qel_program_add_rotation(qel_program* program, size_t i, size_t i2, double theta) {
  return guarded([&] {
    require(program != nullptr, "null program");
    program->program.add_rotation(i, i2, theta);
  });
}

qel_status qel_program_add_constant(qel_program* program, size_t i, double c) {
  return guarded([&] {
    require(program != nullptr, "null program");
    program->program.add_constant(i, c);
  });
}

size_t qel_program_dim(const qel_program* program) { return program ? program->program.dim() : 0; }
size_t qel_program_size(const qel_program* program) { return program ? program->program.size() : 0; }
size_t qel_program_rotation_count(const qel_program* program) {
  return program ? program->program.rotation_count() : 0;
}

qel_status qel_program_gate(const qel_program* program, size_t index, qel_gate* out) {
  return guarded([&] {
    require(program != nullptr && out != nullptr, "null argument");
    if (index >= program->program.size()) qel::fail(qel::ErrorCode::kOutOfRange, "gate index out of range");
    *out = to_c(program->program[index]);
  });
}

qel_status qel_program_serialize(const qel_program* program, const char* header_comment, char* buffer,
                                 size_t capacity, size_t* required) {
  const qel_status status = guarded([&] {
    require(program != nullptr, "null program");
    const std::string text =
        qel::serialize_program(program->program, header_comment ? header_comment : std::string_view{});
    if (required != nullptr) *required = text.size() + 1;
    if (buffer == nullptr || capacity < text.size() + 1) {
      if (buffer != nullptr && capacity > 0) buffer[0] = '\0';
      throw CallbackAbort{};
    }
    std::memcpy(buffer, text.c_str(), text.size() + 1);
  });
  if (status == QEL_ERR_INTERNAL && g_last_error == "aborted by callback") {
    return set_error(QEL_ERR_BUFFER_TOO_SMALL, "buffer too small for serialized program");
  }
  return status;
}

qel_status qel_program_parse(const char* text, qel_program** out) {
  return guarded([&] {
    require(text != nullptr && out != nullptr, "null argument");
    *out = new qel_program{qel::parse_program(text)};
  });
}

qel_status qel_program_load(const char* path, qel_program** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    *out = new qel_program{qel::load_program(path)};
  });
}

qel_status qel_program_save(const qel_program* program, const char* header_comment, const char* path) {
  return guarded([&] {
    require(program != nullptr && path != nullptr, "null argument");
    qel::save_program(program->program, path, header_comment ? header_comment : std::string_view{});
  });
}

qel_status qel_program_matrix(const qel_program* program, double* out) {
  return guarded([&] {
    require(program != nullptr, "null program");
    write_matrix(qel::program_matrix(program->program), out);
  });
}

qel_status qel_verify_well_conditioned(const qel_program* program, double kappa_max, qel_condition_report* out) {
  return guarded([&] {
    require(program != nullptr && out != nullptr, "null argument");
    const auto r = qel::verify_well_conditioned(program->program, kappa_max);
    out->max_kappa = r.max_kappa;
    out->argmax_step = r.argmax_step;
    out->final_kappa = r.final_kappa;
    out->passed = r.passed ? 1 : 0;
  });
}

qel_status qel_condition_number(size_t n, const double* m, double* out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    *out = qel::condition_number(read_matrix(m, n, n));
  });
}

// ---- transforms -----------------------------------------------------------

qel_status qel_wht_matrix(size_t n, double* out) {
  return guarded([&] { write_matrix(qel::wht_matrix(n), out); });
}

qel_status qel_fast_wht_program(size_t n, qel_program** out) {
  return guarded([&] {
    require(out != nullptr, "null output handle");
    *out = new qel_program{qel::fast_wht_program(n)};
  });
}

qel_status qel_kron_rotation_layer(size_t n, size_t stage, double theta, qel_program** out) {
  return guarded([&] {
    require(out != nullptr, "null output handle");
    *out = new qel_program{qel::kron_rotation_layer(n, stage, theta)};
  });
}

qel_status qel_fast_apply_wht(size_t n, double* x) {
  return guarded([&] {
    require(x != nullptr, "null vector");
    qel::fast_apply_wht_inplace(std::span<double>(x, n));
  });
}

// ---- perturbation ---------------------------------------------------------

qel_status qel_perturbation_matrix(size_t n, double eps, double* out) {
  return guarded([&] { write_matrix(qel::perturbation_matrix(n, eps), out); });
}

qel_status qel_exact_inverse_perturbation(size_t n, double eps, double* out) {
  return guarded([&] { write_matrix(qel::exact_inverse_perturbation(n, eps), out); });
}

qel_status qel_synth_perturbation(size_t n, double eps, qel_route route, qel_program** out, qel_plan_info* info) {
  return guarded([&] {
    require(out != nullptr, "null output handle");
    auto plan = qel::synth_perturbation(n, eps, to_route(route));
    if (info != nullptr) {
      info->kappa_certificate = plan.kappa_certificate;
      info->realized_error = plan.realized_error;
    }
    *out = new qel_program{std::move(plan.program)};
  });
}

qel_status qel_plan_header(size_t n, double eps, qel_route route, double kappa, char* buffer, size_t capacity,
                           size_t* required) {
  return guarded([&] {
    qel::PerturbationPlan plan;
    plan.n = n;
    plan.eps = eps;
    plan.route = to_route(route);
    plan.kappa_certificate = kappa;
    copy_string(qel::plan_header(plan), buffer, capacity, required);
  });
}

// ---- potentials -----------------------------------------------------------

qel_status qel_potential_create(qel_potential_kind kind, size_t n, qel_potential** out) {
  return guarded([&] {
    require(out != nullptr, "null output handle");
    switch (kind) {
      case QEL_POTENTIAL_PLAIN:
        *out = new qel_potential{qel::PotentialSpec::plain(n)};
        return;
      case QEL_POTENTIAL_PRECOND_ID_F:
        *out = new qel_potential{qel::PotentialSpec::precond_id_wht(n)};
        return;
      case QEL_POTENTIAL_HAT_PQ:
        *out = new qel_potential{qel::PotentialSpec::hat_wht(n)};
        return;
    }
    qel::fail(qel::ErrorCode::kInvalidArgument, "unknown potential kind");
  });
}

qel_status qel_potential_from_slices(size_t n, size_t k, const double* const* a, const double* const* b,
                                     qel_potential** out) {
  return guarded([&] {
    require(out != nullptr && a != nullptr && b != nullptr, "null argument");
    require(k >= 1, "a potential needs at least one slice");
    std::vector<qel::Slice> slices;
    for (size_t p = 0; p < k; ++p) {
      slices.push_back({qel::Operand::dense(read_matrix(a[p], n, n)), qel::Operand::dense(read_matrix(b[p], n, n))});
    }
    *out = new qel_potential{k == 1 ? qel::PotentialSpec::preconditioned(slices[0].a, slices[0].b)
                                    : qel::PotentialSpec::k_slice(std::move(slices))};
  });
}

qel_status qel_potential_hat(size_t n, const double* p, const double* q, qel_potential** out) {
  return guarded([&] {
    require(out != nullptr, "null output handle");
    *out = new qel_potential{qel::PotentialSpec::hat(read_matrix(p, n, 2 * n), read_matrix(q, n, 2 * n))};
  });
}

qel_status qel_potential_load(const char* path, qel_potential** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    *out = new qel_potential{qel::spec_from_matrices(qel::load_matrices(path))};
  });
}

void qel_potential_destroy(qel_potential* potential) { delete potential; }
size_t qel_potential_dim(const qel_potential* potential) { return potential ? potential->spec.dim() : 0; }
size_t qel_potential_slices(const qel_potential* potential) { return potential ? potential->spec.k() : 0; }

qel_status qel_potential_evaluate(const qel_potential* potential, const double* m, double* out) {
  return guarded([&] {
    require(potential != nullptr && out != nullptr, "null argument");
    const std::size_t n = potential->spec.dim();
    *out = qel::k_slice_quasi_entropy(read_matrix(m, n, n), potential->spec);
  });
}

double qel_entropy_kernel(double x) { return qel::entropy_kernel(x); }

// ---- traces ---------------------------------------------------------------

qel_trace_options qel_trace_default_options(void) {
  const qel::TraceOptions d;
  qel_trace_options o{};
  o.recompute_every = d.recompute_every;
  o.track_kappa = d.track_kappa ? 1 : 0;
  o.enforce_theorem2 = d.enforce_theorem2 ? 1 : 0;
  o.theorem2_tolerance = d.theorem2_tolerance;
  return o;
}

qel_status qel_trace(const qel_program* program, const qel_potential* potential, const qel_trace_options* options,
                     qel_trace_callback callback, void* user, qel_trace_summary* out) {
  return guarded([&] {
    require(program != nullptr && potential != nullptr, "null argument");
    const qel::PotentialSpec specs[] = {potential->spec};
    auto summaries =
        qel::trace_potentials_streaming(program->program, specs, to_options(options), make_sink(callback, user));
    if (out != nullptr) fill_summary(summaries.front(), out);
  });
}

qel_status qel_run_perturbation(size_t n, double eps, qel_route route, const qel_potential* potential,
                                const qel_trace_options* options, qel_trace_callback callback, void* user,
                                qel_perturbation_run* out) {
  return guarded([&] {
    require(potential != nullptr, "null potential");
    const auto run =
        qel::run_perturbation(n, eps, to_route(route), potential->spec, to_options(options), make_sink(callback, user));
    if (out != nullptr) {
      out->kappa_certificate = run.plan.kappa_certificate;
      out->gate_count = run.plan.program.size();
      out->rotation_count = run.plan.program.rotation_count();
      out->endpoint = run.endpoint;
      out->direct_endpoint = run.direct_endpoint;
      out->max_abs_delta = run.trace.max_abs_delta;
      out->drift_ratio = run.drift_ratio;
      out->lower_bound_steps = run.lower_bound_steps;
      out->gate_ratio = run.gate_ratio;
      out->max_recompute_discrepancy = run.trace.max_recompute_discrepancy;
    }
  });
}

// ---- sweeps and campaigns -------------------------------------------------

qel_status qel_scaling_sweep(const size_t* ns, size_t count_n, const double* eps, size_t count_eps,
                             unsigned threads, qel_endpoint_values* out) {
  return guarded([&] {
    require(ns != nullptr && eps != nullptr && out != nullptr, "null argument");
    const auto values = qel::scaling_sweep(std::span<const std::size_t>(ns, count_n),
                                           std::span<const double>(eps, count_eps), threads == 0 ? 1 : threads);
    for (std::size_t k = 0; k < values.size(); ++k) {
      const auto& v = values[k];
      out[k] = qel_endpoint_values{v.n,
                                   v.eps,
                                   v.plain,
                                   v.plain_scale,
                                   v.plain_ratio(),
                                   v.precond,
                                   v.precond_scale,
                                   v.precond_ratio(),
                                   v.hat,
                                   v.hat_scale,
                                   v.hat_ratio()};
    }
  });
}

qel_theorem2_config qel_theorem2_default_config(void) {
  const qel::Theorem2Config d;
  return qel_theorem2_config{d.n, d.gates, d.rotation_fraction, d.random_preconditioners, d.preconditioner_norm,
                             d.seed, d.tolerance};
}

qel_status qel_verify_theorem2(const qel_theorem2_config* config, qel_theorem2_report* out,
                               qel_program** offending) {
  return guarded([&] {
    require(config != nullptr && out != nullptr, "null argument");
    qel::Theorem2Config c;
    c.n = config->n;
    c.gates = config->gates;
    c.rotation_fraction = config->rotation_fraction;
    c.random_preconditioners = config->random_preconditioners;
    c.preconditioner_norm = config->preconditioner_norm;
    c.seed = config->seed;
    c.tolerance = config->tolerance;
    auto report = qel::verify_theorem2(c);
    out->rotations_checked = report.rotations_checked;
    out->violations = report.violations;
    out->max_ratio = report.max_ratio;
    for (std::size_t b = 0; b < 10; ++b) out->histogram[b] = report.histogram[b];
    out->first_violation_step = report.first_violation_step.value_or(0);
    if (offending != nullptr) {
      *offending = report.program ? new qel_program{std::move(*report.program)} : nullptr;
    }
  });
}

qel_status qel_theorem2_bound(size_t n, const double* m, const double* a, const double* b, size_t i, size_t i2,
                              double* out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    const qel::Matrix mm = read_matrix(m, n, n);
    const auto spec = qel::PotentialSpec::preconditioned(qel::Operand::dense(read_matrix(a, n, n)),
                                                         qel::Operand::dense(read_matrix(b, n, n)));
    const qel::Matrix m_inv_t = qel::inverse_transpose(mm);
    if (i < 1 || i > n || i2 < 1 || i2 > n) qel::fail(qel::ErrorCode::kOutOfRange, "row pair out of range");
    const auto& s = spec.slices().front();
    const qel::Matrix ma = s.a.right_multiply(mm);
    const qel::Matrix nb = s.b.right_multiply(m_inv_t);
    auto pair = [&](const qel::Matrix& x) {
      return std::sqrt(x.row(static_cast<Eigen::Index>(i - 1)).squaredNorm() +
                       x.row(static_cast<Eigen::Index>(i2 - 1)).squaredNorm());
    };
    *out = pair(ma) * pair(nb);
  });
}

qel_status qel_lemma_sample(size_t ell, double c, double norm1, uint64_t seed, double* x, double* y) {
  return guarded([&] {
    require(x != nullptr && y != nullptr, "null output");
    const auto inst = qel::sample_instance(ell, c, norm1, seed);
    std::memcpy(x, inst.x.data(), sizeof(double) * ell);
    std::memcpy(y, inst.y.data(), sizeof(double) * ell);
  });
}

qel_status qel_lemma_check(size_t ell, const double* x, const double* y, double c, qel_lemma_report* out) {
  return guarded([&] {
    require(x != nullptr && y != nullptr && out != nullptr, "null argument");
    qel::LemmaInstance inst;
    inst.ell = ell;
    inst.x.assign(x, x + ell);
    inst.y.assign(y, y + ell);
    inst.c = c;
    const auto r = qel::check_lemma(inst);
    *out = qel_lemma_report{r.lhs, r.rhs, r.margin, r.holds ? 1 : 0, r.big_count, r.small_count,
                            r.small_hypothesis ? 1 : 0};
  });
}

qel_status qel_lemma_campaign(const size_t* ells, size_t count_ell, size_t instances_per_ell, double c,
                              uint64_t seed, qel_lemma_callback callback, void* user, qel_lemma_campaign_report* out) {
  return guarded([&] {
    require(ells != nullptr, "null ell grid");
    qel::LemmaCampaignConfig config;
    config.ells.assign(ells, ells + count_ell);
    config.instances_per_ell = instances_per_ell;
    config.c = c;
    config.seed = seed;
    std::function<void(const qel::LemmaRow&)> sink;
    if (callback != nullptr) {
      sink = [&](const qel::LemmaRow& row) {
        const auto& r = row.report;
        const qel_lemma_row c_row{row.seed, row.ell, row.c, row.norm1,
                                  qel_lemma_report{r.lhs, r.rhs, r.margin, r.holds ? 1 : 0, r.big_count,
                                                   r.small_count, r.small_hypothesis ? 1 : 0}};
        if (callback(&c_row, user) != 0) throw CallbackAbort{};
      };
    }
    const auto report = qel::run_lemma_campaign(config, sink);
    if (out != nullptr) {
      out->violations = report.violations;
      out->instances = 0;
      out->min_margin = std::numeric_limits<double>::infinity();
      for (const auto& s : report.per_ell) {
        out->instances += s.instances;
        out->min_margin = std::min(out->min_margin, s.min_margin);
      }
    }
  });
}

}  // extern "C"
