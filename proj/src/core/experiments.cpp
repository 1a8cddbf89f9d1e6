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

#include "core/experiments.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "core/error.hpp"
#include "core/matrix_io.hpp"
#include "core/state.hpp"
#include "core/wht.hpp"

namespace qel {

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  // splitmix64 finalizer over a combined word
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double log2n(std::size_t n) { return static_cast<double>(log2_floor(n)); }

}  // namespace

PotentialKind parse_potential_kind(std::string_view name) {
  if (name == "plain") return PotentialKind::kPlain;
  if (name == "precond-id-f") return PotentialKind::kPrecondIdF;
  if (name == "hat-pq") return PotentialKind::kHatPQ;
  if (name == "k-slice") return PotentialKind::kKSlice;
  fail(ErrorCode::kInvalidArgument, "unknown potential '" + std::string(name) + "'");
}

std::string_view potential_kind_name(PotentialKind kind) {
  switch (kind) {
    case PotentialKind::kPlain:
      return "plain";
    case PotentialKind::kPrecondIdF:
      return "precond-id-f";
    case PotentialKind::kHatPQ:
      return "hat-pq";
    case PotentialKind::kKSlice:
      break;
  }
  return "k-slice";
}

PotentialSpec make_potential(PotentialKind kind, std::size_t n, const std::string& slices_path) {
  switch (kind) {
    case PotentialKind::kPlain:
      return PotentialSpec::plain(n);
    case PotentialKind::kPrecondIdF:
      return PotentialSpec::precond_id_wht(n);
    case PotentialKind::kHatPQ:
      return PotentialSpec::hat_wht(n);
    case PotentialKind::kKSlice:
      break;
  }
  if (slices_path.empty()) fail(ErrorCode::kInvalidArgument, "k-slice potential needs a slice file");
  PotentialSpec spec = spec_from_matrices(load_matrices(slices_path));
  if (spec.dim() != n) {
    fail(ErrorCode::kInvalidArgument, "slice file has dimension " + std::to_string(spec.dim()) +
                                          ", expected " + std::to_string(n));
  }
  return spec;
}

// ---------------------------------------------------------------------------

EndpointValues perturbation_endpoints(std::size_t n, double eps) {
  if (!is_power_of_two(n) || n < 2) fail(ErrorCode::kInvalidArgument, "sweep dimension must be a power of two >= 2");
  if (!(eps > 0.0 && eps < 0.5)) fail(ErrorCode::kInvalidArgument, "sweep eps must lie in (0, 1/2)");
  EndpointValues out;
  out.n = n;
  out.eps = eps;
  const double amp = 1.0 / std::sqrt(static_cast<double>(n));
  const double inv = 1.0 / (1.0 - eps * eps);
  double plain = 0.0;
  double precond = 0.0;
  double hat = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row_plain = 0.0;
    double row_precond = 0.0;
    double row_hat = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double f = wht_sign(i, j) * amp;
      const double delta = i == j ? 1.0 : 0.0;
      const double m = delta + eps * f;           // Id + eps F
      const double minv_t = (delta - eps * f) * inv;  // its inverse-transpose
      const double mf = f + eps * delta;          // (Id + eps F) F
      const double minv_t_f = (f - eps * delta) * inv;
      row_plain -= entropy_kernel(m * minv_t);
      row_precond -= entropy_kernel(m * minv_t_f);
      row_hat -= entropy_kernel(m * minv_t_f - mf * minv_t);
    }
    plain += row_plain;
    precond += row_precond;
    hat += row_hat;
  }
  const double nl = static_cast<double>(n) * log2n(n);
  out.plain = plain;
  out.plain_scale = eps * eps * nl;
  out.precond = precond;
  out.precond_scale = eps * nl;
  out.hat = hat;
  out.hat_scale = eps * nl;
  return out;
}

std::vector<EndpointValues> scaling_sweep(std::span<const std::size_t> ns, std::span<const double> epss,
                                          unsigned threads) {
  if (ns.empty() || epss.empty()) fail(ErrorCode::kInvalidArgument, "sweep grids must be nonempty");
  std::vector<EndpointValues> out(ns.size() * epss.size());
  parallel_for(out.size(), threads, [&](std::size_t k) {
    out[k] = perturbation_endpoints(ns[k / epss.size()], epss[k % epss.size()]);
  });
  return out;
}

// ---------------------------------------------------------------------------

PerturbationRun run_perturbation(std::size_t n, double eps, Route route, const PotentialSpec& spec,
                                 const TraceOptions& options, const TraceSink& sink) {
  if (!(eps > 0.0 && eps < 0.5)) fail(ErrorCode::kInvalidArgument, "eps must lie in (0, 1/2)");
  PerturbationRun run;
  run.plan = synth_perturbation(n, eps, route);
  const PotentialSpec specs[] = {spec};
  run.trace = trace_potentials_streaming(run.plan.program, specs, options,
                                         [&](std::size_t, const TraceRecord& r) {
                                           if (sink) sink(0, r);
                                         })
                  .front();
  run.endpoint = run.trace.final_value;
  run.direct_endpoint = k_slice_quasi_entropy(perturbation_matrix(n, eps), spec);
  const double log_inv_eps = std::log2(1.0 / eps);
  run.drift_ratio = run.trace.max_abs_delta / (eps * log_inv_eps);
  run.lower_bound_steps = static_cast<double>(n) * log2n(n) / log_inv_eps;
  run.gate_ratio = static_cast<double>(run.plan.program.size()) / run.lower_bound_steps;
  return run;
}

// ---------------------------------------------------------------------------

GateProgram random_program(std::size_t n, std::size_t gates, double rotation_fraction, std::uint64_t seed) {
  if (n < 2) fail(ErrorCode::kInvalidArgument, "random programs need n >= 2");
  std::mt19937_64 rng(seed);
  GateProgram program(n);
  program.reserve(gates);
  for (std::size_t g = 0; g < gates; ++g) {
    if (unit(rng) < rotation_fraction) {
      const std::size_t i = rng() % n;
      std::size_t i2 = rng() % (n - 1);
      if (i2 >= i) ++i2;
      program.add_rotation(i + 1, i2 + 1, (2.0 * unit(rng) - 1.0) * std::numbers::pi);
    } else {
      const double mag = std::exp(0.4 * unit(rng) - 0.2);
      program.add_constant(rng() % n + 1, (rng() & 1) ? mag : -mag);
    }
  }
  return program;
}

Matrix random_matrix_with_norm(std::size_t n, double norm, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  const auto dim = static_cast<Eigen::Index>(n);
  Matrix m(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) m(i, j) = gauss(rng);
  }
  return m * (norm / singular_values(m)(0));
}

Theorem2Report verify_theorem2(const Theorem2Config& config) {
  GateProgram program = random_program(config.n, config.gates, config.rotation_fraction, config.seed);
  std::vector<PotentialSpec> specs{PotentialSpec::plain(config.n)};
  std::mt19937_64 rng(mix_seed(config.seed, 0x7e02));
  for (std::size_t p = 0; p < config.random_preconditioners; ++p) {
    // Spectral norms drawn in (0, norm].
    const double na = config.preconditioner_norm * (1.0 - unit(rng));
    const double nb = config.preconditioner_norm * (1.0 - unit(rng));
    specs.push_back(PotentialSpec::preconditioned(
        Operand::dense(random_matrix_with_norm(config.n, na, mix_seed(config.seed, 2 * p + 1))),
        Operand::dense(random_matrix_with_norm(config.n, nb, mix_seed(config.seed, 2 * p + 2)))));
  }

  TraceOptions options;
  options.recompute_every = config.recompute_every;
  options.track_kappa = false;
  options.enforce_theorem2 = false;
  options.theorem2_tolerance = config.tolerance;

  Theorem2Report report;
  auto summaries = trace_potentials_streaming(program, specs, options, [&](std::size_t, const TraceRecord& r) {
    if (!r.bound) return;
    ++report.rotations_checked;
    const double mag = std::abs(r.delta);
    if (mag > *r.bound + config.tolerance) {
      ++report.violations;
      if (!report.first_violation_step) report.first_violation_step = r.step;
    }
    const double ratio = *r.bound > 0.0 ? mag / *r.bound : 0.0;
    report.max_ratio = std::max(report.max_ratio, ratio);
    const auto bin = std::min<std::size_t>(static_cast<std::size_t>(ratio * 10.0), 9);
    ++report.histogram[bin];
  });
  if (report.violations > 0) report.program = std::move(program);
  return report;
}

// ---------------------------------------------------------------------------

LemmaCampaignReport run_lemma_campaign(const LemmaCampaignConfig& config,
                                       const std::function<void(const LemmaRow&)>& sink) {
  if (!(config.c >= 0.0 && config.c <= kLemmaMaxC)) {
    fail(ErrorCode::kInvalidArgument, "C = " + format_double(config.c) + " outside [0, 1/8]");
  }
  if (config.ells.empty()) fail(ErrorCode::kInvalidArgument, "lemma campaign needs at least one ell");
  for (std::size_t ell : config.ells) {
    if (ell < kLemmaEllFloor) {
      fail(ErrorCode::kInvalidArgument, "ell = " + std::to_string(ell) + " below the floor " +
                                            std::to_string(kLemmaEllFloor));
    }
  }
  LemmaCampaignReport report;
  for (std::size_t ell : config.ells) {
    LemmaEllSummary summary;
    summary.ell = ell;
    summary.min_margin = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < config.instances_per_ell; ++t) {
      LemmaRow row;
      row.seed = mix_seed(mix_seed(config.seed, ell), t);
      row.ell = ell;
      row.c = config.c;
      std::mt19937_64 rng(row.seed);
      // One eighth of the instances sit at ||x||_1 = 1, the rest log-uniform in [1e-4, 1].
      row.norm1 = (rng() % 8 == 0) ? 1.0 : std::pow(10.0, -4.0 * unit(rng));
      const LemmaInstance inst = sample_instance(ell, config.c, row.norm1, mix_seed(row.seed, 1));
      row.report = check_lemma(inst);
      ++summary.instances;
      summary.min_margin = std::min(summary.min_margin, row.report.margin);
      if (!row.report.holds) ++summary.violations;
      if (sink) sink(row);
    }
    report.violations += summary.violations;
    report.per_ell.push_back(summary);
  }
  return report;
}

}  // namespace qel
