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

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "core/gate.hpp"
#include "core/lemma.hpp"
#include "core/perturbation.hpp"
#include "core/potential.hpp"

namespace qel {

// ---------------------------------------------------------------------------
// Deterministic parallel map: results land at their own index, so output
// order never depends on scheduling.

template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const std::size_t workers = std::min<std::size_t>(threads, count);
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += workers) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// ---------------------------------------------------------------------------
// Potential selection

enum class PotentialKind { kPlain, kPrecondIdF, kHatPQ, kKSlice };

PotentialKind parse_potential_kind(std::string_view name);
std::string_view potential_kind_name(PotentialKind kind);
// kKSlice reads its blocks from `slices_path`.
PotentialSpec make_potential(PotentialKind kind, std::size_t n, const std::string& slices_path = {});

// ---------------------------------------------------------------------------
// Endpoint potentials of Id + eps F

struct EndpointValues {
  std::size_t n = 0;
  double eps = 0.0;
  double plain = 0.0;          // Phi(Id + eps F)
  double plain_scale = 0.0;    // eps^2 n log2 n
  double precond = 0.0;        // Phi_{Id,F}(Id + eps F)
  double precond_scale = 0.0;  // eps n log2 n
  double hat = 0.0;            // hat-Phi_{P,Q}(Id + eps F), P = [Id, -F], Q = [F, Id]
  double hat_scale = 0.0;      // eps n log2 n

  double plain_ratio() const { return std::abs(plain) / plain_scale; }
  double precond_ratio() const { return precond / precond_scale; }
  double hat_ratio() const { return hat / hat_scale; }
};

// O(n^2): entries of Id + eps F, its closed-form inverse-transpose and their
// products with F are generated on the fly, no n x n storage.
EndpointValues perturbation_endpoints(std::size_t n, double eps);

// Grid order: n outer, eps inner.
std::vector<EndpointValues> scaling_sweep(std::span<const std::size_t> ns, std::span<const double> epss,
                                          unsigned threads = 1);

// ---------------------------------------------------------------------------
// Traced perturbation runs

struct PerturbationRun {
  PerturbationPlan plan;
  TraceSummary trace;
  double endpoint = 0.0;           // tracker value after the last gate
  double direct_endpoint = 0.0;    // from-scratch evaluation on Id + eps F
  double drift_ratio = 0.0;        // max |delta| / (eps log2(1/eps))
  double lower_bound_steps = 0.0;  // (n log2 n) / log2(1/eps)
  double gate_ratio = 0.0;         // gate count / lower_bound_steps
};

PerturbationRun run_perturbation(std::size_t n, double eps, Route route, const PotentialSpec& spec,
                                 const TraceOptions& options = {}, const TraceSink& sink = {});

// ---------------------------------------------------------------------------
// Rotation-bound campaign

struct Theorem2Config {
  std::size_t n = 128;
  std::size_t gates = 10000;
  double rotation_fraction = 0.9;
  std::size_t random_preconditioners = 3;
  double preconditioner_norm = 2.0;
  std::uint64_t seed = 1;
  double tolerance = 1e-8;
  std::size_t recompute_every = 1024;
};

struct Theorem2Report {
  std::size_t rotations_checked = 0;  // rotations times one-slice potentials
  std::size_t violations = 0;
  double max_ratio = 0.0;
  // delta/bound histogram over [0, 1], 10 bins (ratios above 1 land in the last).
  std::vector<std::size_t> histogram = std::vector<std::size_t>(10, 0);
  std::optional<std::size_t> first_violation_step;
  std::optional<GateProgram> program;  // kept when a violation occurred
};

GateProgram random_program(std::size_t n, std::size_t gates, double rotation_fraction, std::uint64_t seed);
// Gaussian matrix rescaled to spectral norm `norm`.
Matrix random_matrix_with_norm(std::size_t n, double norm, std::uint64_t seed);

Theorem2Report verify_theorem2(const Theorem2Config& config);

// ---------------------------------------------------------------------------
// Lemma campaign

struct LemmaCampaignConfig {
  std::vector<std::size_t> ells{64, 256, 1024, 4096, 65536};
  std::size_t instances_per_ell = 10000;
  double c = kLemmaMaxC;
  std::uint64_t seed = 1;
};

struct LemmaRow {
  std::uint64_t seed = 0;
  std::size_t ell = 0;
  double c = 0.0;
  double norm1 = 0.0;
  LemmaReport report;
};

struct LemmaEllSummary {
  std::size_t ell = 0;
  std::size_t instances = 0;
  std::size_t violations = 0;
  double min_margin = 0.0;
};

struct LemmaCampaignReport {
  std::vector<LemmaEllSummary> per_ell;
  std::size_t violations = 0;
};

// Rejects C outside [0, 1/8] before sampling. `sink` sees every instance.
LemmaCampaignReport run_lemma_campaign(const LemmaCampaignConfig& config,
                                       const std::function<void(const LemmaRow&)>& sink = {});

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

}  // namespace qel
