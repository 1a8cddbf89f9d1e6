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

#include "core/lemma.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "core/error.hpp"
#include "core/gate.hpp"
#include "core/potential.hpp"

namespace qel {

namespace {

double norm1(const std::vector<double>& v) {
  double s = 0.0;
  for (double e : v) s += std::abs(e);
  return s;
}

// Uniform on [0, 1) from the top 53 bits.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

void validate_instance(const LemmaInstance& inst) {
  const auto bad = [](const std::string& what) { fail(ErrorCode::kInvalidArgument, "invalid lemma instance: " + what); };
  if (inst.ell == 0 || inst.x.size() != inst.ell || inst.y.size() != inst.ell) bad("x and y must have length ell");
  if (!(inst.c >= 0.0 && inst.c <= kLemmaMaxC)) bad("C = " + format_double(inst.c) + " outside [0, 1/8]");
  for (double v : inst.x) {
    if (!(v >= 0.0) || !std::isfinite(v)) bad("x must be finite and nonnegative");
  }
  for (double v : inst.y) {
    if (!std::isfinite(v)) bad("y must be finite");
  }
  const double x1 = norm1(inst.x);
  const double slack = 1e-12;
  if (x1 > 1.0 + slack) bad("||x||_1 = " + format_double(x1) + " > 1");
  const double xmax = inst.x.empty() ? 0.0 : *std::max_element(inst.x.begin(), inst.x.end());
  const double cap = 4.0 * x1 / static_cast<double>(inst.ell);
  if (xmax > cap * (1.0 + slack)) bad("||x||_inf = " + format_double(xmax) + " > 4||x||_1/ell = " + format_double(cap));
  const double y1 = norm1(inst.y);
  if (y1 > inst.c * x1 * (1.0 + slack)) bad("||y||_1 = " + format_double(y1) + " > C||x||_1");
}

double lemma_lhs(const LemmaInstance& inst) {
  double acc = 0.0;
  for (std::size_t i = 0; i < inst.x.size(); ++i) acc -= entropy_kernel(inst.x[i] + inst.y[i]);
  return acc;
}

double lemma_rhs(const LemmaInstance& inst) {
  const double x1 = norm1(inst.x);
  const double head = x1 == 0.0 ? 0.0 : x1 * std::log2(static_cast<double>(inst.ell) / x1);
  return head - kLemmaSlack;
}

LemmaInstance sample_instance(std::size_t ell, double c, double norm1_target, std::uint64_t seed) {
  if (ell < kLemmaEllFloor) {
    fail(ErrorCode::kInvalidArgument, "ell = " + std::to_string(ell) + " below the floor " +
                                          std::to_string(kLemmaEllFloor));
  }
  if (!(c >= 0.0 && c <= kLemmaMaxC)) fail(ErrorCode::kInvalidArgument, "C must lie in [0, 1/8]");
  if (!(norm1_target > 0.0 && norm1_target <= 1.0)) {
    fail(ErrorCode::kInvalidArgument, "||x||_1 target must lie in (0, 1]");
  }

  std::mt19937_64 rng(seed);
  LemmaInstance inst;
  inst.ell = ell;
  inst.c = c;
  inst.x.resize(ell);
  inst.y.assign(ell, 0.0);

  // Raising uniforms to a random power skews x toward few large entries, so
  // the ell_inf cap binds on part of the campaign.
  // Exponent drawn from {1/2, 1, ..., 6}; evaluated without pow, which
  // dominated the campaign at ell = 65536.
  const int skew = static_cast<int>(rng() % 7);
  double total = 0.0;
  for (auto& v : inst.x) {
    const double u = unit(rng) + 0x1.0p-53;
    if (skew == 0) {
      v = std::sqrt(u);
    } else {
      v = u;
      for (int k = 1; k < skew; ++k) v *= u;
    }
    total += v;
  }
  const double cap = 4.0 * norm1_target / static_cast<double>(ell);
  // Clip at the cap, then hand the clipped mass back to the free entries in
  // proportion to their headroom. Exact in one pass: the headroom is at least
  // the deficit because ell * cap = 4 * target.
  const double scale = norm1_target / total;
  double deficit = norm1_target;
  double headroom = 0.0;
  for (auto& v : inst.x) {
    v = std::min(v * scale, cap);
    deficit -= v;
    headroom += cap - v;
  }
  if (deficit > 0.0 && headroom > 0.0) {
    const double fill = std::min(1.0, deficit / headroom);
    for (auto& v : inst.x) v = std::min(cap, v + fill * (cap - v));
  }

  if (c > 0.0) {
    const double y_target = unit(rng) * c * norm1(inst.x);
    const int mode = static_cast<int>(rng() % 3);
    // One 64-bit draw per entry: bit 0 gives the sign, bits 11..63 the magnitude.
    const auto signed_unit = [](std::uint64_t r) {
      const double mag = static_cast<double>(r >> 11) * 0x1.0p-53;
      return (r & 1) ? mag : -mag;
    };
    switch (mode) {
      case 0:  // random signs, uniform magnitudes
        for (auto& v : inst.y) v = signed_unit(rng());
        break;
      case 1:  // removes mass proportionally to x
        for (std::size_t i = 0; i < ell; ++i) inst.y[i] = -inst.x[i];
        break;
      default:  // a few spikes
        for (auto& v : inst.y) {
          const std::uint64_t r = rng();
          v = ((r >> 1) & 63) == 0 ? signed_unit(r) : 0.0;
        }
        break;
    }
    const double y_total = norm1(inst.y);
    if (y_total > 0.0) {
      // Slightly under target so rounding cannot push ||y||_1 over C ||x||_1.
      const double factor = y_target * (1.0 - 1e-12) / y_total;
      for (auto& v : inst.y) v *= factor;
    }
  }
  validate_instance(inst);
  return inst;
}

LemmaReport check_lemma(const LemmaInstance& inst, std::size_t ell_floor) {
  validate_instance(inst);
  if (inst.ell < ell_floor) {
    fail(ErrorCode::kInvalidArgument, "ell = " + std::to_string(inst.ell) + " below the floor " +
                                          std::to_string(ell_floor));
  }
  LemmaReport report;
  report.lhs = lemma_lhs(inst);
  report.rhs = lemma_rhs(inst);
  report.margin = report.lhs - report.rhs;
  report.holds = report.lhs >= report.rhs - kLemmaTolerance;
  const double inv_e = 1.0 / std::numbers::e;
  for (std::size_t i = 0; i < inst.ell; ++i) {
    if (std::abs(inst.y[i]) >= inst.x[i] / 2.0) {
      ++report.big_count;
    } else {
      ++report.small_count;
      if (std::abs(inst.x[i] + inst.y[i]) > inv_e) report.small_hypothesis = false;
    }
  }
  return report;
}

}  // namespace qel
