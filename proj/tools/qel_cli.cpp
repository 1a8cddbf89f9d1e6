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

// Command-line driver. Talks to the library through the C API only.

#include <qel/qel.h>

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitAssertion = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct Config {
  std::size_t n = 0;
  std::vector<std::size_t> n_grid;
  double eps = std::ldexp(1.0, -6);
  std::vector<double> eps_grid;
  std::string route = "fast";
  std::string potential;
  std::string slices;
  std::size_t recompute_every = 1024;
  std::uint64_t seed = 1;
  std::string out;
  bool plot_data = false;
  std::string program_out;
  // verify-lemma
  double lemma_c = 0.125;
  std::size_t instances = 10000;
  std::vector<std::size_t> ell_grid{64, 256, 1024, 4096, 65536};
  // verify-theorem2
  std::size_t gates = 0;
};

// Library failure: carries the status so main can pick the exit code.
struct Failure {
  qel_status status;
  std::string message;
};

void check(qel_status status, const char* what) {
  if (status != QEL_OK) throw Failure{status, std::string(what) + ": " + qel_last_error()};
}

struct ProgramDeleter {
  void operator()(qel_program* p) const { qel_program_destroy(p); }
};
struct PotentialDeleter {
  void operator()(qel_potential* p) const { qel_potential_destroy(p); }
};
using ProgramPtr = std::unique_ptr<qel_program, ProgramDeleter>;
using PotentialPtr = std::unique_ptr<qel_potential, PotentialDeleter>;

std::string fmt(double x) {
  if (std::isnan(x)) return "";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, end);
}

// Owns the output stream: a file when --out is given, stdout otherwise.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::out | std::ios::trunc);
      if (!file_) throw Failure{QEL_ERR_IO, "cannot open " + path};
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }
  void finish() {
    stream().flush();
    if (!stream()) throw Failure{QEL_ERR_IO, "write failed"};
  }

 private:
  std::ofstream file_;
};

unsigned thread_count() {
  if (const char* env = std::getenv("QEL_THREADS")) {
    unsigned value = 0;
    const std::string s(env);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec == std::errc{} && ptr == s.data() + s.size() && value > 0) return value;
    std::cerr << "warning: ignoring QEL_THREADS=" << s << "\n";
  }
  return 1;
}

qel_route parse_route(const std::string& name) {
  return name == "appendix-b" ? QEL_ROUTE_APPENDIX_B : QEL_ROUTE_FAST_KRONECKER;
}

PotentialPtr make_potential(const Config& cfg, std::size_t n) {
  qel_potential* raw = nullptr;
  if (cfg.potential == "k-slice") {
    if (cfg.slices.empty()) throw Failure{QEL_ERR_INVALID_ARGUMENT, "--potential k-slice needs --slices"};
    check(qel_potential_load(cfg.slices.c_str(), &raw), "loading slices");
    PotentialPtr p(raw);
    if (qel_potential_dim(raw) != n) {
      throw Failure{QEL_ERR_INVALID_ARGUMENT, "slice dimension does not match --n"};
    }
    return p;
  }
  qel_potential_kind kind = QEL_POTENTIAL_PLAIN;
  if (cfg.potential == "precond-id-f") kind = QEL_POTENTIAL_PRECOND_ID_F;
  if (cfg.potential == "hat-pq") kind = QEL_POTENTIAL_HAT_PQ;
  check(qel_potential_create(kind, n, &raw), "building potential");
  return PotentialPtr(raw);
}

void require_power_of_two(std::size_t n, const char* flag) {
  if (n < 2 || (n & (n - 1)) != 0) {
    throw Failure{QEL_ERR_INVALID_ARGUMENT, std::string(flag) + " must be a power of two >= 2"};
  }
}

void require_eps(double eps) {
  if (!(eps > 0.0 && eps < 0.5)) throw Failure{QEL_ERR_INVALID_ARGUMENT, "--eps must lie in (0, 1/2)"};
}

void warn_eps(std::size_t n, double eps) {
  if (1.0 / eps > static_cast<double>(n)) {
    std::cerr << "warning: 1/eps = " << fmt(1.0 / eps) << " exceeds n = " << n << "\n";
  }
}

// Streams trace records as CSV (or step,potential pairs with --plot-data).
struct TraceWriter {
  std::ostream* os;
  bool plot_data;

  void header() const {
    if (plot_data) {
      *os << "step,potential\n";
    } else {
      *os << "step,gate,i,i2,theta_or_c,potential,delta,thm2_bound,kappa\n";
    }
  }

  static int callback(const qel_trace_record* r, void* user) {
    auto* self = static_cast<TraceWriter*>(user);
    std::ostream& os = *self->os;
    if (self->plot_data) {
      os << r->step << ',' << fmt(r->potential) << '\n';
      return 0;
    }
    os << r->step << ',';
    if (r->has_gate) {
      const bool rot = r->gate.kind == QEL_GATE_ROTATION;
      os << (rot ? "R" : "C") << ',' << r->gate.i << ',';
      if (rot) os << r->gate.i2;
      os << ',' << fmt(r->gate.param);
    } else {
      os << ",,,";
    }
    os << ',' << fmt(r->potential) << ',' << fmt(r->delta) << ',';
    if (r->has_bound) os << fmt(r->bound);
    os << ',' << fmt(r->kappa) << '\n';
    return 0;
  }
};

qel_trace_options trace_options(const Config& cfg) {
  qel_trace_options options = qel_trace_default_options();
  options.recompute_every = cfg.recompute_every;
  return options;
}

void save_program(const qel_program* program, const std::string& path, const std::string& comment) {
  check(qel_program_save(program, comment.c_str(), path.c_str()), "saving program");
}

int cmd_run_wht(const Config& cfg) {
  require_power_of_two(cfg.n, "--n");
  qel_program* raw = nullptr;
  check(qel_fast_wht_program(cfg.n, &raw), "building WHT program");
  ProgramPtr program(raw);
  if (!cfg.program_out.empty()) save_program(program.get(), cfg.program_out, "fast WHT n=" + std::to_string(cfg.n));
  PotentialPtr potential = make_potential(cfg, cfg.n);

  Output out(cfg.out);
  TraceWriter writer{&out.stream(), cfg.plot_data};
  writer.header();
  const qel_trace_options options = trace_options(cfg);
  qel_trace_summary summary{};
  check(qel_trace(program.get(), potential.get(), &options, &TraceWriter::callback, &writer, &summary), "trace");
  out.finish();

  std::cerr << "run-wht n=" << cfg.n << " potential=" << cfg.potential << " gates=" << summary.steps
            << " final_potential=" << fmt(summary.final_value) << " max_abs_delta=" << fmt(summary.max_abs_delta)
            << " max_bound_ratio=" << fmt(summary.max_bound_ratio)
            << " max_constant_delta=" << fmt(summary.max_constant_delta) << " max_kappa=" << fmt(summary.max_kappa)
            << "\n";
  return summary.theorem2_violations == 0 ? kExitOk : kExitAssertion;
}

int cmd_run_perturbation(const Config& cfg) {
  require_power_of_two(cfg.n, "--n");
  require_eps(cfg.eps);
  warn_eps(cfg.n, cfg.eps);
  const qel_route route = parse_route(cfg.route);
  PotentialPtr potential = make_potential(cfg, cfg.n);

  if (!cfg.program_out.empty()) {
    qel_program* raw = nullptr;
    check(qel_synth_perturbation(cfg.n, cfg.eps, route, &raw, nullptr), "synthesis");
    ProgramPtr program(raw);
    save_program(program.get(), cfg.program_out,
                 "route=" + cfg.route + " n=" + std::to_string(cfg.n) + " eps=" + fmt(cfg.eps));
  }

  Output out(cfg.out);
  TraceWriter writer{&out.stream(), cfg.plot_data};
  writer.header();
  const qel_trace_options options = trace_options(cfg);
  qel_perturbation_run run{};
  check(qel_run_perturbation(cfg.n, cfg.eps, route, potential.get(), &options, &TraceWriter::callback, &writer, &run),
        "perturbation run");
  out.finish();

  const double endpoint_gap = std::abs(run.endpoint - run.direct_endpoint);
  const double tolerance = cfg.n <= 256 ? 1e-8 : 1e-6;
  std::cerr << "run-perturbation n=" << cfg.n << " eps=" << fmt(cfg.eps) << " route=" << cfg.route
            << " potential=" << cfg.potential << "\n"
            << "  endpoint=" << fmt(run.endpoint) << " direct=" << fmt(run.direct_endpoint)
            << " gap=" << fmt(endpoint_gap) << "\n"
            << "  max_abs_delta=" << fmt(run.max_abs_delta) << " drift_ratio=" << fmt(run.drift_ratio) << "\n"
            << "  gates=" << run.gate_count << " rotations=" << run.rotation_count
            << " lower_bound_steps=" << fmt(run.lower_bound_steps) << " gate_ratio=" << fmt(run.gate_ratio) << "\n"
            << "  kappa_certificate=" << fmt(run.kappa_certificate) << "\n";
  if (!(endpoint_gap <= tolerance)) {
    std::cerr << "FAIL: tracker endpoint differs from direct evaluation by " << fmt(endpoint_gap) << "\n";
    return kExitAssertion;
  }
  return kExitOk;
}

double band(const std::vector<double>& values) {
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return *hi / *lo;
}

int cmd_scaling_sweep(const Config& cfg) {
  std::vector<std::size_t> ns = cfg.n_grid;
  std::vector<double> epss = cfg.eps_grid;
  if (ns.empty()) {
    for (std::size_t n = 64; n <= 4096; n *= 2) ns.push_back(n);
  }
  if (epss.empty()) {
    for (int e = 3; e <= 8; ++e) epss.push_back(std::ldexp(1.0, -e));
  }
  for (std::size_t n : ns) require_power_of_two(n, "--n-grid");
  for (double eps : epss) require_eps(eps);
  for (std::size_t n : ns) {
    for (double eps : epss) warn_eps(n, eps);
  }

  std::vector<qel_endpoint_values> values(ns.size() * epss.size());
  check(qel_scaling_sweep(ns.data(), ns.size(), epss.data(), epss.size(), thread_count(), values.data()), "sweep");

  Output out(cfg.out);
  std::ostream& os = out.stream();
  os << "n,eps,plain,plain_scale,plain_ratio,precond,precond_scale,precond_ratio,hat,hat_scale,hat_ratio\n";
  for (const auto& v : values) {
    os << v.n << ',' << fmt(v.eps) << ',' << fmt(v.plain) << ',' << fmt(v.plain_scale) << ','
       << fmt(v.plain_ratio) << ',' << fmt(v.precond) << ',' << fmt(v.precond_scale) << ','
       << fmt(v.precond_ratio) << ',' << fmt(v.hat) << ',' << fmt(v.hat_scale) << ',' << fmt(v.hat_ratio) << '\n';
  }
  out.finish();

  bool ok = true;
  std::vector<double> plain, precond, hat;
  for (const auto& v : values) {
    if (!(v.plain < 0.0)) {
      std::cerr << "FAIL: plain potential not negative at n=" << v.n << " eps=" << fmt(v.eps) << "\n";
      ok = false;
    }
    if (v.eps <= 0.125 && !(v.precond > 0.0 && v.hat > 0.0)) {
      std::cerr << "FAIL: preconditioned potential not positive at n=" << v.n << " eps=" << fmt(v.eps) << "\n";
      ok = false;
    }
    plain.push_back(std::abs(v.plain_ratio));
    precond.push_back(v.precond_ratio);
    hat.push_back(v.hat_ratio);
  }
  if (ok) {
    const double bands[] = {band(plain), band(precond), band(hat)};
    const char* names[] = {"plain", "precond-id-f", "hat-pq"};
    for (int k = 0; k < 3; ++k) {
      std::cerr << "scaling-sweep " << names[k] << " ratio band=" << fmt(bands[k]) << "\n";
      if (!(bands[k] <= 4.0)) {
        std::cerr << "FAIL: " << names[k] << " ratio band exceeds 4\n";
        ok = false;
      }
    }
  }
  return ok ? kExitOk : kExitAssertion;
}

struct LemmaWriter {
  std::ostream* os;
  static int callback(const qel_lemma_row* row, void* user) {
    std::ostream& os = *static_cast<LemmaWriter*>(user)->os;
    os << row->seed << ',' << row->ell << ',' << fmt(row->c) << ',' << fmt(row->norm1) << ','
       << fmt(row->report.lhs) << ',' << fmt(row->report.rhs) << ',' << fmt(row->report.margin) << ','
       << row->report.holds << '\n';
    return 0;
  }
};

int cmd_verify_lemma(const Config& cfg) {
  if (!(cfg.lemma_c >= 0.0 && cfg.lemma_c <= 0.125)) {
    throw Failure{QEL_ERR_INVALID_ARGUMENT, "--c must lie in [0, 1/8]"};
  }
  Output out(cfg.out);
  out.stream() << "seed,ell,C,norm1,lhs,rhs,margin,holds\n";
  LemmaWriter writer{&out.stream()};
  qel_lemma_campaign_report report{};
  check(qel_lemma_campaign(cfg.ell_grid.data(), cfg.ell_grid.size(), cfg.instances, cfg.lemma_c, cfg.seed,
                           &LemmaWriter::callback, &writer, &report),
        "lemma campaign");
  out.finish();
  std::cerr << "verify-lemma instances=" << report.instances << " C=" << fmt(cfg.lemma_c)
            << " violations=" << report.violations << " min_margin=" << fmt(report.min_margin) << "\n";
  return report.violations == 0 ? kExitOk : kExitAssertion;
}

int cmd_verify_theorem2(const Config& cfg) {
  qel_theorem2_config config = qel_theorem2_default_config();
  if (cfg.n != 0) config.n = cfg.n;
  if (cfg.gates != 0) config.gates = cfg.gates;
  config.seed = cfg.seed;
  if (config.n < 2) throw Failure{QEL_ERR_INVALID_ARGUMENT, "--n must be at least 2"};

  qel_theorem2_report report{};
  qel_program* offending = nullptr;
  check(qel_verify_theorem2(&config, &report, &offending), "theorem 2 campaign");
  ProgramPtr program(offending);

  Output out(cfg.out);
  std::ostream& os = out.stream();
  os << "bin_lo,bin_hi,count\n";
  for (int b = 0; b < 10; ++b) {
    os << fmt(b / 10.0) << ',' << fmt((b + 1) / 10.0) << ',' << report.histogram[b] << '\n';
  }
  out.finish();

  std::cerr << "verify-theorem2 n=" << config.n << " gates=" << config.gates << " seed=" << config.seed
            << " rotations_checked=" << report.rotations_checked << " violations=" << report.violations
            << " max_ratio=" << fmt(report.max_ratio) << "\n";
  if (report.violations == 0) return kExitOk;

  const std::string path = cfg.program_out.empty() ? "theorem2_violation.qel" : cfg.program_out;
  if (program) {
    save_program(program.get(), path,
                 "theorem2 violation seed=" + std::to_string(config.seed) +
                     " step=" + std::to_string(report.first_violation_step));
    std::cerr << "offending program written to " << path << " (step " << report.first_violation_step << ")\n";
  }
  return kExitAssertion;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quasi-entropy experiments on linear gate programs"};
  app.require_subcommand(1);
  Config cfg;

  const std::map<std::string, std::string> routes{{"appendix-b", "appendix-b"}, {"fast", "fast"}};
  const std::vector<std::string> potentials{"plain", "precond-id-f", "hat-pq", "k-slice"};

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", cfg.out, "Output path (stdout when omitted)");
    sub->add_option("--seed", cfg.seed, "Random seed");
  };
  auto add_trace = [&](CLI::App* sub, const std::string& default_potential) {
    sub->add_option("--potential", cfg.potential, "Potential kind")
        ->check(CLI::IsMember(potentials))
        ->default_str(default_potential);
    sub->add_option("--slices", cfg.slices, "Matrix file with preconditioner slices (k-slice)");
    sub->add_option("--recompute-every", cfg.recompute_every, "Full recomputation period (0 disables)");
    sub->add_flag("--plot-data", cfg.plot_data, "Emit step,potential pairs only");
    sub->add_option("--program-out", cfg.program_out, "Also write the gate program to this path");
  };

  auto* run_wht = app.add_subcommand("run-wht", "Trace a potential along the fast WHT program");
  run_wht->add_option("--n", cfg.n, "Dimension (power of two)")->required();
  add_trace(run_wht, "plain");
  add_common(run_wht);

  auto* run_pert = app.add_subcommand("run-perturbation", "Synthesize Id + eps F and trace a potential");
  run_pert->add_option("--n", cfg.n, "Dimension (power of two)")->required();
  run_pert->add_option("--eps", cfg.eps, "Perturbation size in (0, 1/2)");
  run_pert->add_option("--route", cfg.route, "Synthesis route")->transform(CLI::IsMember(routes));
  add_trace(run_pert, "hat-pq");
  add_common(run_pert);

  auto* sweep = app.add_subcommand("scaling-sweep", "Endpoint potentials over an (n, eps) grid");
  sweep->add_option("--n-grid", cfg.n_grid, "Dimensions")->delimiter(',');
  sweep->add_option("--eps-grid", cfg.eps_grid, "Perturbation sizes")->delimiter(',');
  add_common(sweep);

  auto* lemma = app.add_subcommand("verify-lemma", "Randomized entropy-with-noise campaign");
  lemma->add_option("--c", cfg.lemma_c, "Noise constant C in [0, 1/8]");
  lemma->add_option("--instances", cfg.instances, "Instances per ell");
  lemma->add_option("--ell-grid", cfg.ell_grid, "Vector lengths")->delimiter(',');
  add_common(lemma);

  auto* thm2 = app.add_subcommand("verify-theorem2", "Random-program check of the rotation bound");
  thm2->add_option("--n", cfg.n, "Dimension");
  thm2->add_option("--gates", cfg.gates, "Program length");
  thm2->add_option("--program-out", cfg.program_out, "Where to write an offending program");
  add_common(thm2);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (run_wht->parsed()) {
      if (cfg.potential.empty()) cfg.potential = "plain";
      return cmd_run_wht(cfg);
    }
    if (run_pert->parsed()) {
      if (cfg.potential.empty()) cfg.potential = "hat-pq";
      return cmd_run_perturbation(cfg);
    }
    if (sweep->parsed()) return cmd_scaling_sweep(cfg);
    if (lemma->parsed()) return cmd_verify_lemma(cfg);
    if (thm2->parsed()) return cmd_verify_theorem2(cfg);
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    switch (f.status) {
      case QEL_ERR_INVALID_ARGUMENT:
      case QEL_ERR_PARSE:
      case QEL_ERR_IO:
        return kExitConfig;
      case QEL_ERR_BOUND_VIOLATION:
      case QEL_ERR_VERIFICATION:
      case QEL_ERR_DESYNC:
        return kExitAssertion;
      default:
        return kExitRuntime;
    }
  }
  return kExitConfig;
}
