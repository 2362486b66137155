// Copyright 2026 The spinmem Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Parameter sweeps over the evolution time, CSV tables and the consistency
// report. Rows are computed in parallel and assembled in grid order, so the
// output does not depend on the thread count.

#pragma once

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "spinmem/errors.hpp"
#include "spinmem/info_metrics.hpp"
#include "spinmem/memory_channel.hpp"
#include "spinmem/protocol_sim.hpp"
#include "spinmem/spin_chain.hpp"

namespace spinmem {

class UsageError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

enum class FirstInputMode { fixed, haar };

inline constexpr std::size_t kMaxGridPoints = 1'000'000;
inline constexpr int kHaarWeightNodes = 64;
inline constexpr int kHaarPhaseNodes = 16;
inline constexpr double kNormativeTolerance = 1e-9;

struct SweepConfig {
  int n_sites = 4;
  double coupling = 1.0;
  double field = 0.0;
  double tau_start = 0.0;
  double tau_end = 10.0;
  double tau_step = 0.01;
  double r = 0.0;
  double phi = 0.0;
  FirstInputMode first_input = FirstInputMode::fixed;
  bool reset = false;
  LogBase log_base = LogBase::natural;
  unsigned threads = 1;
  std::string out_path;
  // fmax-vs-delta grids
  double tau1_start = 3.3;
  double tau1_end = 3.9;
  double tau1_step = 0.05;
  double tau2_end = 20.0;
  double tau2_step = 0.01;

  ChainSpec chain() const { return {n_sites, coupling, field}; }
  FirstUseInput first() const { return {r, phi}; }

  void validate() const {
    try {
      chain().validate();
      first().validate();
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
    if (!(tau_step > 0.0)) throw UsageError("tau-step must be > 0");
    if (!(tau_start >= 0.0)) throw UsageError("tau-start must be >= 0");
    if (!(tau1_step > 0.0) || !(tau2_step > 0.0)) throw UsageError("tau1-step and tau2-step must be > 0");
  }
};

/// start, start + step, ... up to end (inclusive, with 1e-9 step slack).
inline std::vector<double> tau_grid(double start, double end, double step, bool skip_start = false) {
  if (!(step > 0.0)) throw UsageError("grid step must be > 0");
  if (end < start) throw UsageError("empty grid: end " + std::to_string(end) + " < start " + std::to_string(start));
  const double span = (end - start) / step;
  if (span + 1.0 > static_cast<double>(kMaxGridPoints)) throw UsageError("grid exceeds 10^6 points");
  const auto count = static_cast<std::size_t>(std::floor(span + 1e-9));
  std::vector<double> grid;
  for (std::size_t k = skip_start ? 1 : 0; k <= count; ++k) grid.push_back(start + static_cast<double>(k) * step);
  if (grid.empty()) throw UsageError("empty grid");
  return grid;
}

/// 12 significant digits, '.' decimal point, independent of the locale.
inline std::string format_number(double v) {
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 12);
  return std::string(buf, res.ptr);
}

inline std::string_view log_base_name(LogBase b) { return b == LogBase::two ? "bits" : "nats"; }

struct Table {
  std::vector<std::string> notes;  // emitted as '# ' lines before the header
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::size_t column(std::string_view name) const {
    auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw DimensionError("no column " + std::string(name));
    return static_cast<std::size_t>(it - columns.begin());
  }
  std::vector<double> values(std::string_view name) const {
    const auto c = column(name);
    std::vector<double> out;
    for (const auto& r : rows) out.push_back(r[c]);
    return out;
  }

  std::string to_csv() const {
    std::string out;
    for (const auto& n : notes) out += "# " + n + "\n";
    for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + columns[i];
    out += "\n";
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + format_number(row[i]);
      out += "\n";
    }
    return out;
  }
};

/// Calls fn(i) for i in [0, count) on `threads` workers; results keep index order.
template <class Fn>
auto parallel_map(std::size_t count, unsigned threads, Fn fn) -> std::vector<decltype(fn(std::size_t{}))> {
  using Result = decltype(fn(std::size_t{}));
  std::vector<Result> out(count);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count && !failed; i = next++) {
        try {
          out[i] = fn(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

namespace detail {

inline std::vector<std::string> config_notes(std::string_view command, const SweepConfig& c) {
  return {
      "command=" + std::string(command),
      "n=" + std::to_string(c.n_sites) + " j=" + format_number(c.coupling) + " b=" + format_number(c.field),
      "tau-start=" + format_number(c.tau_start) + " tau-end=" + format_number(c.tau_end) +
          " tau-step=" + format_number(c.tau_step),
      "r=" + format_number(c.r) + " phi=" + format_number(c.phi) +
          " first-input=" + (c.first_input == FirstInputMode::haar ? "haar" : "fixed") +
          " reset=" + (c.reset ? "true" : "false"),
      "units=" + std::string(log_base_name(c.log_base)),
  };
}

struct FidelityPoint {
  double delta = 0.0;
  double delta_closed = 0.0;
  double fav2_exact = 0.0;
  double fav2_eq8 = 0.0;
};

inline FidelityPoint fidelity_point(const Propagator& p1, const Propagator& p2, const FirstUseInput& in) {
  const auto mix = second_use_channel(p1, p2, in);
  const auto d = memory_delta(mix);
  const auto f = avg_fidelity_second(mix);
  return {d.direct, d.closed.value_or(std::nan("")), f.exact, f.closed_form};
}

/// Average over pure first inputs: midpoint rule in r^2 (uniform) times
/// equispaced phases.
inline FidelityPoint haar_fidelity_point(const Propagator& p1, const Propagator& p2) {
  FidelityPoint acc;
  const double w = 1.0 / (kHaarWeightNodes * kHaarPhaseNodes);
  for (int i = 0; i < kHaarWeightNodes; ++i) {
    const double r = std::sqrt((i + 0.5) / kHaarWeightNodes);
    for (int j = 0; j < kHaarPhaseNodes; ++j) {
      const auto pt = fidelity_point(p1, p2, {r, 2.0 * std::numbers::pi * j / kHaarPhaseNodes});
      acc.delta += w * pt.delta;
      acc.delta_closed += w * pt.delta_closed;
      acc.fav2_exact += w * pt.fav2_exact;
      acc.fav2_eq8 += w * pt.fav2_eq8;
    }
  }
  return acc;
}

}  // namespace detail

/// Second-use fidelity and memory parameter versus tau (tau1 = tau2 = tau).
inline Table sweep_fidelity(const SweepConfig& cfg) {
  cfg.validate();
  const auto spec = cfg.chain();
  const auto grid = tau_grid(cfg.tau_start, cfg.tau_end, cfg.tau_step);
  Table t;
  t.notes = detail::config_notes("sweep-fidelity", cfg);
  t.columns = {"tau", "f11_abs", "fN1_abs", "delta", "delta_closed", "one_minus_delta_quarter",
               "fav1", "fav2_exact", "fav2_eq8"};
  t.rows = parallel_map(grid.size(), cfg.threads, [&](std::size_t i) {
    const double tau = grid[i];
    const auto prop = shared_propagator_cache().get(spec, tau);
    const double fav1 = avg_fidelity_first(*prop);
    detail::FidelityPoint pt;
    if (cfg.reset) {
      pt = {0.0, 0.0, fav1, fav1};
    } else if (cfg.first_input == FirstInputMode::haar) {
      pt = detail::haar_fidelity_point(*prop, *prop);
    } else {
      pt = detail::fidelity_point(*prop, *prop, cfg.first());
    }
    return std::vector<double>{tau,
                               std::abs(prop->f(1, 1)),
                               std::abs(prop->f(spec.n_sites, 1)),
                               pt.delta,
                               pt.delta_closed,
                               1.0 - pt.delta / 4.0,
                               fav1,
                               pt.fav2_exact,
                               pt.fav2_eq8};
  });
  return t;
}

/// Concurrence delivered by the first and the second use, with and without reset.
inline Table sweep_entanglement(const SweepConfig& cfg) {
  cfg.validate();
  const auto spec = cfg.chain();
  const auto grid = tau_grid(cfg.tau_start, cfg.tau_end, cfg.tau_step);
  Table t;
  t.notes = detail::config_notes("sweep-entanglement", cfg);
  t.columns = {"tau", "fN1_abs", "fav1", "conc_first", "conc_second", "conc_second_reset"};
  t.rows = parallel_map(grid.size(), cfg.threads, [&](std::size_t i) {
    const double tau = grid[i];
    const auto prop = shared_propagator_cache().get(spec, tau);
    const auto mem = run_entanglement_setup(spec, {tau, tau}, false);
    const auto rst = run_entanglement_setup(spec, {tau, tau}, true);
    return std::vector<double>{tau, std::abs(prop->f(spec.n_sites, 1)), avg_fidelity_first(*prop),
                               concurrence(mem.first), concurrence(mem.second), concurrence(rst.second)};
  });
  return t;
}

/// Best second-use fidelity over tau2 against the memory parameter of tau1.
inline Table fmax_vs_delta(const SweepConfig& cfg) {
  cfg.validate();
  constexpr double kLow = 3.3, kHigh = 3.9;
  if (cfg.tau1_start < kLow - 1e-12 || cfg.tau1_end > kHigh + 1e-12) {
    throw UsageError("fmax-vs-delta: tau1 grid must lie within [3.3, 3.9]");
  }
  const auto spec = cfg.chain();
  const auto tau1s = tau_grid(cfg.tau1_start, cfg.tau1_end, cfg.tau1_step);
  const auto tau2s = tau_grid(0.0, cfg.tau2_end, cfg.tau2_step, true);
  Table t;
  t.notes = detail::config_notes("fmax-vs-delta", cfg);
  t.notes.push_back("tau1-start=" + format_number(cfg.tau1_start) + " tau1-end=" + format_number(cfg.tau1_end) +
                    " tau1-step=" + format_number(cfg.tau1_step));
  t.notes.push_back("tau2 search range (0, " + format_number(cfg.tau2_end) + "] step " + format_number(cfg.tau2_step));
  t.columns = {"tau1", "delta", "fav2_max", "tau2_at_max"};
  const auto input = cfg.first();
  t.rows = parallel_map(tau1s.size(), cfg.threads, [&](std::size_t i) {
    const double tau1 = tau1s[i];
    const auto p1 = shared_propagator_cache().get(spec, tau1);
    const double delta = memory_delta(*p1, *p1, input).direct;
    double best = -1.0, best_tau2 = 0.0;
    for (double tau2 : tau2s) {
      const auto p2 = shared_propagator_cache().get(spec, tau2);
      const double f = avg_fidelity_second(second_use_channel(*p1, *p2, input)).exact;
      if (f > best) {
        best = f;
        best_tau2 = tau2;
      }
    }
    return std::vector<double>{tau1, delta, best, best_tau2};
  });
  std::stable_sort(t.rows.begin(), t.rows.end(), [](const auto& a, const auto& b) { return a[1] < b[1]; });
  return t;
}

/// Holevo quantity and coherent information per use, memory versus reset chain.
inline Table sweep_capacity(const SweepConfig& cfg) {
  cfg.validate();
  const auto spec = cfg.chain();
  const auto grid = tau_grid(cfg.tau_start, cfg.tau_end, cfg.tau_step);
  const auto thetas = default_theta_grid();
  Table t;
  t.notes = detail::config_notes("sweep-capacity", cfg);
  t.notes.push_back("theta grid [0, pi/4] step pi/180 with golden-section refinement");
  t.columns = {"tau", "holevo_memory", "holevo_memory_theta0", "holevo_reset", "theta_star",
               "theta_star_reset", "coh_memory", "coh_reset"};
  t.rows = parallel_map(grid.size(), cfg.threads, [&](std::size_t i) {
    const auto p = capacity_point(spec, grid[i], thetas, cfg.log_base);
    return std::vector<double>{p.tau, p.holevo_memory, p.holevo_memory_theta0, p.holevo_reset,
                               p.theta_star, p.theta_star_reset, p.coherent_memory, p.coherent_reset};
  });
  return t;
}

inline std::string describe_columns() {
  return R"(sweep-fidelity (tau1 = tau2 = tau)
  tau                      evolution time of both uses, units 1/J
  f11_abs                  |f_11(tau)|, amplitude left on the first site
  fN1_abs                  |f_N1(tau)|, transfer amplitude to the last site
  delta                    memory parameter from the weighted Kraus distance (Haar average in haar mode)
  delta_closed             memory parameter from the equal-time closed form
  one_minus_delta_quarter  1 - delta/4
  fav1                     average fidelity of a use of a fresh chain
  fav2_exact               average fidelity of the second use from the channel mixture
  fav2_eq8                 closed-form second-use fidelity expression (informational)
  with --reset the second use runs on a reset chain: delta = 0 and fav2 columns equal fav1
sweep-entanglement
  tau                      evolution time of both uses
  fN1_abs                  |f_N1(tau)|
  fav1                     average fidelity of a use of a fresh chain
  conc_first               concurrence of (S'1, R1) after the first use
  conc_second              concurrence of (S'2, R2) after the second use, no reset
  conc_second_reset        concurrence of (S'2, R2) with the chain reset between uses
fmax-vs-delta
  tau1                     first-use evolution time
  delta                    memory parameter at tau1 (first input from --r/--phi, default |1>)
  fav2_max                 maximum over tau2 of the second-use average fidelity
  tau2_at_max              tau2 attaining fav2_max
  rows are sorted by delta ascending
sweep-capacity (units from --log-base)
  tau                      evolution time of both uses
  holevo_memory            max over theta of the Holevo quantity per use, no reset
  holevo_memory_theta0     Holevo quantity per use for product inputs, no reset
  holevo_reset             max over theta of the Holevo quantity per use, reset chain
  theta_star               maximizing theta, no reset
  theta_star_reset         maximizing theta, reset chain
  coh_memory               coherent information per use, no reset
  coh_reset                coherent information per use, reset chain
)";
}

struct DiscrepancyReport {
  std::string text;
  bool normative_ok = true;
};

/// Compares the analytic channel objects against the brute-force simulation
/// over a coarse (tau1, tau2, r, phi) grid.
inline DiscrepancyReport discrepancy_report(const SweepConfig& cfg) {
  cfg.validate();
  const auto spec = cfg.chain();
  const auto full = tau_grid(cfg.tau_start, cfg.tau_end, cfg.tau_step);
  constexpr std::size_t kCoarse = 6;
  std::vector<double> taus;
  for (std::size_t k = 0; k < std::min(kCoarse, full.size()); ++k) {
    const std::size_t idx = full.size() <= kCoarse ? k : k * (full.size() - 1) / (kCoarse - 1);
    taus.push_back(full[idx]);
  }
  const std::vector<double> rs = {0.0, 0.25, 0.5, 0.75, 1.0};
  const std::vector<double> phis = {0.0, std::numbers::pi / 3};

  struct Job {
    double tau1, tau2, r, phi;
  };
  std::vector<Job> jobs;
  for (double t1 : taus) {
    for (double t2 : taus) {
      for (double r : rs) {
        for (double phi : phis) jobs.push_back({t1, t2, r, phi});
      }
    }
  }
  struct Outcome {
    double trace_dist = 0.0, choi_dev = 0.0, completeness = 0.0, identity = 0.0;
    double delta_gap = -1.0, eq8_gap = 0.0, eq8_r1_excess = -1.0;
  };
  const double h = 1.0 / std::sqrt(2.0);
  std::vector<StateVector> probes;
  for (const auto& amps : std::vector<std::pair<Complex, Complex>>{
           {1.0, 0.0}, {0.0, 1.0}, {h, h}, {h, -h}, {h, Complex(0.0, h)}, {h, Complex(0.0, -h)}}) {
    ComplexVector v(2);
    v << amps.first, amps.second;
    probes.emplace_back(v);
  }
  const auto outcomes = parallel_map(jobs.size(), cfg.threads, [&](std::size_t i) {
    const auto& j = jobs[i];
    const FirstUseInput in{j.r, j.phi};
    const auto p1 = shared_propagator_cache().get(spec, j.tau1);
    const auto p2 = shared_propagator_cache().get(spec, j.tau2);
    const auto mix = second_use_channel(*p1, *p2, in);
    Outcome o;
    for (const auto& probe : probes) {
      const auto analytic = apply_mixture(mix, DensityMatrix::pure(probe));
      const auto oracle = second_use_output(spec, j.tau1, j.tau2, in, probe);
      o.trace_dist = std::max(o.trace_dist, trace_distance(analytic, oracle));
    }
    o.choi_dev = max_abs(choi_matrix(mix) - tomography_second_use(spec, j.tau1, j.tau2, in));
    o.completeness = mix.kraus_mem.completeness_residual();
    o.identity = mix.identity_residual();
    const auto d = memory_delta(mix);
    if (d.closed) o.delta_gap = std::abs(d.direct - *d.closed);
    const auto f = avg_fidelity_second(mix);
    o.eq8_gap = f.exact - f.closed_form;
    if (j.r == 1.0) o.eq8_r1_excess = std::abs(o.eq8_gap - avg_fidelity_first(*p2));
    return o;
  });

  auto worst = [&](auto field) {
    std::size_t arg = 0;
    double v = -1.0;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
      const double x = std::abs(field(outcomes[i]));
      if (x > v) {
        v = x;
        arg = i;
      }
    }
    return std::pair{v, arg};
  };
  auto at = [&](std::size_t i) {
    const auto& j = jobs[i];
    return "(tau1=" + format_number(j.tau1) + ", tau2=" + format_number(j.tau2) + ", r=" + format_number(j.r) +
           ", phi=" + format_number(j.phi) + ")";
  };
  auto verdict = [](double v, double tol) { return v <= tol ? "ok" : "EXCEEDED"; };

  std::ostringstream os;
  DiscrepancyReport rep;
  os << "spinmem discrepancy report\n\n[configuration]\n";
  for (const auto& n : detail::config_notes("discrepancy-report", cfg)) os << "  " << n << "\n";
  os << "  tau1, tau2 in {";
  for (std::size_t k = 0; k < taus.size(); ++k) os << (k ? ", " : "") << format_number(taus[k]);
  os << "}\n  r in {0, 0.25, 0.5, 0.75, 1}, phi in {0, pi/3}; " << jobs.size() << " points\n";
  os << "  fmax-vs-delta tau2 search range (0, " << format_number(cfg.tau2_end) << "] step "
     << format_number(cfg.tau2_step) << "\n";

  const auto [td, td_at] = worst([](const Outcome& o) { return o.trace_dist; });
  const auto [cd, cd_at] = worst([](const Outcome& o) { return o.choi_dev; });
  os << "\n[mixture vs brute-force simulation] normative, tolerance " << format_number(kNormativeTolerance) << "\n";
  os << "  max trace distance (6 probe inputs): " << format_number(td) << " at " << at(td_at) << "  "
     << verdict(td, kNormativeTolerance) << "\n";
  os << "  max Choi deviation: " << format_number(cd) << " at " << at(cd_at) << "  "
     << verdict(cd, kNormativeTolerance) << "\n";
  rep.normative_ok = td <= kNormativeTolerance && cd <= kNormativeTolerance;

  const auto [cr, cr_at] = worst([](const Outcome& o) { return o.completeness; });
  os << "\n[memory Kraus completeness] tolerance 1e-10\n";
  os << "  max residual: " << format_number(cr) << " at " << at(cr_at) << "  " << verdict(cr, 1e-10) << "\n";

  const auto [ir, ir_at] = worst([](const Outcome& o) { return o.identity; });
  os << "\n[amplitude identity sum|A|^2 = sum|B|^2 = 1 - |f_N1|^2 - |f_11|^2] tolerance 1e-10\n";
  os << "  max residual: " << format_number(ir) << " at " << at(ir_at) << "  " << verdict(ir, 1e-10) << "\n";

  const auto [dg, dg_at] = worst([](const Outcome& o) { return std::max(o.delta_gap, 0.0); });
  os << "\n[memory parameter: Kraus distance vs equal-time closed form] tolerance 1e-10\n";
  os << "  max gap (tau1 = tau2 points): " << format_number(dg) << " at " << at(dg_at) << "  " << verdict(dg, 1e-10)
     << "\n";

  const auto [eg, eg_at] = worst([](const Outcome& o) { return o.eq8_gap; });
  const auto [e1, e1_at] = worst([](const Outcome& o) { return std::max(o.eq8_r1_excess, 0.0); });
  os << "\n[closed-form second-use fidelity vs mixture] informational\n";
  os << "  max |exact - closed|: " << format_number(eg) << " at " << at(eg_at) << "\n";
  os << "  r = 1 rows: max | (exact - closed) - F_av1(tau2) |: " << format_number(e1) << " at " << at(e1_at) << "\n";
  os << "  (the closed form evaluates to 0 at r = 1, where the channel is memoryless)\n";

  os << "\n[verdict]\n  " << (rep.normative_ok ? "PASS" : "FAIL") << "\n";
  rep.text = os.str();
  return rep;
}

}  // namespace spinmem
