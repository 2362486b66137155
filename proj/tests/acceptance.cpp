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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "oracles/reference.hpp"
#include "spinmem/cli.hpp"
#include "spinmem/spinmem.hpp"
#include "test_util.hpp"

namespace {

using namespace spinmem;

const ChainSpec kChain{4, 1.0, 0.0};

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::vector<double> steps(double start, double end, double step) { return tau_grid(start, end, step); }

// tau1, tau2 in {0.5, ..., 10}, r in {0, 0.3, 0.7, 1}, phi in {0, pi/3}
struct GridPoint {
  double tau1, tau2;
  FirstUseInput in;
};

std::vector<GridPoint> channel_grid() {
  std::vector<GridPoint> out;
  for (double t1 : steps(0.5, 10.0, 0.5)) {
    for (double t2 : steps(0.5, 10.0, 0.5)) {
      for (double r : {0.0, 0.3, 0.7, 1.0}) {
        for (double phi : {0.0, std::numbers::pi / 3}) out.push_back({t1, t2, {r, phi}});
      }
    }
  }
  return out;
}

ChannelMixture mixture_at(const GridPoint& g) {
  auto& cache = shared_propagator_cache();
  return second_use_channel(*cache.get(kChain, g.tau1), *cache.get(kChain, g.tau2), g.in);
}

Verdict structural() {
  ChainEvolver ev(kChain);
  double unitarity = 0.0, leakage = 0.0;
  for (double tau : steps(0.0, 10.0, 0.1)) {
    const ComplexMatrix u = ev.unitary(tau);
    unitarity = std::max(unitarity, Propagator::unitarity_defect(u));
    for (Eigen::Index a = 0; a < u.rows(); ++a) {
      for (Eigen::Index b = 0; b < u.cols(); ++b) {
        if (chain_basis::excitation_count(static_cast<std::size_t>(a)) !=
            chain_basis::excitation_count(static_cast<std::size_t>(b))) {
          leakage = std::max(leakage, std::abs(u(a, b)));
        }
      }
    }
  }
  return {unitarity < 1e-12 && leakage < 1e-12,
          "max unitarity defect " + num(unitarity) + ", max sector leakage " + num(leakage)};
}

Verdict completeness() {
  double ad = 0.0, mem = 0.0;
  for (double tau : steps(0.0, 10.0, 0.5)) {
    ad = std::max(ad, memoryless_kraus(*shared_propagator_cache().get(kChain, tau)).completeness_residual());
  }
  for (const auto& g : channel_grid()) {
    const auto mix = mixture_at(g);
    ad = std::max(ad, mix.kraus_ad.completeness_residual());
    mem = std::max(mem, mix.kraus_mem.completeness_residual());
  }
  return {ad < 1e-12 && mem < 1e-10, "memoryless residual " + num(ad) + ", memory residual " + num(mem)};
}

Verdict oracle_equivalence() {
  const auto grid = channel_grid();
  std::vector<StateVector> seconds;
  for (int i = 0; i < 20; ++i) seconds.push_back(testing::random_state(2));
  double worst = 0.0;
  for (const auto& g : grid) {
    const auto mix = mixture_at(g);
    for (const auto& psi : seconds) {
      const auto analytic = apply_mixture(mix, DensityMatrix::pure(psi));
      const auto simulated = second_use_output(kChain, g.tau1, g.tau2, g.in, psi);
      worst = std::max(worst, trace_distance(analytic, simulated));
    }
  }
  return {worst < 1e-9, std::to_string(grid.size()) + " points x 20 inputs, max trace distance " + num(worst)};
}

Verdict memory_parameter() {
  double gap = 0.0, ground = 0.0, transfer = 0.0;
  for (double tau : steps(0.0, 10.0, 0.05)) {
    const auto p = shared_propagator_cache().get(kChain, tau);
    for (double r : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      for (double phi : {0.0, std::numbers::pi / 3}) {
        const auto d = memory_delta(*p, *p, {r, phi});
        gap = std::max(gap, std::abs(d.direct - d.closed.value()));
        if (r == 1.0) ground = std::max({ground, std::abs(d.direct), std::abs(*d.closed)});
      }
    }
  }
  const auto mirror = Propagator::from_unitary(kChain, 1.0, perfect_transfer_unitary(4));
  for (double r : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const auto d = memory_delta(mirror, mirror, {r, 0.7});
    transfer = std::max({transfer, std::abs(d.direct), std::abs(*d.closed)});
  }
  return {gap < 1e-10 && ground < 1e-10 && transfer < 1e-10,
          "direct vs closed " + num(gap) + ", |delta| at r=1 " + num(ground) + ", at perfect transfer " +
              num(transfer)};
}

Verdict amplitude_identity() {
  double worst = 0.0;
  for (const auto& g : channel_grid()) worst = std::max(worst, mixture_at(g).identity_residual());
  return {worst < 1e-10, "max residual " + num(worst)};
}

Verdict fidelity_triangulation() {
  double spread = 0.0, r1_gap = 0.0, closed_gap = 0.0;
  for (double t1 : {1.0, 3.5, 6.0, 8.5}) {
    for (double t2 : {1.0, 3.5, 6.0, 8.5}) {
      for (double r : {0.0, 0.3, 0.7, 1.0}) {
        for (double phi : {0.0, std::numbers::pi / 3}) {
          const GridPoint g{t1, t2, {r, phi}};
          const auto mix = mixture_at(g);
          const auto f = avg_fidelity_second(mix);
          const double quad = bloch_average([&](const DensityMatrix& rho) { return apply_mixture(mix, rho); });
          const double sim = oracle::six_state_average([&](const ComplexMatrix& rho) {
            const ComplexVector v = Eigen::SelfAdjointEigenSolver<ComplexMatrix>(rho).eigenvectors().col(1);
            return ComplexMatrix(second_use_output(kChain, t1, t2, g.in, StateVector::normalized(v)).matrix());
          });
          spread = std::max({spread, std::abs(f.exact - quad), std::abs(f.exact - sim), std::abs(quad - sim)});
          closed_gap = std::max(closed_gap, std::abs(f.exact - f.closed_form));
          if (r == 1.0) {
            const double fav1 = avg_fidelity_first(*shared_propagator_cache().get(kChain, t2));
            r1_gap = std::max(r1_gap, std::abs((f.exact - f.closed_form) - fav1));
          }
        }
      }
    }
  }
  return {spread < 1e-6 && r1_gap < 1e-9,
          "max spread " + num(spread) + ", r=1 gap minus F_av1(tau2) " + num(r1_gap) +
              " (closed-form gap up to " + num(closed_gap) + ", informational)"};
}

Verdict figure_fidelity() {
  SweepConfig cfg;
  cfg.tau_start = 0.01;
  const auto fid = sweep_fidelity(cfg);
  const auto ent = sweep_entanglement(cfg);
  const auto tau = fid.values("tau"), f1 = fid.values("fav1"), f2 = fid.values("fav2_exact");
  const auto q = fid.values("one_minus_delta_quarter");
  const auto best = static_cast<std::size_t>(std::max_element(f1.begin(), f1.end()) - f1.begin());
  const double gap = std::abs(f2[best] - f1[best]);
  double local_max_at = -1.0;
  for (std::size_t i = 1; i + 1 < tau.size(); ++i) {
    if (tau[i] >= 4.4 && tau[i] <= 4.8 && q[i] > q[i - 1] && q[i] >= q[i + 1]) local_max_at = tau[i];
  }
  const auto c1 = ent.values("conc_first"), c2 = ent.values("conc_second");
  double excess = -1.0;
  for (std::size_t i = 0; i < c1.size(); ++i) excess = std::max(excess, c2[i] - c1[i]);
  return {gap < 0.02 && local_max_at > 0.0 && excess <= 1e-9,
          "fidelity gap " + num(gap) + " at tau " + num(tau[best]) + ", 1-delta/4 local max at tau " +
              num(local_max_at) + ", max(conc_second - conc_first) " + num(excess)};
}

Verdict figure_fmax() {
  const auto t = fmax_vs_delta(SweepConfig{});
  std::vector<std::vector<double>> by_tau = t.rows;
  std::sort(by_tau.begin(), by_tau.end(), [](const auto& a, const auto& b) { return a[0] < b[0]; });
  bool monotone = true;
  for (std::size_t i = 1; i < by_tau.size(); ++i) monotone = monotone && by_tau[i][1] >= by_tau[i - 1][1];
  const double rho = testing::spearman(t.values("delta"), t.values("fav2_max"));
  return {monotone && rho <= -0.9,
          std::string("delta nondecreasing in tau1: ") + (monotone ? "yes" : "no") + ", Spearman " + num(rho)};
}

Verdict figure_capacity() {
  SweepConfig cfg;
  cfg.tau_start = 0.2;
  cfg.tau_end = 10.0;
  cfg.tau_step = 0.2;
  const auto t = sweep_capacity(cfg);
  double worst_theta = 0.0, holevo_gap = -1.0, coh_gap = -1.0;
  for (const auto& row : t.rows) {
    worst_theta = std::max({worst_theta, row[t.column("theta_star")], row[t.column("theta_star_reset")]});
    holevo_gap = std::max(holevo_gap, row[t.column("holevo_memory_theta0")] - row[t.column("holevo_reset")]);
    coh_gap = std::max(coh_gap, row[t.column("coh_memory")] - row[t.column("coh_reset")]);
  }
  return {t.rows.size() == 50 && worst_theta == 0.0 && holevo_gap > 0.01 && coh_gap > 1e-3,
          std::to_string(t.rows.size()) + " points, max theta* (memory and reset) " + num(worst_theta) + ", best Holevo gap " +
              num(holevo_gap) + " nats, best coherent-information gap " + num(coh_gap) + " nats"};
}

Verdict determinism() {
  const std::vector<std::vector<std::string>> commands = {
      {"sweep-fidelity", "--tau-end", "10", "--tau-step", "0.05", "--r", "0.4", "--phi", "1"},
      {"sweep-fidelity", "--tau-end", "5", "--tau-step", "0.25", "--first-input", "haar"},
      {"sweep-entanglement", "--tau-end", "10", "--tau-step", "0.1"},
      {"fmax-vs-delta", "--tau2-end", "5", "--tau2-step", "0.05"},
      {"sweep-capacity", "--tau-start", "1", "--tau-end", "8", "--tau-step", "1.75"},
      {"discrepancy-report", "--tau-end", "6", "--tau-step", "1"},
      {"describe-columns"},
  };
  int mismatches = 0;
  for (const auto& cmd : commands) {
    auto run = [&](std::vector<std::string> args) {
      std::ostringstream out, err;
      const int code = run_cli(args, out, err);
      return std::to_string(code) + "\n" + out.str();
    };
    auto threaded = cmd;
    threaded.insert(threaded.end(), {"--threads", "8"});
    const auto a = run(cmd), b = run(cmd), c = run(threaded);
    if (a != b || a != c || a.rfind("0\n", 0) != 0) ++mismatches;
  }
  return {mismatches == 0,
          std::to_string(commands.size()) + " commands, serial x2 and 8 threads, " + std::to_string(mismatches) +
              " mismatches"};
}

struct Criterion {
  int id;
  std::string name;
  double budget_s;  // 0 = no runtime bound
  std::function<Verdict()> check;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "propagator unitarity and sector structure", 5.0, structural},
      {2, "Kraus completeness", 0.0, completeness},
      {3, "mixture vs brute-force simulation", 120.0, oracle_equivalence},
      {4, "memory parameter forms and zeros", 0.0, memory_parameter},
      {5, "amplitude identity", 0.0, amplitude_identity},
      {6, "fidelity triangulation", 0.0, fidelity_triangulation},
      {7, "fidelity and concurrence versus tau", 120.0, figure_fidelity},
      {8, "best fidelity versus memory parameter", 300.0, figure_fmax},
      {9, "Holevo quantity and coherent information", 600.0, figure_capacity},
      {10, "determinism", 0.0, determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool pass = v.pass;
    std::string timing = num(secs) + " s";
    if (c.budget_s > 0.0) {
      timing += " of " + num(c.budget_s) + " s";
      if (secs >= c.budget_s) pass = false;
    }
    if (!pass) ++failed;
    std::printf("criterion %2d %s: %s; %s [%s]\n", c.id, pass ? "PASS" : "FAIL", c.name.c_str(), v.detail.c_str(),
                timing.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
