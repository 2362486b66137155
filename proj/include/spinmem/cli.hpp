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

// Command-line front end. Exit codes: 0 success, 1 usage error, 2 I/O error,
// 3 normative tolerance exceeded in the discrepancy report.

#pragma once

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "spinmem/sweep.hpp"

namespace spinmem {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitIo = 2, kExitTolerance = 3 };

namespace detail {

inline void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open output file '" + path + "'");
  f << text;
  f.close();
  if (!f) throw IoError("failed writing output file '" + path + "'");
}

}  // namespace detail

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spin-chain channel with memory: sweeps, figures and consistency report", "spinmem"};
  app.fallthrough();
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value configuration file; command-line flags take precedence");

  SweepConfig cfg;
  app.add_option("--n", cfg.n_sites, "number of chain sites N")->capture_default_str();
  app.add_option("--j", cfg.coupling, "coupling J")->capture_default_str();
  app.add_option("--b", cfg.field, "magnetic field B")->capture_default_str();
  app.add_option("--tau-start", cfg.tau_start, "first evolution time")->capture_default_str();
  app.add_option("--tau-end", cfg.tau_end, "last evolution time (inclusive)")->capture_default_str();
  app.add_option("--tau-step", cfg.tau_step, "evolution time step")->capture_default_str();
  app.add_option("--r", cfg.r, "first input r|0> + e^{i phi} sqrt(1-r^2)|1>")->capture_default_str();
  app.add_option("--phi", cfg.phi, "first input phase")->capture_default_str();
  const std::map<std::string, FirstInputMode> modes{{"fixed", FirstInputMode::fixed}, {"haar", FirstInputMode::haar}};
  app.add_option("--first-input", cfg.first_input, "fixed or haar (average over pure first inputs)")
      ->transform(CLI::CheckedTransformer(modes, CLI::ignore_case))
      ->option_text("fixed|haar [fixed]");
  app.add_flag("--reset", cfg.reset, "reset the chain between uses");
  const std::map<std::string, LogBase> bases{{"e", LogBase::natural}, {"2", LogBase::two}};
  app.add_option("--log-base", cfg.log_base, "entropy log base: e (nats) or 2 (bits)")
      ->transform(CLI::CheckedTransformer(bases))
      ->option_text("e|2 [e]");
  app.add_option("--threads", cfg.threads, "worker threads (0 = all cores)")->capture_default_str();
  app.add_option("--out", cfg.out_path, "output file (default stdout)");
  app.add_option("--tau1-start", cfg.tau1_start, "fmax-vs-delta: first tau1")->capture_default_str();
  app.add_option("--tau1-end", cfg.tau1_end, "fmax-vs-delta: last tau1")->capture_default_str();
  app.add_option("--tau1-step", cfg.tau1_step, "fmax-vs-delta: tau1 step")->capture_default_str();
  app.add_option("--tau2-end", cfg.tau2_end, "fmax-vs-delta: end of the tau2 search range")->capture_default_str();
  app.add_option("--tau2-step", cfg.tau2_step, "fmax-vs-delta: tau2 step")->capture_default_str();

  auto* fidelity = app.add_subcommand("sweep-fidelity", "second-use fidelity and memory parameter versus tau");
  auto* entanglement = app.add_subcommand("sweep-entanglement", "concurrence of both uses versus tau");
  auto* fmax = app.add_subcommand("fmax-vs-delta", "best second-use fidelity versus memory parameter");
  auto* capacity = app.add_subcommand("sweep-capacity", "Holevo quantity and coherent information versus tau");
  auto* report = app.add_subcommand("discrepancy-report", "analytic formulas against the brute-force simulation");
  auto* describe = app.add_subcommand("describe-columns", "document every CSV column");

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::FileError& e) {
    err << "spinmem: I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const CLI::ParseError& e) {
    err << "spinmem: " << e.what() << "\n" << "run with --help for usage\n";
    return kExitUsage;
  }

  try {
    if (describe->parsed()) {
      detail::emit(describe_columns(), cfg.out_path, out);
    } else if (fidelity->parsed()) {
      detail::emit(sweep_fidelity(cfg).to_csv(), cfg.out_path, out);
    } else if (entanglement->parsed()) {
      detail::emit(sweep_entanglement(cfg).to_csv(), cfg.out_path, out);
    } else if (fmax->parsed()) {
      detail::emit(fmax_vs_delta(cfg).to_csv(), cfg.out_path, out);
    } else if (capacity->parsed()) {
      detail::emit(sweep_capacity(cfg).to_csv(), cfg.out_path, out);
    } else if (report->parsed()) {
      const auto rep = discrepancy_report(cfg);
      detail::emit(rep.text, cfg.out_path, out);
      return rep.normative_ok ? kExitOk : kExitTolerance;
    }
  } catch (const UsageError& e) {
    err << "spinmem: usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    err << "spinmem: I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    err << "spinmem: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitOk;
}

}  // namespace spinmem
