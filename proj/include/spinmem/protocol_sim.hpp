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

// Brute-force simulation of the full sender/chain/receiver system.
//
// Each use k applies W(k) = P_R(k) U(tau_k) P_S(k): swap the sender S_k with
// chain site 1, evolve the chain, swap chain site N with the receiver R_k.
// States are kept as weighted ensembles of pure vectors; only a reset between
// uses splits a branch, so the two-use protocols never need a full density
// matrix over all qubits.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "spinmem/errors.hpp"
#include "spinmem/memory_channel.hpp"
#include "spinmem/qmath.hpp"
#include "spinmem/spin_chain.hpp"

namespace spinmem {

inline constexpr std::size_t kMaxQubits = 12;

/// Ordered, named qubit registers. Chain sites are named c1..cN and must be
/// contiguous and in order.
class RegisterLayout {
 public:
  explicit RegisterLayout(std::vector<std::string> names) : names_(std::move(names)) {
    if (names_.empty()) throw DimensionError("layout needs at least one qubit");
    if (names_.size() > kMaxQubits) {
      throw SizeError("layout of " + std::to_string(names_.size()) + " qubits exceeds the " +
                      std::to_string(kMaxQubits) + "-qubit cap");
    }
    for (std::size_t i = 0; i < names_.size(); ++i) {
      for (std::size_t j = i + 1; j < names_.size(); ++j) {
        if (names_[i] == names_[j]) throw DimensionError("duplicate register name " + names_[i]);
      }
    }
    for (std::size_t i = 0; i < names_.size(); ++i) {
      if (names_[i] == "c1") chain_begin_ = i;
    }
    if (chain_begin_) {
      while (*chain_begin_ + static_cast<std::size_t>(n_sites_) < names_.size() &&
             names_[*chain_begin_ + static_cast<std::size_t>(n_sites_)] == "c" + std::to_string(n_sites_ + 1)) {
        ++n_sites_;
      }
      for (const auto& nm : names_) {
        if (nm.size() > 1 && nm[0] == 'c' && nm.find_first_not_of("0123456789", 1) == std::string::npos &&
            std::stoi(nm.substr(1)) > n_sites_) {
          throw DimensionError("chain sites must be contiguous and ordered");
        }
      }
    }
  }

  /// [S'1, S1, S'2, S2, c1..cN, R1, R2] with references, else [S1, S2, c1..cN, R1, R2].
  static RegisterLayout two_use(int n_sites, bool with_references) {
    std::vector<std::string> names;
    if (with_references) names = {"S'1", "S1", "S'2", "S2"};
    else names = {"S1", "S2"};
    for (int i = 1; i <= n_sites; ++i) names.push_back("c" + std::to_string(i));
    names.emplace_back("R1");
    names.emplace_back("R2");
    return RegisterLayout(std::move(names));
  }

  std::size_t qubit_count() const { return names_.size(); }
  std::size_t dim() const { return std::size_t{1} << names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  std::vector<std::size_t> dims() const { return std::vector<std::size_t>(names_.size(), 2); }
  int n_sites() const { return n_sites_; }

  bool contains(std::string_view name) const {
    return std::find(names_.begin(), names_.end(), name) != names_.end();
  }
  std::size_t index(std::string_view name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) throw DimensionError("no register named " + std::string(name));
    return static_cast<std::size_t>(it - names_.begin());
  }
  std::vector<std::size_t> indices(const std::vector<std::string>& names) const {
    std::vector<std::size_t> out;
    for (const auto& n : names) out.push_back(index(n));
    return out;
  }
  std::vector<std::size_t> chain() const {
    if (!chain_begin_) throw DimensionError("layout has no chain");
    std::vector<std::size_t> out;
    for (int i = 0; i < n_sites_; ++i) out.push_back(*chain_begin_ + static_cast<std::size_t>(i));
    return out;
  }
  std::size_t sender(int use) const { return index("S" + std::to_string(use)); }
  std::size_t receiver(int use) const { return index("R" + std::to_string(use)); }
  std::size_t reference(int use) const { return index("S'" + std::to_string(use)); }

  /// Bit mask of qubit q inside a basis index (qubit 0 is most significant).
  std::size_t bit(std::size_t q) const { return std::size_t{1} << (names_.size() - 1 - q); }

 private:
  std::vector<std::string> names_;
  std::optional<std::size_t> chain_begin_;
  int n_sites_ = 0;
};

namespace detail {

inline void apply_operator(ComplexVector& psi, const RegisterLayout& layout, std::span<const std::size_t> targets,
                           const ComplexMatrix& u) {
  const std::size_t k = targets.size();
  if (static_cast<std::size_t>(u.rows()) != (std::size_t{1} << k) || u.rows() != u.cols()) {
    throw DimensionError("operator does not match the number of target qubits");
  }
  std::vector<std::size_t> offsets(std::size_t{1} << k, 0);
  std::size_t mask = 0;
  for (std::size_t j = 0; j < offsets.size(); ++j) {
    for (std::size_t t = 0; t < k; ++t) {
      if (j & (std::size_t{1} << (k - 1 - t))) offsets[j] |= layout.bit(targets[t]);
    }
  }
  for (auto t : targets) mask |= layout.bit(t);
  ComplexVector local(static_cast<Eigen::Index>(offsets.size()));
  for (std::size_t base = 0; base < static_cast<std::size_t>(psi.size()); ++base) {
    if (base & mask) continue;
    for (std::size_t j = 0; j < offsets.size(); ++j) local(static_cast<Eigen::Index>(j)) = psi(static_cast<Eigen::Index>(base | offsets[j]));
    const ComplexVector out = u * local;
    for (std::size_t j = 0; j < offsets.size(); ++j) psi(static_cast<Eigen::Index>(base | offsets[j])) = out(static_cast<Eigen::Index>(j));
  }
}

inline void apply_swap(ComplexVector& psi, const RegisterLayout& layout, std::size_t a, std::size_t b) {
  const auto ba = layout.bit(a);
  const auto bb = layout.bit(b);
  for (std::size_t i = 0; i < static_cast<std::size_t>(psi.size()); ++i) {
    if ((i & ba) && !(i & bb)) std::swap(psi(static_cast<Eigen::Index>(i)), psi(static_cast<Eigen::Index>(i ^ ba ^ bb)));
  }
}

}  // namespace detail

/// Full-register permutation matrix exchanging qubits a and b.
inline ComplexMatrix swap_operator(const RegisterLayout& layout, std::size_t a, std::size_t b) {
  if (a == b) throw ContractError("swap needs two distinct qubits");
  if (a >= layout.qubit_count() || b >= layout.qubit_count()) throw DimensionError("swap qubit out of range");
  const auto dim = static_cast<Eigen::Index>(layout.dim());
  ComplexMatrix p = ComplexMatrix::Zero(dim, dim);
  const auto ba = layout.bit(a);
  const auto bb = layout.bit(b);
  for (std::size_t i = 0; i < layout.dim(); ++i) {
    std::size_t j = i;
    if (((i & ba) != 0) != ((i & bb) != 0)) j = i ^ ba ^ bb;
    p(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = 1.0;
  }
  return p;
}

struct Branch {
  double weight = 1.0;
  ComplexVector psi;
};

/// Mixed state sum_b weight_b |psi_b><psi_b| over a register layout.
class PureEnsemble {
 public:
  PureEnsemble(RegisterLayout layout, std::vector<Branch> branches)
      : layout_(std::move(layout)), branches_(std::move(branches)) {
    for (const auto& br : branches_) {
      if (static_cast<std::size_t>(br.psi.size()) != layout_.dim()) throw DimensionError("branch dimension mismatch");
    }
  }

  const RegisterLayout& layout() const { return layout_; }
  const std::vector<Branch>& branches() const { return branches_; }

  double total_weight() const {
    double acc = 0.0;
    for (const auto& br : branches_) acc += br.weight;
    return acc;
  }
  /// Largest | ||psi_b||^2 - 1 | over branches.
  double norm_defect() const {
    double worst = 0.0;
    for (const auto& br : branches_) worst = std::max(worst, std::abs(br.psi.squaredNorm() - 1.0));
    return worst;
  }

  void apply(std::span<const std::size_t> targets, const ComplexMatrix& u) {
    for (auto& br : branches_) detail::apply_operator(br.psi, layout_, targets, u);
  }
  void swap(std::size_t a, std::size_t b) {
    for (auto& br : branches_) detail::apply_swap(br.psi, layout_, a, b);
  }

  /// Discards the chain and re-prepares it in `ground`, splitting each branch
  /// over the chain basis.
  void reset_chain(const StateVector& ground) {
    const auto chain = layout_.chain();
    const auto dims = layout_.dims();
    const auto split = detail::split_offsets(dims, chain);
    if (ground.dim() != split.keep.size()) throw DimensionError("ground state does not fit the chain");
    std::vector<Branch> out;
    for (const auto& br : branches_) {
      for (std::size_t c = 0; c < split.keep.size(); ++c) {
        double n2 = 0.0;
        for (auto e : split.env) n2 += std::norm(br.psi(static_cast<Eigen::Index>(split.keep[c] + e)));
        if (n2 < 1e-30) continue;
        const double scale = 1.0 / std::sqrt(n2);
        ComplexVector v = ComplexVector::Zero(br.psi.size());
        for (std::size_t g = 0; g < split.keep.size(); ++g) {
          if (ground[g] == Complex{}) continue;
          for (auto e : split.env) {
            v(static_cast<Eigen::Index>(split.keep[g] + e)) =
                ground[g] * br.psi(static_cast<Eigen::Index>(split.keep[c] + e)) * scale;
          }
        }
        out.push_back({br.weight * n2, std::move(v)});
      }
    }
    branches_ = std::move(out);
  }

  DensityMatrix reduced(const std::vector<std::size_t>& keep) const {
    std::vector<std::size_t> sorted = keep;
    std::sort(sorted.begin(), sorted.end());
    const auto dims = layout_.dims();
    const auto kd = static_cast<Eigen::Index>(std::size_t{1} << sorted.size());
    ComplexMatrix acc = ComplexMatrix::Zero(kd, kd);
    for (const auto& br : branches_) acc += br.weight * reduced_operator(br.psi, dims, sorted);
    return DensityMatrix(acc);
  }
  DensityMatrix reduced(const std::vector<std::string>& names) const { return reduced(layout_.indices(names)); }

 private:
  RegisterLayout layout_;
  std::vector<Branch> branches_;
};

/// A state placed on some registers before the first use.
struct RegisterPreparation {
  std::vector<std::string> registers;  // most significant first
  StateVector state;
};

struct ProtocolRun {
  ChainSpec spec;
  RegisterLayout layout = RegisterLayout::two_use(4, false);
  std::vector<double> taus;
  bool reset_between_uses = false;
  std::vector<RegisterPreparation> inputs;  // unlisted registers start in |0>
  // Replaces U(tau_k) for every use when set.
  std::optional<ComplexMatrix> chain_unitary;
};

struct RunResult {
  std::vector<PureEnsemble> after_use;  // state after each use

  const PureEnsemble& final_state() const { return after_use.back(); }
  DensityMatrix reduced(const std::vector<std::string>& names) const { return final_state().reduced(names); }
};

namespace detail {

inline ComplexVector initial_state(const ProtocolRun& run, const std::vector<RegisterPreparation>& inputs) {
  const auto& layout = run.layout;
  std::vector<bool> used(layout.qubit_count(), false);
  for (auto q : layout.chain()) used[q] = true;
  struct Group {
    std::vector<std::size_t> qubits;
    const ComplexVector* amps;
  };
  std::vector<Group> groups;
  for (const auto& prep : inputs) {
    Group g{layout.indices(prep.registers), &prep.state.amplitudes()};
    if (prep.state.dim() != (std::size_t{1} << g.qubits.size())) {
      throw DimensionError("preparation state does not match its registers");
    }
    for (auto q : g.qubits) {
      if (used[q]) throw DimensionError("register " + layout.names()[q] + " prepared twice or is a chain site");
      used[q] = true;
    }
    groups.push_back(std::move(g));
  }
  const StateVector ground = ground_state(run.spec);
  groups.push_back({layout.chain(), &ground.amplitudes()});

  std::size_t free_mask = 0;
  for (std::size_t q = 0; q < used.size(); ++q) {
    if (!used[q]) free_mask |= layout.bit(q);
  }
  ComplexVector psi = ComplexVector::Zero(static_cast<Eigen::Index>(layout.dim()));
  for (std::size_t i = 0; i < layout.dim(); ++i) {
    if (i & free_mask) continue;
    Complex amp = 1.0;
    for (const auto& g : groups) {
      std::size_t local = 0;
      for (auto q : g.qubits) local = (local << 1) | ((i & layout.bit(q)) ? 1u : 0u);
      amp *= (*g.amps)(static_cast<Eigen::Index>(local));
      if (amp == Complex{}) break;
    }
    psi(static_cast<Eigen::Index>(i)) = amp;
  }
  return psi;
}

inline ComplexMatrix chain_unitary_for(const ProtocolRun& run, double tau) {
  if (run.chain_unitary) return *run.chain_unitary;
  return shared_propagator_cache().get(run.spec, tau)->u_full();
}

inline void check_norm(const PureEnsemble& ens) {
  if (ens.norm_defect() > 1e-12 || std::abs(ens.total_weight() - 1.0) > 1e-10) {
    throw ModelError("norm not conserved during protocol run");
  }
}

}  // namespace detail

/// Runs the uses on a weighted mixture of input preparations.
inline RunResult run_uses_mixed(const ProtocolRun& run,
                                const std::vector<std::pair<double, std::vector<RegisterPreparation>>>& components) {
  run.spec.validate();
  if (run.taus.empty() || run.taus.size() > 2) throw ContractError("a run has one or two uses");
  if (run.layout.n_sites() != run.spec.n_sites) throw DimensionError("layout chain length differs from the spec");
  if (run.chain_unitary && static_cast<std::size_t>(run.chain_unitary->rows()) != run.spec.dim()) {
    throw DimensionError("chain unitary override has the wrong dimension");
  }
  std::vector<Branch> branches;
  for (const auto& [weight, inputs] : components) {
    if (weight < 0.0) throw ContractError("mixture weights must be non-negative");
    if (weight == 0.0) continue;
    branches.push_back({weight, detail::initial_state(run, inputs)});
  }
  PureEnsemble state(run.layout, std::move(branches));
  detail::check_norm(state);

  const auto chain = run.layout.chain();
  const StateVector ground = ground_state(run.spec);
  RunResult result;
  for (std::size_t k = 0; k < run.taus.size(); ++k) {
    const int use = static_cast<int>(k) + 1;
    if (k > 0 && run.reset_between_uses) state.reset_chain(ground);
    state.swap(run.layout.sender(use), chain.front());
    state.apply(chain, detail::chain_unitary_for(run, run.taus[k]));
    state.swap(chain.back(), run.layout.receiver(use));
    detail::check_norm(state);
    result.after_use.push_back(state);
  }
  return result;
}

inline RunResult run_uses(const ProtocolRun& run) { return run_uses_mixed(run, {{1.0, run.inputs}}); }

inline DensityMatrix reduced_state(const RunResult& result, const std::vector<std::string>& registers) {
  return result.reduced(registers);
}

/// (|00> + |11>)/sqrt(2).
inline StateVector bell_phi_plus() {
  ComplexVector v = ComplexVector::Zero(4);
  v(0) = v(3) = 1.0 / std::sqrt(2.0);
  return StateVector(std::move(v));
}

/// Second-use output on R2 for a pure first input and a given second input.
inline DensityMatrix second_use_output(const ChainSpec& spec, double tau1, double tau2, const FirstUseInput& first,
                                       const StateVector& second, bool reset = false,
                                       const std::optional<ComplexMatrix>& chain_unitary = std::nullopt) {
  ProtocolRun run;
  run.spec = spec;
  run.layout = RegisterLayout::two_use(spec.n_sites, false);
  run.taus = {tau1, tau2};
  run.reset_between_uses = reset;
  run.inputs = {{{"S1"}, first.state()}, {{"S2"}, second}};
  run.chain_unitary = chain_unitary;
  return run_uses(run).reduced({"R2"});
}

/// Choi matrix of the conditional second-use map, assembled by linearity from
/// the outputs for |0>, |1>, |+>, |+i>.
inline ComplexMatrix tomography_second_use(const ChainSpec& spec, double tau1, double tau2, const FirstUseInput& first,
                                           bool reset = false,
                                           const std::optional<ComplexMatrix>& chain_unitary = std::nullopt) {
  const double h = 1.0 / std::sqrt(2.0);
  ComplexVector v0(2), v1(2), vp(2), vi(2);
  v0 << 1.0, 0.0;
  v1 << 0.0, 1.0;
  vp << h, h;
  vi << h, Complex(0.0, h);
  auto out = [&](const ComplexVector& v) {
    return second_use_output(spec, tau1, tau2, first, StateVector(v), reset, chain_unitary).matrix();
  };
  const ComplexMatrix e00 = out(v0);
  const ComplexMatrix e11 = out(v1);
  // |0><1| = |+><+| + i |+i><+i| - (1 + i)/2 (|0><0| + |1><1|)
  const ComplexMatrix e01 = out(vp) + Complex(0.0, 1.0) * out(vi) - Complex(0.5, 0.5) * (e00 + e11);
  const ComplexMatrix e10 = e01.adjoint();
  ComplexMatrix choi(4, 4);
  choi.block(0, 0, 2, 2) = e00;
  choi.block(0, 2, 2, 2) = e01;
  choi.block(2, 0, 2, 2) = e10;
  choi.block(2, 2, 2, 2) = e11;
  return choi;
}

/// Both senders hold halves of `pair` (default |Phi+>) with references S'_k.
inline RunResult run_entanglement_run(const ChainSpec& spec, const std::vector<double>& taus, bool reset,
                                      const StateVector& pair = bell_phi_plus(),
                                      std::optional<ComplexMatrix> chain_unitary = std::nullopt) {
  ProtocolRun run;
  run.spec = spec;
  run.layout = RegisterLayout::two_use(spec.n_sites, true);
  run.taus = taus;
  run.reset_between_uses = reset;
  run.inputs = {{{"S'1", "S1"}, pair}, {{"S'2", "S2"}, pair}};
  run.chain_unitary = std::move(chain_unitary);
  return run_uses(run);
}

struct EntanglementStates {
  DensityMatrix first;   // (S'1, R1)
  DensityMatrix second;  // (S'2, R2)
};

inline EntanglementStates run_entanglement_setup(const ChainSpec& spec, const std::array<double, 2>& taus, bool reset,
                                                 const StateVector& pair = bell_phi_plus()) {
  const auto res = run_entanglement_run(spec, {taus[0], taus[1]}, reset, pair);
  return {res.reduced({"S'1", "R1"}), res.reduced({"S'2", "R2"})};
}

/// Sends each two-qubit state of `inputs` from (S1, S2) through both uses at
/// tau1 = tau2 = tau and returns the received states on (R1, R2).
inline std::vector<DensityMatrix> run_ensemble_outputs(const ChainSpec& spec, double tau,
                                                       const std::vector<StateVector>& inputs, bool reset = false,
                                                       std::optional<ComplexMatrix> chain_unitary = std::nullopt) {
  std::vector<DensityMatrix> out;
  ProtocolRun run;
  run.spec = spec;
  run.layout = RegisterLayout::two_use(spec.n_sites, false);
  run.taus = {tau, tau};
  run.reset_between_uses = reset;
  run.chain_unitary = std::move(chain_unitary);
  for (const auto& in : inputs) {
    if (in.dim() != 4) throw DimensionError("ensemble inputs are two-qubit states");
    run.inputs = {{{"S1", "S2"}, in}};
    out.push_back(run_uses(run).reduced({"R1", "R2"}));
  }
  return out;
}

}  // namespace spinmem
