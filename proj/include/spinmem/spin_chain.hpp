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

// Open ferromagnetic Heisenberg chain
//
//   H = -J sum_i sigma_i . sigma_{i+1} - B sum_i sigma^z_i
//
// on N spins, and the transition amplitudes f that parameterize the channel
// formulas. Basis: |0> is sigma^z = +1, site 1 is the most significant bit
// of a basis index. Sites are 1-based in every public signature.

#pragma once

#include <bit>
#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <tuple>
#include <utility>

#include "spinmem/errors.hpp"
#include "spinmem/qmath.hpp"

namespace spinmem {

inline constexpr int kMaxSites = 12;

struct ChainSpec {
  int n_sites = 4;
  double coupling = 1.0;  // J
  double field = 0.0;     // B

  void validate() const {
    if (n_sites < 2) throw ContractError("chain needs at least 2 sites");
    if (n_sites > kMaxSites) {
      throw SizeError("chain of " + std::to_string(n_sites) + " sites exceeds the " +
                      std::to_string(kMaxSites) + "-site cap");
    }
    if (!(coupling > 0.0) || !std::isfinite(coupling)) throw ContractError("coupling J must be > 0");
    if (!(field >= 0.0) || !std::isfinite(field)) throw ContractError("field B must be >= 0");
  }

  std::size_t dim() const { return std::size_t{1} << n_sites; }
  std::size_t pair_count() const { return static_cast<std::size_t>(n_sites * (n_sites - 1) / 2); }

  friend bool operator==(const ChainSpec&, const ChainSpec&) = default;
};

namespace chain_basis {

inline std::size_t site_bit(int n_sites, int site) {
  if (site < 1 || site > n_sites) throw DimensionError("site " + std::to_string(site) + " out of range");
  return std::size_t{1} << (n_sites - site);
}

/// |m>: a single flipped spin at site m.
inline std::size_t one_excitation(int n_sites, int m) { return site_bit(n_sites, m); }

/// |pq>: flipped spins at sites p and q (p != q).
inline std::size_t two_excitation(int n_sites, int p, int q) {
  if (p == q) throw ContractError("two-excitation state needs distinct sites");
  return site_bit(n_sites, p) | site_bit(n_sites, q);
}

inline int excitation_count(std::size_t index) { return std::popcount(index); }

/// Position of the pair (p, q), p < q, in lexicographic order.
inline std::size_t pair_slot(int n_sites, int p, int q) {
  if (p > q) std::swap(p, q);
  if (p == q || p < 1 || q > n_sites) throw DimensionError("invalid site pair");
  std::size_t slot = 0;
  for (int a = 1; a < p; ++a) slot += static_cast<std::size_t>(n_sites - a);
  return slot + static_cast<std::size_t>(q - p - 1);
}

}  // namespace chain_basis

inline ComplexMatrix build_hamiltonian(const ChainSpec& spec) {
  spec.validate();
  const int n = spec.n_sites;
  const auto dim = static_cast<Eigen::Index>(spec.dim());
  ComplexMatrix h = ComplexMatrix::Zero(dim, dim);
  for (Eigen::Index s = 0; s < dim; ++s) {
    const auto idx = static_cast<std::size_t>(s);
    for (int site = 1; site < n; ++site) {
      const auto bi = chain_basis::site_bit(n, site);
      const auto bj = chain_basis::site_bit(n, site + 1);
      const bool aligned = ((idx & bi) != 0) == ((idx & bj) != 0);
      h(s, s) += aligned ? -spec.coupling : spec.coupling;
      // sigma^x sigma^x + sigma^y sigma^y = 2 (|01><10| + |10><01|)
      if (!aligned) h(static_cast<Eigen::Index>(idx ^ bi ^ bj), s) += -2.0 * spec.coupling;
    }
    const int flipped = chain_basis::excitation_count(idx);
    h(s, s) += -spec.field * static_cast<double>(n - 2 * flipped);
  }
  return h;
}

/// Eigendecomposition of H_ch, reused for every evolution time of a sweep.
class ChainEvolver {
 public:
  explicit ChainEvolver(const ChainSpec& spec)
      : spec_(spec), hamiltonian_(build_hamiltonian(spec)), eig_(herm_eig(hamiltonian_)) {
    ground_energy_ = hamiltonian_(0, 0).real();
    const ComplexVector residual = hamiltonian_.col(0) - ground_energy_ * ComplexVector::Unit(hamiltonian_.rows(), 0);
    if (residual.cwiseAbs().maxCoeff() > 1e-10) throw ModelError("|0...0> is not an eigenstate of H_ch");
    if (eig_.values(0) < ground_energy_ - 1e-10) {
      throw ModelError("|0...0> is not a ground state (E=" + std::to_string(ground_energy_) +
                       ", min=" + std::to_string(eig_.values(0)) + ")");
    }
    if (spec.field > 0.0 && eig_.values.size() > 1 && eig_.values(1) - eig_.values(0) > 1e-9 &&
        std::abs(eig_.vectors(0, 0)) < 1.0 - 1e-10) {
      throw ModelError("lowest eigenvector differs from |0...0> at positive field");
    }
  }

  const ChainSpec& spec() const { return spec_; }
  const ComplexMatrix& hamiltonian() const { return hamiltonian_; }
  const EigenSystem& eigensystem() const { return eig_; }
  double ground_energy() const { return ground_energy_; }

  /// exp(-i (H - E_gs) tau): amplitudes are referenced to the ground-state phase.
  ComplexMatrix unitary(double tau) const { return evolve_unitary(eig_, tau, ground_energy_); }

 private:
  ChainSpec spec_;
  ComplexMatrix hamiltonian_;
  EigenSystem eig_;
  double ground_energy_ = 0.0;
};

/// All spins aligned with +z. At B = 0 this picks |0...0> out of the
/// degenerate ground multiplet by convention.
inline StateVector ground_state(const ChainSpec& spec) {
  ChainEvolver check(spec);
  return StateVector::basis(spec.dim(), 0);
}

/// Chain-reversal permutation (site j -> N + 1 - j); transfers site 1 to site N
/// perfectly. Used as a perfect-transfer stand-in for U(tau).
inline ComplexMatrix perfect_transfer_unitary(int n_sites) {
  const auto dim = std::size_t{1} << n_sites;
  ComplexMatrix u = ComplexMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t s = 0; s < dim; ++s) {
    std::size_t mirrored = 0;
    for (int site = 1; site <= n_sites; ++site) {
      if (s & chain_basis::site_bit(n_sites, site)) mirrored |= chain_basis::site_bit(n_sites, n_sites + 1 - site);
    }
    u(static_cast<Eigen::Index>(mirrored), static_cast<Eigen::Index>(s)) = 1.0;
  }
  return u;
}

/// U(tau) on the full chain plus its one- and two-excitation amplitudes.
class Propagator {
 public:
  Propagator(const ChainEvolver& evolver, double tau)
      : Propagator(evolver.spec(), tau, evolver.unitary(check_tau(tau))) {}

  /// Wraps an externally supplied chain unitary; all invariants are checked.
  static Propagator from_unitary(const ChainSpec& spec, double tau, ComplexMatrix u) {
    return Propagator(spec, check_tau(tau), std::move(u));
  }

  const ChainSpec& spec() const { return spec_; }
  double tau() const { return tau_; }
  const ComplexMatrix& u_full() const { return u_; }

  /// f_{mn}(tau) = <m|U(tau)|n>.
  Complex f(int m, int n) const { return f_one_(m - 1, n - 1); }
  /// N x N single-excitation block; entry (m-1, n-1) is f_{mn}.
  const ComplexMatrix& f_one() const { return f_one_; }

  /// f_{pq,nm}(tau) = <pq|U(tau)|nm>; site pairs are unordered.
  Complex f2(int p, int q, int n, int m) const {
    const int ns = spec_.n_sites;
    return f_two_(static_cast<Eigen::Index>(chain_basis::pair_slot(ns, p, q)),
                  static_cast<Eigen::Index>(chain_basis::pair_slot(ns, n, m)));
  }
  /// Two-excitation block in lexicographic pair order.
  const ComplexMatrix& f_two() const { return f_two_; }

  /// Largest |<a|U|b>| between basis states of different excitation number.
  double sector_leakage() const {
    double worst = 0.0;
    for (Eigen::Index a = 0; a < u_.rows(); ++a) {
      for (Eigen::Index b = 0; b < u_.cols(); ++b) {
        if (chain_basis::excitation_count(static_cast<std::size_t>(a)) !=
            chain_basis::excitation_count(static_cast<std::size_t>(b))) {
          worst = std::max(worst, std::abs(u_(a, b)));
        }
      }
    }
    return worst;
  }

  static double unitarity_defect(const ComplexMatrix& m) {
    return max_abs(m.adjoint() * m - ComplexMatrix::Identity(m.rows(), m.cols()));
  }

 private:
  static double check_tau(double tau) {
    if (!(tau >= 0.0) || !std::isfinite(tau)) throw ContractError("evolution time must be finite and >= 0");
    return tau;
  }

  Propagator(const ChainSpec& spec, double tau, ComplexMatrix u) : spec_(spec), tau_(tau), u_(std::move(u)) {
    spec_.validate();
    if (static_cast<std::size_t>(u_.rows()) != spec_.dim() || u_.rows() != u_.cols()) {
      throw DimensionError("propagator must be a " + std::to_string(spec_.dim()) + "-dim square matrix");
    }
    const int n = spec_.n_sites;
    f_one_.resize(n, n);
    for (int m = 1; m <= n; ++m) {
      for (int k = 1; k <= n; ++k) {
        f_one_(m - 1, k - 1) = u_(static_cast<Eigen::Index>(chain_basis::one_excitation(n, m)),
                                  static_cast<Eigen::Index>(chain_basis::one_excitation(n, k)));
      }
    }
    const auto pairs = static_cast<Eigen::Index>(spec_.pair_count());
    f_two_.resize(pairs, pairs);
    for (int p = 1; p <= n; ++p) {
      for (int q = p + 1; q <= n; ++q) {
        for (int a = 1; a <= n; ++a) {
          for (int b = a + 1; b <= n; ++b) {
            f_two_(static_cast<Eigen::Index>(chain_basis::pair_slot(n, p, q)),
                   static_cast<Eigen::Index>(chain_basis::pair_slot(n, a, b))) =
                u_(static_cast<Eigen::Index>(chain_basis::two_excitation(n, p, q)),
                   static_cast<Eigen::Index>(chain_basis::two_excitation(n, a, b)));
          }
        }
      }
    }
    constexpr double kTol = 1e-12;
    if (unitarity_defect(u_) > kTol) throw ContractError("propagator is not unitary");
    if (unitarity_defect(f_one_) > kTol) throw ContractError("single-excitation block is not unitary");
    if (unitarity_defect(f_two_) > kTol) throw ContractError("two-excitation block is not unitary");
    if (sector_leakage() > kTol) throw ContractError("propagator mixes excitation sectors");
  }

  ChainSpec spec_;
  double tau_ = 0.0;
  ComplexMatrix u_;
  ComplexMatrix f_one_;
  ComplexMatrix f_two_;
};

inline Propagator propagator(const ChainSpec& spec, double tau) { return Propagator(ChainEvolver(spec), tau); }

/// Thread-safe memo of evolvers per spec and propagators per (spec, tau).
class PropagatorCache {
 public:
  std::shared_ptr<const ChainEvolver> evolver(const ChainSpec& spec) {
    const SpecKey key{spec.n_sites, spec.coupling, spec.field};
    {
      std::shared_lock lock(mutex_);
      if (auto it = evolvers_.find(key); it != evolvers_.end()) return it->second;
    }
    auto built = std::make_shared<const ChainEvolver>(spec);
    std::unique_lock lock(mutex_);
    return evolvers_.try_emplace(key, std::move(built)).first->second;
  }

  std::shared_ptr<const Propagator> get(const ChainSpec& spec, double tau) {
    const Key key{spec.n_sites, spec.coupling, spec.field, tau};
    {
      std::shared_lock lock(mutex_);
      if (auto it = propagators_.find(key); it != propagators_.end()) return it->second;
    }
    auto built = std::make_shared<const Propagator>(*evolver(spec), tau);
    std::unique_lock lock(mutex_);
    if (propagators_.size() >= kMaxEntries) propagators_.clear();
    return propagators_.try_emplace(key, std::move(built)).first->second;
  }

  std::size_t size() const {
    std::shared_lock lock(mutex_);
    return propagators_.size();
  }

 private:
  using SpecKey = std::tuple<int, double, double>;
  using Key = std::tuple<int, double, double, double>;
  static constexpr std::size_t kMaxEntries = 1u << 16;

  mutable std::shared_mutex mutex_;
  std::map<SpecKey, std::shared_ptr<const ChainEvolver>> evolvers_;
  std::map<Key, std::shared_ptr<const Propagator>> propagators_;
};

inline PropagatorCache& shared_propagator_cache() {
  static PropagatorCache cache;
  return cache;
}

}  // namespace spinmem
