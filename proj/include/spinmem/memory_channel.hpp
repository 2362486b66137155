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

// Kraus description of the chain used twice without resetting.
//
// First use: the amplitude-damping set M_1..M_{N+1}. Second use: with
// probability p0 + p1 q the chain again acts as amplitude damping, otherwise
// it applies the memory set M'_1..M'_{N+1}, whose entries mix the residual
// excitation of the first use (A_m, B_{k1k2}) with the new input.

#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "spinmem/errors.hpp"
#include "spinmem/qmath.hpp"
#include "spinmem/spin_chain.hpp"

namespace spinmem {

/// Probabilities below this are treated as exactly zero.
inline constexpr double kDegenerateWeight = 1e-14;

/// Pure first input r|0> + e^{i phi} sqrt(1 - r^2)|1>.
struct FirstUseInput {
  double r = 0.0;
  double phi = 0.0;

  void validate() const {
    if (!(r >= 0.0 && r <= 1.0)) throw ContractError("first input r must lie in [0, 1]");
    if (!std::isfinite(phi)) throw ContractError("first input phase must be finite");
  }
  double s() const { return std::sqrt(std::max(0.0, 1.0 - r * r)); }
  StateVector state() const {
    ComplexVector v(2);
    v << r, std::polar(s(), phi);
    return StateVector::normalized(std::move(v));
  }
};

class KrausSet {
 public:
  KrausSet() = default;
  KrausSet(std::vector<ComplexMatrix> operators, std::vector<std::string> labels)
      : operators_(std::move(operators)), labels_(std::move(labels)) {
    if (operators_.size() != labels_.size()) throw DimensionError("one label per Kraus operator");
    for (const auto& k : operators_) {
      if (k.rows() != 2 || k.cols() != 2) throw DimensionError("Kraus operators must be 2x2");
    }
  }

  const std::vector<ComplexMatrix>& operators() const { return operators_; }
  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t size() const { return operators_.size(); }
  const ComplexMatrix& operator[](std::size_t i) const { return operators_[i]; }

  /// max-abs of sum K^dagger K - I.
  double completeness_residual() const {
    ComplexMatrix acc = ComplexMatrix::Zero(2, 2);
    for (const auto& k : operators_) acc += k.adjoint() * k;
    return max_abs(acc - identity(2));
  }

  /// Linear action on an arbitrary 2x2 operator.
  ComplexMatrix act(const ComplexMatrix& x) const {
    ComplexMatrix out = ComplexMatrix::Zero(2, 2);
    for (const auto& k : operators_) out += k * x * k.adjoint();
    return out;
  }

 private:
  std::vector<ComplexMatrix> operators_;
  std::vector<std::string> labels_;
};

inline std::vector<std::string> kraus_labels(const std::string& stem, int count) {
  std::vector<std::string> out;
  for (int i = 1; i <= count; ++i) out.push_back(stem + "_" + std::to_string(i));
  return out;
}

/// Memoryless single use: M_m = [[0, f_m1], [0, 0]] (m < N),
/// M_N = diag(1, f_N1), M_{N+1} = 0.
inline KrausSet memoryless_kraus(const Propagator& prop) {
  const int n = prop.spec().n_sites;
  std::vector<ComplexMatrix> ops;
  for (int m = 1; m < n; ++m) {
    ComplexMatrix k = ComplexMatrix::Zero(2, 2);
    k(0, 1) = prop.f(m, 1);
    ops.push_back(std::move(k));
  }
  ComplexMatrix last = ComplexMatrix::Zero(2, 2);
  last(0, 0) = 1.0;
  last(1, 1) = prop.f(n, 1);
  ops.push_back(std::move(last));
  ops.push_back(ComplexMatrix::Zero(2, 2));
  return KrausSet(std::move(ops), kraus_labels("M", n + 1));
}

/// Chain state after the first use: p0 |0><0| + p1 |psi1><psi1|.
struct PostFirstState {
  double p0 = 1.0;
  double p1 = 0.0;
  double q = 0.0;  // probability that the residual excitation sits on site 1
  StateVector psi1 = StateVector::basis(2, 0);
  bool reset = false;  // p1 vanished and the chain is back in its ground state
};

inline PostFirstState post_first_channel_state(const Propagator& prop1, const FirstUseInput& input) {
  input.validate();
  const auto& spec = prop1.spec();
  const int n = spec.n_sites;
  const double s2 = 1.0 - input.r * input.r;
  PostFirstState out;
  out.p0 = s2 * std::norm(prop1.f(n, 1));
  out.p1 = 1.0 - out.p0;
  if (out.p1 < kDegenerateWeight) {
    out.p0 = 1.0;
    out.p1 = 0.0;
    out.q = 0.0;
    out.psi1 = StateVector::basis(spec.dim(), 0);
    out.reset = true;
    return out;
  }
  ComplexVector v = ComplexVector::Zero(static_cast<Eigen::Index>(spec.dim()));
  v(0) = input.r;
  const Complex lead = std::polar(input.s(), input.phi);
  for (int m = 1; m < n; ++m) {
    v(static_cast<Eigen::Index>(chain_basis::one_excitation(n, m))) = lead * prop1.f(m, 1);
  }
  out.psi1 = StateVector::normalized(v / std::sqrt(out.p1));
  out.q = std::clamp(s2 * std::norm(prop1.f(1, 1)) / out.p1, 0.0, 1.0);
  return out;
}

/// Second-use channel: rho -> weight_ad * xi_AD(rho) + weight_mem * xi_Mem(rho).
struct ChannelMixture {
  double weight_ad = 1.0;
  double weight_mem = 0.0;
  KrausSet kraus_ad;
  KrausSet kraus_mem;
  std::vector<Complex> a;  // A_m at index m - 1, m = 1..N
  ComplexMatrix b;         // B_{k1k2} at (k1 - 1, k2 - 1), k1 < k2; zero elsewhere
  PostFirstState post_first;
  FirstUseInput input;
  double tau1 = 0.0;
  double tau2 = 0.0;
  Complex f11_first;   // f_11(tau1)
  Complex fn1_first;   // f_N1(tau1)
  Complex fn1_second;  // f_N1(tau2)
  bool folded = false;  // memory branch vanished, kraus_mem is the memoryless set

  int n_sites() const { return static_cast<int>(a.size()); }

  double sum_a2() const {
    double acc = 0.0;
    for (auto v : a) acc += std::norm(v);
    return acc;
  }
  /// Sum over 1 <= k1 < k2 <= last_site of |B_{k1k2}|^2.
  double sum_b2(int last_site) const {
    double acc = 0.0;
    for (int k1 = 1; k1 <= last_site; ++k1) {
      for (int k2 = k1 + 1; k2 <= last_site; ++k2) acc += std::norm(b(k1 - 1, k2 - 1));
    }
    return acc;
  }
  /// 1 - |f_N1(tau1)|^2 - |f_11(tau1)|^2, the common value of sum|A|^2 and sum|B|^2.
  double residual_norm2() const { return 1.0 - std::norm(fn1_first) - std::norm(f11_first); }
  double identity_residual() const {
    const double target = residual_norm2();
    return std::max(std::abs(sum_a2() - target), std::abs(sum_b2(n_sites()) - target));
  }

  ComplexMatrix act(const ComplexMatrix& x) const {
    return weight_ad * kraus_ad.act(x) + weight_mem * kraus_mem.act(x);
  }
};

inline ChannelMixture second_use_channel(const Propagator& prop1, const Propagator& prop2,
                                         const FirstUseInput& input) {
  input.validate();
  if (!(prop1.spec() == prop2.spec())) throw ContractError("both uses must share one chain");
  const int n = prop1.spec().n_sites;

  ChannelMixture mix;
  mix.input = input;
  mix.tau1 = prop1.tau();
  mix.tau2 = prop2.tau();
  mix.f11_first = prop1.f(1, 1);
  mix.fn1_first = prop1.f(n, 1);
  mix.fn1_second = prop2.f(n, 1);
  mix.post_first = post_first_channel_state(prop1, input);
  mix.kraus_ad = memoryless_kraus(prop2);

  // The residual first-use excitation sits on sites 2..N-1; site 1 is swapped
  // out by the second input and site N went to the first receiver.
  mix.a.assign(static_cast<std::size_t>(n), Complex{});
  mix.b = ComplexMatrix::Zero(n, n);
  for (int res = 2; res <= n - 1; ++res) {
    const Complex amp = prop1.f(res, 1);
    for (int m = 1; m <= n; ++m) mix.a[static_cast<std::size_t>(m - 1)] += prop2.f(m, res) * amp;
    for (int k1 = 1; k1 <= n; ++k1) {
      for (int k2 = k1 + 1; k2 <= n; ++k2) mix.b(k1 - 1, k2 - 1) += prop2.f2(k1, k2, 1, res) * amp;
    }
  }

  const auto& pf = mix.post_first;
  const double weight_mem = pf.p1 - pf.p1 * pf.q;
  if (weight_mem < kDegenerateWeight) {
    mix.weight_ad = 1.0;
    mix.weight_mem = 0.0;
    mix.kraus_mem = KrausSet(mix.kraus_ad.operators(), kraus_labels("M'", n + 1));
    mix.folded = true;
    return mix;
  }
  mix.weight_ad = pf.p0 + pf.p1 * pf.q;
  mix.weight_mem = weight_mem;

  const double r = input.r;
  const Complex lead = std::polar(input.s(), input.phi);
  const double norm = 1.0 / std::sqrt(weight_mem);
  std::vector<ComplexMatrix> ops;
  for (int m = 1; m < n; ++m) {
    ComplexMatrix k(2, 2);
    k << mix.a[static_cast<std::size_t>(m - 1)] * lead, prop2.f(m, 1) * r, 0.0, mix.b(m - 1, n - 1) * lead;
    ops.push_back(norm * k);
  }
  ComplexMatrix kn(2, 2);
  kn << r, 0.0, mix.a[static_cast<std::size_t>(n - 1)] * lead, r * prop2.f(n, 1);
  ops.push_back(norm * kn);
  ComplexMatrix scatter = ComplexMatrix::Zero(2, 2);
  scatter(0, 1) = lead * std::sqrt(mix.sum_b2(n - 1));
  ops.push_back(norm * scatter);
  mix.kraus_mem = KrausSet(std::move(ops), kraus_labels("M'", n + 1));
  return mix;
}

inline DensityMatrix apply_kraus(const KrausSet& set, const DensityMatrix& rho) {
  if (rho.dim() != 2) throw DimensionError("Kraus channels act on a single qubit");
  return DensityMatrix(set.act(rho.matrix()));
}

inline DensityMatrix apply_mixture(const ChannelMixture& mix, const DensityMatrix& rho) {
  if (rho.dim() != 2) throw DimensionError("Kraus channels act on a single qubit");
  return DensityMatrix(mix.act(rho.matrix()));
}

/// Choi matrix sum_ij |i><j| (x) E(|i><j|) of a qubit map.
template <class Channel>
ComplexMatrix choi_matrix(const Channel& channel) {
  ComplexMatrix choi = ComplexMatrix::Zero(4, 4);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      ComplexMatrix unit = ComplexMatrix::Zero(2, 2);
      unit(i, j) = 1.0;
      choi.block(2 * i, 2 * j, 2, 2) = channel.act(unit);
    }
  }
  return choi;
}

struct MemoryDelta {
  double direct = 0.0;
  std::optional<double> closed;  // only defined for tau1 == tau2
};

/// Weighted Kraus distance between the memory and memoryless second uses,
/// with operators paired by index.
inline MemoryDelta memory_delta(const ChannelMixture& mix) {
  MemoryDelta out;
  for (std::size_t i = 0; i < mix.kraus_mem.size(); ++i) {
    const ComplexMatrix d = mix.kraus_mem[i] - mix.kraus_ad[i];
    out.direct += (d.adjoint() * d).trace().real();
  }
  out.direct *= mix.weight_mem;
  if (mix.tau1 == mix.tau2) {
    const auto& pf = mix.post_first;
    const double r = mix.input.r;
    const double w = std::max(0.0, pf.p1 - pf.p1 * pf.q);
    const double gap = r - std::sqrt(w);
    out.closed = 2.0 * ((1.0 - r * r) * mix.residual_norm2() + gap * gap);
  }
  return out;
}

inline MemoryDelta memory_delta(const Propagator& prop1, const Propagator& prop2, const FirstUseInput& input) {
  return memory_delta(second_use_channel(prop1, prop2, input));
}

/// Bloch-averaged fidelity of the memoryless channel, from f_N1 alone.
inline double avg_fidelity_first(Complex fn1) { return 0.5 + fn1.real() / 3.0 + std::norm(fn1) / 6.0; }

inline double avg_fidelity_first(const Propagator& prop) {
  return avg_fidelity_first(prop.f(prop.spec().n_sites, 1));
}

/// Average fidelity of a trace-preserving qubit Kraus map: 1/3 + sum|tr K|^2 / 6.
inline double kraus_avg_fidelity(const KrausSet& set) {
  double acc = 0.0;
  for (const auto& k : set.operators()) acc += std::norm(k.trace());
  return 1.0 / 3.0 + acc / 6.0;
}

struct SecondUseFidelity {
  double exact = 0.0;       // from the mixture
  double closed_form = 0.0;  // closed-form expression, for comparison only
};

inline SecondUseFidelity avg_fidelity_second(const ChannelMixture& mix) {
  SecondUseFidelity out;
  out.exact = mix.weight_ad * kraus_avg_fidelity(mix.kraus_ad);
  if (mix.weight_mem > 0.0) out.exact += mix.weight_mem * kraus_avg_fidelity(mix.kraus_mem);

  // Closed form. Unlabelled f_11, f_N1 in the last term are read at tau1.
  const int n = mix.n_sites();
  const double s2 = 1.0 - mix.input.r * mix.input.r;
  const auto& pf = mix.post_first;
  double cross = 0.0;
  for (int m = 1; m <= n - 1; ++m) {
    cross += 2.0 * (mix.a[static_cast<std::size_t>(m - 1)] * std::conj(mix.b(m - 1, n - 1))).real();
  }
  out.closed_form = (pf.p0 + pf.p1 * pf.q) * avg_fidelity_first(mix.fn1_second) + s2 / 6.0 * cross -
                  s2 * std::norm(mix.a[static_cast<std::size_t>(n - 1)]) / 6.0 +
                  2.0 * s2 / 3.0 * mix.residual_norm2();
  return out;
}

}  // namespace spinmem
