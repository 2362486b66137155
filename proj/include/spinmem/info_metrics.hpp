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

// Entanglement and information measures evaluated on oracle outputs.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "spinmem/errors.hpp"
#include "spinmem/protocol_sim.hpp"
#include "spinmem/qmath.hpp"
#include "spinmem/spin_chain.hpp"

namespace spinmem {

/// Eigenvalues of a density matrix below this are dropped by `concurrence`.
inline constexpr double kConcurrenceRankCutoff = 1e-14;

/// Wootters concurrence; complex conjugation is taken in the computational basis.
/// With rho = W W^dagger (W = eigenvectors scaled by sqrt(p)), the lambda_i are
/// the singular values of W^T (sy sy) W.
inline double concurrence(const DensityMatrix& rho) {
  if (rho.dim() != 4) throw DimensionError("concurrence needs a two-qubit state");
  const ComplexMatrix yy = kron(pauli::y(), pauli::y());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho.matrix());
  std::vector<Eigen::Index> kept;
  for (Eigen::Index k = 0; k < 4; ++k) {
    if (es.eigenvalues()(k) > kConcurrenceRankCutoff) kept.push_back(k);
  }
  ComplexMatrix w(4, static_cast<Eigen::Index>(kept.size()));
  for (std::size_t c = 0; c < kept.size(); ++c) {
    w.col(static_cast<Eigen::Index>(c)) = std::sqrt(es.eigenvalues()(kept[c])) * es.eigenvectors().col(kept[c]);
  }
  const ComplexMatrix tau = w.transpose() * yy * w;
  const RealVector sv = Eigen::JacobiSVD<ComplexMatrix>(tau).singularValues();
  std::array<double, 4> lambda{};
  for (Eigen::Index k = 0; k < sv.size(); ++k) lambda[static_cast<std::size_t>(k)] = sv(k);
  std::sort(lambda.begin(), lambda.end(), std::greater<>());
  return std::clamp(lambda[0] - lambda[1] - lambda[2] - lambda[3], 0.0, 1.0);
}

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre rule on [-1, 1] (Newton iteration on P_n).
inline QuadratureRule gauss_legendre(int n) {
  QuadratureRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[static_cast<std::size_t>(i)] = -x;
    rule.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    rule.weights[static_cast<std::size_t>(i)] = w;
    rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  return rule;
}

using QubitChannel = std::function<DensityMatrix(const DensityMatrix&)>;

inline constexpr int kBlochPolarNodes = 32;
inline constexpr int kBlochAzimuthNodes = 64;

/// Average of tr(rho E(rho)) over pure inputs, uniform on the Bloch sphere.
inline double bloch_average(const QubitChannel& channel) {
  for (int b = 0; b < 2; ++b) {
    const double tr = channel(DensityMatrix::pure(StateVector::basis(2, static_cast<std::size_t>(b))))
                          .matrix()
                          .trace()
                          .real();
    if (std::abs(tr - 1.0) > 1e-10) throw ContractError("bloch_average: channel is not trace preserving");
  }
  static const QuadratureRule polar = gauss_legendre(kBlochPolarNodes);
  double acc = 0.0;
  for (std::size_t i = 0; i < polar.nodes.size(); ++i) {
    const double c = polar.nodes[i];
    const double sn = std::sqrt(std::max(0.0, 1.0 - c * c));
    double ring = 0.0;
    for (int j = 0; j < kBlochAzimuthNodes; ++j) {
      const double phi = 2.0 * std::numbers::pi * j / kBlochAzimuthNodes;
      const ComplexMatrix in = 0.5 * (pauli::i2() + sn * std::cos(phi) * pauli::x() +
                                      sn * std::sin(phi) * pauli::y() + c * pauli::z());
      const DensityMatrix rho(in);
      ring += (rho.matrix() * channel(rho).matrix()).trace().real();
    }
    acc += 0.5 * polar.weights[i] * ring / kBlochAzimuthNodes;
  }
  return acc;
}

/// chi = S(sum p_i rho_i) - sum p_i S(rho_i).
inline double holevo(const std::vector<DensityMatrix>& outputs, const std::vector<double>& priors,
                     LogBase base = LogBase::natural) {
  if (outputs.empty() || outputs.size() != priors.size()) throw DimensionError("holevo: one prior per output");
  double total = 0.0;
  for (auto p : priors) {
    if (p < 0.0) throw ContractError("holevo: negative prior");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) throw ContractError("holevo: priors must sum to 1");
  const auto dim = outputs.front().dim();
  ComplexMatrix avg = ComplexMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  double conditional = 0.0;
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    if (outputs[i].dim() != dim) throw DimensionError("holevo: outputs differ in dimension");
    avg += priors[i] * outputs[i].matrix();
    conditional += priors[i] * vn_entropy(outputs[i], base);
  }
  return std::max(0.0, vn_entropy(DensityMatrix(avg), base) - conditional);
}

/// Four equiprobable orthonormal two-qubit states interpolating between
/// product states (theta = 0) and maximally entangled ones (theta = pi/4).
struct ThetaEnsemble {
  double theta = 0.0;
  std::vector<StateVector> states;
  std::vector<double> priors;

  static ThetaEnsemble make(double theta) {
    const double h = 1.0 / std::sqrt(2.0);
    ComplexVector plus(2), minus(2);
    plus << h, h;
    minus << h, -h;
    auto prod = [](const ComplexVector& a, const ComplexVector& b) {
      return ComplexVector(kron(ComplexMatrix(a), ComplexMatrix(b)).col(0));
    };
    const ComplexVector pp = prod(plus, plus), mm = prod(minus, minus);
    const ComplexVector pm = prod(plus, minus), mp = prod(minus, plus);
    const double c = std::cos(theta), s = std::sin(theta);
    ThetaEnsemble e;
    e.theta = theta;
    e.states = {StateVector::normalized(c * pp + s * mm), StateVector::normalized(s * pp - c * mm),
                StateVector::normalized(c * pm + s * mp), StateVector::normalized(s * pm - c * mp)};
    e.priors = {0.25, 0.25, 0.25, 0.25};
    return e;
  }
};

/// 0 to pi/4 in steps of pi/180.
inline std::vector<double> default_theta_grid() {
  std::vector<double> grid;
  for (int k = 0; k <= 45; ++k) grid.push_back(std::numbers::pi * k / 180.0);
  return grid;
}

struct ThetaScan {
  std::vector<double> thetas;
  std::vector<double> values;  // Holevo quantity per use at each theta
  double c_max = 0.0;
  double theta_star = 0.0;
};

/// Holevo quantity per use of the theta ensemble through both uses at tau.
inline double holevo_per_use(const ChainSpec& spec, double tau, double theta, bool reset,
                             LogBase base = LogBase::natural,
                             const std::optional<ComplexMatrix>& chain_unitary = std::nullopt) {
  const auto ens = ThetaEnsemble::make(theta);
  return 0.5 * holevo(run_ensemble_outputs(spec, tau, ens.states, reset, chain_unitary), ens.priors, base);
}

/// Grid scan over theta, then golden-section refinement around the best grid
/// point. The refined point replaces the grid point only if it is strictly better.
inline ThetaScan holevo_sweep(const ChainSpec& spec, double tau, const std::vector<double>& theta_grid, bool reset,
                              LogBase base = LogBase::natural) {
  if (theta_grid.empty()) throw ContractError("holevo_sweep: empty theta grid");
  for (auto t : theta_grid) {
    if (t < 0.0 || t > std::numbers::pi / 4 + 1e-12) throw ContractError("holevo_sweep: theta outside [0, pi/4]");
  }
  ThetaScan scan;
  scan.thetas = theta_grid;
  for (auto t : theta_grid) scan.values.push_back(holevo_per_use(spec, tau, t, reset, base));
  const auto best = static_cast<std::size_t>(std::max_element(scan.values.begin(), scan.values.end()) - scan.values.begin());
  scan.c_max = scan.values[best];
  scan.theta_star = theta_grid[best];
  if (theta_grid.size() < 2) return scan;

  double lo = best > 0 ? theta_grid[best - 1] : theta_grid[best];
  double hi = best + 1 < theta_grid.size() ? theta_grid[best + 1] : theta_grid[best];
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  auto value = [&](double t) { return holevo_per_use(spec, tau, t, reset, base); };
  double x1 = hi - ratio * (hi - lo), x2 = lo + ratio * (hi - lo);
  double v1 = value(x1), v2 = value(x2);
  for (int iter = 0; iter < 60 && hi - lo > 1e-10; ++iter) {
    if (v1 < v2) {
      lo = x1;
      x1 = x2;
      v1 = v2;
      x2 = lo + ratio * (hi - lo);
      v2 = value(x2);
    } else {
      hi = x2;
      x2 = x1;
      v2 = v1;
      x1 = hi - ratio * (hi - lo);
      v1 = value(x1);
    }
  }
  const double refined = v1 > v2 ? x1 : x2;
  const double refined_value = std::max(v1, v2);
  if (refined_value > scan.c_max + 1e-12) {
    scan.c_max = refined_value;
    scan.theta_star = refined;
  }
  return scan;
}

/// S(R1 R2) - S(S'1 S'2 R1 R2), halved, with each sender holding half of a
/// maximally entangled pair. Negative values are returned as is.
inline double coherent_info_per_use(const ChainSpec& spec, double tau, bool reset, LogBase base = LogBase::natural,
                                    const std::optional<ComplexMatrix>& chain_unitary = std::nullopt) {
  const auto res = run_entanglement_run(spec, {tau, tau}, reset, bell_phi_plus(), chain_unitary);
  const double out = vn_entropy(res.reduced({"R1", "R2"}), base);
  const double joint = vn_entropy(res.reduced({"S'1", "S'2", "R1", "R2"}), base);
  return 0.5 * (out - joint);
}

/// Coherent information of a single use of a freshly prepared chain.
inline double single_use_coherent_info(const ChainSpec& spec, double tau, LogBase base = LogBase::natural) {
  const auto res = run_entanglement_run(spec, {tau}, false);
  return vn_entropy(res.reduced({"R1"}), base) - vn_entropy(res.reduced({"S'1", "R1"}), base);
}

struct CapacityPoint {
  double tau = 0.0;
  double holevo_memory = 0.0;         // max over theta
  double holevo_memory_theta0 = 0.0;  // product inputs
  double holevo_reset = 0.0;          // max over theta
  double theta_star = 0.0;
  double theta_star_reset = 0.0;
  double coherent_memory = 0.0;
  double coherent_reset = 0.0;
  LogBase units = LogBase::natural;
};

/// Memoryless references computed with the same machinery on a reset chain.
inline CapacityPoint reset_baselines(const ChainSpec& spec, double tau, const std::vector<double>& theta_grid,
                                     LogBase base = LogBase::natural) {
  CapacityPoint p;
  p.tau = tau;
  p.units = base;
  const auto scan = holevo_sweep(spec, tau, theta_grid, true, base);
  p.holevo_reset = scan.c_max;
  p.theta_star_reset = scan.theta_star;
  p.coherent_reset = coherent_info_per_use(spec, tau, true, base);
  return p;
}

inline CapacityPoint capacity_point(const ChainSpec& spec, double tau, const std::vector<double>& theta_grid,
                                    LogBase base = LogBase::natural) {
  CapacityPoint p = reset_baselines(spec, tau, theta_grid, base);
  const auto scan = holevo_sweep(spec, tau, theta_grid, false, base);
  p.holevo_memory = scan.c_max;
  p.theta_star = scan.theta_star;
  p.holevo_memory_theta0 = holevo_per_use(spec, tau, 0.0, false, base);
  p.coherent_memory = coherent_info_per_use(spec, tau, false, base);
  return p;
}

}  // namespace spinmem
