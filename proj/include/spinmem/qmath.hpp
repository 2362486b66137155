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

// Dense complex linear algebra and small quantum-state utilities.
//
// Ordering convention: in every tensor product the first factor is the most
// significant index. A register layout {d0, d1, ...} therefore maps digit
// tuples (i0, i1, ...) to i0 * (d1 * d2 * ...) + i1 * (d2 * ...) + ...

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "spinmem/errors.hpp"

namespace spinmem {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Largest Hilbert-space dimension any operation will build (12 qubits).
inline constexpr std::size_t kDimensionCap = std::size_t{1} << 12;

namespace tol {
inline constexpr double kHermitian = 1e-10;
inline constexpr double kTrace = 1e-10;
inline constexpr double kPositivity = 1e-10;
inline constexpr double kNorm = 1e-12;
// Eigenvalues below this contribute nothing to entropies.
inline constexpr double kEntropyCutoff = 1e-12;
}  // namespace tol

enum class LogBase { natural, two };

inline double log_in(double x, LogBase base) {
  return base == LogBase::two ? std::log2(x) : std::log(x);
}

inline double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double hermiticity_defect(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) {
    throw DimensionError("matrix is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                         ", expected square");
  }
  return max_abs(m - m.adjoint());
}

inline bool all_finite(const ComplexMatrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
    }
  }
  return true;
}

inline ComplexMatrix identity(std::size_t dim) {
  return ComplexMatrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
}

namespace pauli {
inline ComplexMatrix i2() { return identity(2); }
inline ComplexMatrix x() {
  ComplexMatrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}
inline ComplexMatrix y() {
  ComplexMatrix m(2, 2);
  m << 0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0;
  return m;
}
inline ComplexMatrix z() {
  ComplexMatrix m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}
}  // namespace pauli

/// Normalized pure state.
class StateVector {
 public:
  explicit StateVector(ComplexVector amplitudes) : amps_(std::move(amplitudes)) {
    if (amps_.size() == 0) throw DimensionError("state vector must be non-empty");
    if (!all_finite(amps_)) throw ContractError("state vector has non-finite amplitudes");
    const double norm2 = amps_.squaredNorm();
    if (std::abs(norm2 - 1.0) > tol::kNorm) {
      throw ContractError("state vector squared norm " + std::to_string(norm2) + " is not 1");
    }
  }

  static StateVector basis(std::size_t dim, std::size_t index) {
    if (index >= dim) throw DimensionError("basis index out of range");
    ComplexVector v = ComplexVector::Zero(static_cast<Eigen::Index>(dim));
    v(static_cast<Eigen::Index>(index)) = 1.0;
    return StateVector(std::move(v));
  }

  /// Rescales `v` to unit norm; throws on a zero vector.
  static StateVector normalized(ComplexVector v) {
    const double n = v.norm();
    if (!(n > 0.0)) throw ContractError("cannot normalize a zero vector");
    v /= n;
    return StateVector(std::move(v));
  }

  std::size_t dim() const { return static_cast<std::size_t>(amps_.size()); }
  const ComplexVector& amplitudes() const { return amps_; }
  Complex operator[](std::size_t i) const { return amps_(static_cast<Eigen::Index>(i)); }
  ComplexMatrix projector() const { return amps_ * amps_.adjoint(); }

 private:
  ComplexVector amps_;
};

/// Hermitian, unit-trace, positive semidefinite matrix (all to 1e-10).
class DensityMatrix {
 public:
  explicit DensityMatrix(const ComplexMatrix& m) {
    if (m.rows() == 0) throw DimensionError("density matrix must be non-empty");
    if (!all_finite(m)) throw ContractError("density matrix has non-finite entries");
    const double defect = hermiticity_defect(m);
    if (defect > tol::kHermitian) {
      throw ContractError("density matrix is not Hermitian (defect " + std::to_string(defect) + ")");
    }
    rho_ = 0.5 * (m + m.adjoint());
    const double tr = rho_.trace().real();
    if (std::abs(tr - 1.0) > tol::kTrace) {
      throw ContractError("density matrix trace " + std::to_string(tr) + " is not 1");
    }
    const double min_eig =
        Eigen::SelfAdjointEigenSolver<ComplexMatrix>(rho_, Eigen::EigenvaluesOnly).eigenvalues()(0);
    if (min_eig < -tol::kPositivity) {
      throw ContractError("density matrix has negative eigenvalue " + std::to_string(min_eig));
    }
  }

  static DensityMatrix pure(const StateVector& psi) { return DensityMatrix(psi.projector()); }

  static DensityMatrix maximally_mixed(std::size_t dim) {
    return DensityMatrix(identity(dim) / static_cast<double>(dim));
  }

  std::size_t dim() const { return static_cast<std::size_t>(rho_.rows()); }
  const ComplexMatrix& matrix() const { return rho_; }

 private:
  ComplexMatrix rho_;
};

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b,
                          std::size_t cap = kDimensionCap) {
  const auto rows = static_cast<std::size_t>(a.rows()) * static_cast<std::size_t>(b.rows());
  const auto cols = static_cast<std::size_t>(a.cols()) * static_cast<std::size_t>(b.cols());
  if (rows > cap || cols > cap) {
    throw SizeError("kron result " + std::to_string(rows) + "x" + std::to_string(cols) +
                    " exceeds dimension cap " + std::to_string(cap));
  }
  ComplexMatrix out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

inline StateVector kron(const StateVector& a, const StateVector& b, std::size_t cap = kDimensionCap) {
  return StateVector(kron(ComplexMatrix(a.amplitudes()), ComplexMatrix(b.amplitudes()), cap).col(0));
}

inline DensityMatrix kron(const DensityMatrix& a, const DensityMatrix& b,
                          std::size_t cap = kDimensionCap) {
  return DensityMatrix(kron(a.matrix(), b.matrix(), cap));
}

namespace detail {

// Splits a layout into kept and traced subsystems; full index = keep[i] + env[e].
struct SplitOffsets {
  std::vector<std::size_t> keep;
  std::vector<std::size_t> env;
  std::size_t total = 1;
};

inline SplitOffsets split_offsets(std::span<const std::size_t> dims, std::span<const std::size_t> keep) {
  if (dims.empty()) throw DimensionError("empty subsystem layout");
  if (keep.empty()) throw DimensionError("partial trace must keep at least one subsystem");
  std::vector<bool> kept(dims.size(), false);
  for (auto k : keep) {
    if (k >= dims.size()) throw DimensionError("kept subsystem index out of range");
    if (kept[k]) throw DimensionError("kept subsystem listed twice");
    kept[k] = true;
  }
  std::vector<std::size_t> stride(dims.size(), 1);
  for (std::size_t k = dims.size(); k-- > 1;) stride[k - 1] = stride[k] * dims[k];

  SplitOffsets out;
  out.keep.push_back(0);
  out.env.push_back(0);
  // Walk subsystems from least to most significant so that, within each group,
  // earlier subsystems stay more significant.
  for (std::size_t k = dims.size(); k-- > 0;) {
    if (dims[k] == 0) throw DimensionError("subsystem dimension must be positive");
    auto& group = kept[k] ? out.keep : out.env;
    std::vector<std::size_t> next;
    next.reserve(group.size() * dims[k]);
    for (std::size_t digit = 0; digit < dims[k]; ++digit) {
      for (auto off : group) next.push_back(off + digit * stride[k]);
    }
    group = std::move(next);
  }
  out.total = stride[0] * dims[0];
  return out;
}

}  // namespace detail

/// Reduced state on the subsystems in `keep` (kept in layout order).
inline DensityMatrix partial_trace(const DensityMatrix& state, std::span<const std::size_t> dims,
                                   std::span<const std::size_t> keep) {
  const auto split = detail::split_offsets(dims, keep);
  if (split.total != state.dim()) {
    throw DimensionError("layout dimension " + std::to_string(split.total) +
                         " does not match state dimension " + std::to_string(state.dim()));
  }
  const auto& rho = state.matrix();
  const auto kd = static_cast<Eigen::Index>(split.keep.size());
  ComplexMatrix out = ComplexMatrix::Zero(kd, kd);
  for (Eigen::Index i = 0; i < kd; ++i) {
    for (Eigen::Index j = 0; j < kd; ++j) {
      Complex acc = 0.0;
      for (auto e : split.env) {
        acc += rho(static_cast<Eigen::Index>(split.keep[i] + e), static_cast<Eigen::Index>(split.keep[j] + e));
      }
      out(i, j) = acc;
    }
  }
  return DensityMatrix(out);
}

/// Unnormalized reduced operator Tr_env |psi><psi| of an arbitrary vector.
inline ComplexMatrix reduced_operator(const ComplexVector& psi, std::span<const std::size_t> dims,
                                      std::span<const std::size_t> keep) {
  const auto split = detail::split_offsets(dims, keep);
  if (split.total != static_cast<std::size_t>(psi.size())) {
    throw DimensionError("layout dimension does not match state vector dimension");
  }
  const auto kd = static_cast<Eigen::Index>(split.keep.size());
  const auto ed = static_cast<Eigen::Index>(split.env.size());
  ComplexMatrix m(kd, ed);
  for (Eigen::Index i = 0; i < kd; ++i) {
    for (Eigen::Index e = 0; e < ed; ++e) m(i, e) = psi(static_cast<Eigen::Index>(split.keep[i] + split.env[e]));
  }
  return m * m.adjoint();
}

/// Partial trace of a pure state without forming the full density matrix.
inline DensityMatrix partial_trace(const StateVector& psi, std::span<const std::size_t> dims,
                                   std::span<const std::size_t> keep) {
  return DensityMatrix(reduced_operator(psi.amplitudes(), dims, keep));
}

struct EigenSystem {
  RealVector values;     // ascending
  ComplexMatrix vectors;  // columns are eigenvectors
};

inline EigenSystem herm_eig(const ComplexMatrix& h) {
  const double defect = hermiticity_defect(h);
  if (defect > tol::kHermitian) {
    throw ContractError("herm_eig: matrix is not Hermitian (defect " + std::to_string(defect) + ")");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(0.5 * (h + h.adjoint()));
  if (solver.info() != Eigen::Success) throw ContractError("herm_eig: eigensolver did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

/// exp(-i (H - offset) t) from a precomputed eigensystem of H.
inline ComplexMatrix evolve_unitary(const EigenSystem& eig, double t, double energy_offset = 0.0) {
  const auto dim = eig.values.size();
  if (t == 0.0) return ComplexMatrix::Identity(dim, dim);
  ComplexVector phases(dim);
  for (Eigen::Index k = 0; k < dim; ++k) {
    phases(k) = std::polar(1.0, -(eig.values(k) - energy_offset) * t);
  }
  return eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
}

inline ComplexMatrix evolve_unitary(const ComplexMatrix& h, double t) {
  return evolve_unitary(herm_eig(h), t);
}

inline double vn_entropy(const DensityMatrix& rho, LogBase base = LogBase::natural) {
  const RealVector ev =
      Eigen::SelfAdjointEigenSolver<ComplexMatrix>(rho.matrix(), Eigen::EigenvaluesOnly).eigenvalues();
  double s = 0.0;
  for (Eigen::Index k = 0; k < ev.size(); ++k) {
    const double p = ev(k);
    if (p > tol::kEntropyCutoff) s -= p * log_in(p, base);
  }
  return std::max(s, 0.0);
}

inline double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim()) throw DimensionError("trace_distance: dimension mismatch");
  const RealVector ev =
      Eigen::SelfAdjointEigenSolver<ComplexMatrix>(a.matrix() - b.matrix(), Eigen::EigenvaluesOnly)
          .eigenvalues();
  return std::clamp(0.5 * ev.cwiseAbs().sum(), 0.0, 1.0);
}

}  // namespace spinmem
