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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "spinmem/qmath.hpp"
#include "test_util.hpp"

namespace spinmem {
namespace {

using testing::random_density;
using testing::random_hermitian;
using testing::random_state;

ComplexMatrix diag2(Complex a, Complex b) {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

TEST(Kron, IdentityTimesIdentity) {
  EXPECT_LT(max_abs(kron(identity(2), identity(2)) - identity(4)), 1e-15);
}

TEST(Kron, ProjectorBlock) {
  ComplexMatrix expect = ComplexMatrix::Zero(4, 4);
  expect(0, 0) = expect(1, 1) = 1.0;
  EXPECT_LT(max_abs(kron(diag2(1.0, 0.0), identity(2)) - expect), 1e-15);
}

TEST(Kron, DoubleBitFlip) {
  const ComplexVector out = kron(pauli::x(), pauli::x()) * StateVector::basis(4, 0).amplitudes();
  EXPECT_LT(max_abs(out - StateVector::basis(4, 3).amplitudes()), 1e-15);
}

TEST(Kron, MixedProductProperty) {
  const auto a = random_hermitian(2), b = random_hermitian(3), c = random_hermitian(2), d = random_hermitian(3);
  EXPECT_LT(max_abs(kron(a, b) * kron(c, d) - kron(a * c, b * d)), 1e-12);
}

TEST(Kron, StatesAndDensities) {
  const auto a = random_state(2), b = random_state(4);
  const auto psi = kron(a, b);
  EXPECT_EQ(psi.dim(), 8u);
  EXPECT_LT(max_abs(kron(DensityMatrix::pure(a), DensityMatrix::pure(b)).matrix() - psi.projector()), 1e-13);
}

TEST(Kron, RejectsOversizedResult) {
  EXPECT_THROW(kron(identity(64), identity(128)), SizeError);
  EXPECT_THROW(kron(identity(2), identity(2), 2), SizeError);
}

TEST(StateVector, ValidatesNorm) {
  ComplexVector v(2);
  v << 1.0, 1.0;
  EXPECT_THROW(StateVector{v}, ContractError);
  EXPECT_NO_THROW(StateVector::normalized(v));
  EXPECT_THROW(StateVector::normalized(ComplexVector::Zero(2)), ContractError);
  EXPECT_THROW(StateVector::basis(2, 2), DimensionError);
  v << std::nan(""), 0.0;
  EXPECT_THROW(StateVector{v}, ContractError);
}

TEST(DensityMatrix, ValidatesContract) {
  EXPECT_THROW(DensityMatrix(identity(2)), ContractError);            // trace 2
  EXPECT_THROW(DensityMatrix(diag2(1.5, -0.5)), ContractError);       // negative
  ComplexMatrix skew = identity(2) / 2.0;
  skew(0, 1) = 0.1;
  EXPECT_THROW(DensityMatrix{skew}, ContractError);                   // not Hermitian
  EXPECT_THROW(DensityMatrix(ComplexMatrix(0, 0)), DimensionError);
  EXPECT_NO_THROW(DensityMatrix::maximally_mixed(8));
}

TEST(PartialTrace, ProductBasisState) {
  const std::vector<std::size_t> dims{2, 2}, keep{0};
  const auto rho = partial_trace(DensityMatrix::pure(StateVector::basis(4, 0)), dims, keep);
  EXPECT_LT(max_abs(rho.matrix() - diag2(1.0, 0.0)), 1e-15);
}

TEST(PartialTrace, BellStateEitherSide) {
  ComplexVector v = ComplexVector::Zero(4);
  v(0) = v(3) = 1.0 / std::sqrt(2.0);
  const StateVector bell(v);
  const std::vector<std::size_t> dims{2, 2};
  for (std::size_t k = 0; k < 2; ++k) {
    const std::vector<std::size_t> keep{k};
    EXPECT_LT(max_abs(partial_trace(bell, dims, keep).matrix() - identity(2) / 2.0), 1e-15);
  }
}

TEST(PartialTrace, ProductOfRandomStates) {
  const auto a = random_density(2), b = random_density(2), c = random_density(2);
  const auto abc = kron(kron(a, b), c);
  const std::vector<std::size_t> dims{2, 2, 2};
  const std::vector<std::size_t> keep_ac{0, 2}, keep_b{1};
  EXPECT_LT(max_abs(partial_trace(abc, dims, keep_ac).matrix() - kron(a, c).matrix()), 1e-13);
  EXPECT_LT(max_abs(partial_trace(abc, dims, keep_b).matrix() - b.matrix()), 1e-13);
}

TEST(PartialTrace, PureStateMatchesDensityRoute) {
  const auto psi = random_state(16);
  const std::vector<std::size_t> dims{2, 2, 2, 2}, keep{1, 3};
  const auto a = partial_trace(psi, dims, keep);
  const auto b = partial_trace(DensityMatrix::pure(psi), dims, keep);
  EXPECT_LT(max_abs(a.matrix() - b.matrix()), 1e-13);
  EXPECT_NEAR(a.matrix().trace().real(), 1.0, 1e-13);
}

TEST(PartialTrace, RejectsBadArguments) {
  const auto rho = DensityMatrix::maximally_mixed(4);
  const std::vector<std::size_t> dims{2, 2}, wrong_dims{2, 4}, out_of_range{2}, repeated{0, 0};
  EXPECT_THROW(partial_trace(rho, wrong_dims, std::vector<std::size_t>{0}), DimensionError);
  EXPECT_THROW(partial_trace(rho, dims, out_of_range), DimensionError);
  EXPECT_THROW(partial_trace(rho, dims, repeated), DimensionError);
}

TEST(HermEig, PauliSpectra) {
  const auto z = herm_eig(pauli::z());
  EXPECT_NEAR(z.values(0), -1.0, 1e-15);
  EXPECT_NEAR(z.values(1), 1.0, 1e-15);
  const auto x = herm_eig(pauli::x());
  EXPECT_NEAR(x.values(0), -1.0, 1e-15);
  EXPECT_NEAR(x.values(1), 1.0, 1e-15);
  const double h = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(std::abs(x.vectors(0, 0)), h, 1e-14);
  EXPECT_NEAR(std::abs(x.vectors(0, 1)), h, 1e-14);
  EXPECT_NEAR(std::abs(x.vectors(0, 0) + x.vectors(1, 0)), 0.0, 1e-14);  // |->
  EXPECT_NEAR(std::abs(x.vectors(0, 1) - x.vectors(1, 1)), 0.0, 1e-14);  // |+>
}

TEST(HermEig, HeisenbergBond) {
  const ComplexMatrix bond =
      -(kron(pauli::x(), pauli::x()) + kron(pauli::y(), pauli::y()) + kron(pauli::z(), pauli::z()));
  const auto e = herm_eig(bond);
  const std::vector<double> expect{-1.0, -1.0, -1.0, 3.0};
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(e.values(k), expect[static_cast<std::size_t>(k)], 1e-13);
}

TEST(HermEig, ReconstructsRandomHermitian) {
  const auto h = random_hermitian(6);
  const auto e = herm_eig(h);
  EXPECT_LT(max_abs(e.vectors * e.values.cast<Complex>().asDiagonal() * e.vectors.adjoint() - h), 1e-12);
  for (Eigen::Index k = 1; k < e.values.size(); ++k) EXPECT_LE(e.values(k - 1), e.values(k));
}

TEST(HermEig, RejectsNonHermitian) {
  ComplexMatrix m = identity(2);
  m(0, 1) = 1.0;
  EXPECT_THROW(herm_eig(m), ContractError);
  EXPECT_THROW(evolve_unitary(m, 1.0), ContractError);
}

TEST(EvolveUnitary, ZeroTimeIsIdentity) {
  EXPECT_EQ(max_abs(evolve_unitary(random_hermitian(5), 0.0) - identity(5)), 0.0);
}

TEST(EvolveUnitary, PauliZPhase) {
  const auto u = evolve_unitary(pauli::z(), std::numbers::pi / 2);
  EXPECT_LT(max_abs(u - diag2(std::polar(1.0, -std::numbers::pi / 2), std::polar(1.0, std::numbers::pi / 2))), 1e-15);
}

TEST(EvolveUnitary, UnitaryAndGroupLaw) {
  const auto h = random_hermitian(8);
  const auto eig = herm_eig(h);
  const auto a = evolve_unitary(eig, 0.7), b = evolve_unitary(eig, 1.9), ab = evolve_unitary(eig, 2.6);
  EXPECT_LT(max_abs(a.adjoint() * a - identity(8)), 1e-12);
  EXPECT_LT(max_abs(a * b - ab), 1e-12);
}

TEST(EvolveUnitary, EnergyOffsetIsGlobalPhase) {
  const auto eig = herm_eig(random_hermitian(4));
  const auto shifted = evolve_unitary(eig, 1.3, 0.4);
  EXPECT_LT(max_abs(shifted - std::polar(1.0, 0.4 * 1.3) * evolve_unitary(eig, 1.3)), 1e-13);
}

TEST(Entropy, KnownValues) {
  EXPECT_NEAR(vn_entropy(DensityMatrix::pure(random_state(4))), 0.0, 1e-12);
  EXPECT_NEAR(vn_entropy(DensityMatrix::maximally_mixed(2)), std::log(2.0), 1e-14);
  EXPECT_NEAR(vn_entropy(DensityMatrix::maximally_mixed(4), LogBase::two), 2.0, 1e-14);
}

TEST(Entropy, BoundsOnRandomStates) {
  for (int i = 0; i < 20; ++i) {
    const auto rho = random_density(4);
    const double s = vn_entropy(rho, LogBase::two);
    EXPECT_GE(s, -1e-12);
    EXPECT_LE(s, 2.0 + 1e-12);
  }
}

TEST(TraceDistance, KnownValues) {
  const auto zero = DensityMatrix::pure(StateVector::basis(2, 0));
  const auto one = DensityMatrix::pure(StateVector::basis(2, 1));
  const auto rho = random_density(3);
  EXPECT_NEAR(trace_distance(rho, rho), 0.0, 1e-15);
  EXPECT_NEAR(trace_distance(zero, one), 1.0, 1e-15);
  EXPECT_NEAR(trace_distance(zero, DensityMatrix::maximally_mixed(2)), 0.5, 1e-15);
  EXPECT_THROW(trace_distance(zero, rho), DimensionError);
}

TEST(TraceDistance, MetricProperties) {
  for (int i = 0; i < 10; ++i) {
    const auto a = random_density(4), b = random_density(4), c = random_density(4);
    EXPECT_NEAR(trace_distance(a, b), trace_distance(b, a), 1e-13);
    EXPECT_LE(trace_distance(a, c), trace_distance(a, b) + trace_distance(b, c) + 1e-13);
    EXPECT_LE(trace_distance(a, b), 1.0 + 1e-13);
  }
}

}  // namespace
}  // namespace spinmem
