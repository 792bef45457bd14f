#include "qbc4/core/pauli.hpp"
#include "qbc4/core/random.hpp"
#include "qbc4/core/registry.hpp"
#include "qbc4/core/state.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace qbc4;

namespace {

HilbertRegistry qubits(std::initializer_list<SubsystemId> ids) {
  HilbertRegistry r;
  for (const auto& id : ids) r.add(id, 2);
  return r;
}

const SubsystemId kQa = SubsystemId::alpha(Slot::Mu);
const SubsystemId kQb = SubsystemId::beta(Slot::Mu);
const SubsystemId kQc = SubsystemId::alpha(Slot::Nu);

// Brute-force partial trace over explicit index loops: keep the first qubit of three.
Mat brute_trace_keep_first(const Vec& psi) {
  Mat out = Mat::Zero(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int rest = 0; rest < 4; ++rest) out(i, j) += psi(i * 4 + rest) * std::conj(psi(j * 4 + rest));
  return out;
}

}  // namespace

TEST(Registry, SubsystemLabelsAndValidation) {
  EXPECT_EQ(SubsystemId::alpha(Slot::Mu, 1).label(), "B_mu_alpha[1]");
  EXPECT_EQ(SubsystemId::adam(Slot::Nu, 2).label(), "A_nu[2]");
  EXPECT_THROW(SubsystemId::adam(Slot::Mu, 0), std::invalid_argument);
  EXPECT_THROW(SubsystemId::purifier(0), std::invalid_argument);
}

TEST(Registry, DuplicateAndPermutationChecks) {
  HilbertRegistry r;
  r.add(kQa, 2);
  EXPECT_THROW(r.add(kQa, 2), std::invalid_argument);
  r.add(SubsystemId::adam(Slot::Mu));
  EXPECT_EQ(r.total_dim(), 8);
  EXPECT_EQ(r.dim_of(SubsystemId::adam(Slot::Mu)), 4);
  EXPECT_THROW(r.reordered({kQa}), std::invalid_argument);
  EXPECT_THROW(r.subset({kQb}), std::invalid_argument);
}

TEST(State, RejectsUnnormalizedAndWrongDimension) {
  EXPECT_THROW(PureState(qubits({kQa}), Vec::Constant(2, cplx(1.0))), std::invalid_argument);
  EXPECT_THROW(PureState(qubits({kQa}), Vec::Unit(4, 0)), std::invalid_argument);
  Mat notunitary = Mat::Identity(2, 2);
  notunitary(0, 0) = 2.0;
  EXPECT_THROW(UnitaryOp(qubits({kQa}), notunitary), std::invalid_argument);
}

TEST(State, PartialTraceMatchesBruteForce) {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const PureState s = random_pure_state(qubits({kQa, kQb, kQc}), rng);
    const Mat expect = brute_trace_keep_first(s.amplitudes());
    EXPECT_LE((partial_trace(s, {kQa}).matrix() - expect).norm(), 1e-12);
  }
}

TEST(State, PartialTraceIsOrderIndependentAndCompositional) {
  Rng rng(12);
  const PureState s = random_pure_state(qubits({kQa, kQb, kQc}), rng);
  const DensityOperator direct = partial_trace(s, {kQc});
  const DensityOperator stepwise = partial_trace(partial_trace(s, {kQb, kQc}), {kQc});
  EXPECT_LE((direct.matrix() - stepwise.matrix()).norm(), 1e-12);
  const DensityOperator permuted = partial_trace(permute(s, {kQc, kQa, kQb}), {kQc});
  EXPECT_LE((direct.matrix() - permuted.matrix()).norm(), 1e-12);
  EXPECT_NEAR(direct.matrix().trace().real(), 1.0, 1e-12);
  EXPECT_THROW(partial_trace(s, {}), std::invalid_argument);
}

TEST(State, PermuteRoundTripAndKnownIndexMove) {
  const PureState s = PureState::basis(qubits({kQa, kQb, kQc}), 0b110);  // |1>_a |1>_b |0>_c
  const PureState p = permute(s, {kQc, kQa, kQb});
  EXPECT_NEAR(std::abs(p.amplitudes()(0b011)), 1.0, 1e-15);  // |0>_c |1>_a |1>_b
  const PureState back = permute(p, {kQa, kQb, kQc});
  EXPECT_LE((back.amplitudes() - s.amplitudes()).norm(), 1e-15);
}

TEST(State, ExchangeSwapsContentsKeepingLabelsInPlace) {
  const PureState s = PureState::basis(qubits({kQa, kQb}), 0b10);  // |1>_a |0>_b
  const PureState e = exchange(s, kQa, kQb);
  EXPECT_EQ(e.registry(), s.registry());
  EXPECT_NEAR(std::abs(e.amplitudes()(0b01)), 1.0, 1e-15);
}

TEST(State, ApplyOnSubsetMatchesKronecker) {
  Rng rng(5);
  const PureState s = random_pure_state(qubits({kQa, kQb, kQc}), rng);
  const Mat u = haar_matrix(2, rng);
  const PureState out = apply(UnitaryOp(qubits({kQb}), u), s);
  const Vec expect = kron(kron(Mat(Mat::Identity(2, 2)), u), Mat(Mat::Identity(2, 2))) * s.amplitudes();
  EXPECT_LE((out.amplitudes() - expect).norm(), 1e-12);
}

TEST(State, TraceDistanceFixedValues) {
  const HilbertRegistry q = qubits({kQa});
  const DensityOperator mixed = DensityOperator::maximally_mixed(q);
  const DensityOperator one = DensityOperator::from_pure(PureState::basis(q, 1));
  const DensityOperator zero = DensityOperator::from_pure(PureState::basis(q, 0));
  EXPECT_NEAR(trace_distance(mixed, one), 0.5, 1e-15);
  EXPECT_NEAR(trace_distance(zero, one), 1.0, 1e-15);
  EXPECT_NEAR(trace_distance(one, one), 0.0, 1e-15);
  EXPECT_THROW(trace_distance(one, DensityOperator::maximally_mixed(qubits({kQb}))), std::invalid_argument);
}

TEST(State, DensityCheckFlagsDefects) {
  Mat m = Mat::Zero(2, 2);
  m(0, 0) = 0.5;
  m(1, 1) = 0.5;
  m(0, 1) = 0.3;  // not Hermitian
  EXPECT_THROW(DensityOperator(qubits({kQa}), m), std::invalid_argument);
}

TEST(State, SchmidtOfBellAndProductStates) {
  Vec bell = Vec::Zero(4);
  bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
  const auto sd = schmidt(PureState(qubits({kQa, kQb}), bell), {kQa});
  ASSERT_EQ(sd.coefficients.size(), 2u);
  EXPECT_NEAR(sd.coefficients[0], 1.0 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(sd.coefficients[1], 1.0 / std::sqrt(2.0), 1e-12);
  const auto prod = schmidt(PureState::basis(qubits({kQa, kQb}), 2), {kQa});
  EXPECT_EQ(prod.coefficients.size(), 1u);
  EXPECT_THROW(schmidt(PureState::basis(qubits({kQa, kQb}), 0), {kQa, kQb}), std::invalid_argument);
}

TEST(State, SchmidtReconstructsState) {
  Rng rng(17);
  const PureState s = random_pure_state(qubits({kQa, kQb, kQc}), rng);
  const auto sd = schmidt(s, {kQa});
  Vec rebuilt = Vec::Zero(8);
  for (std::size_t m = 0; m < sd.coefficients.size(); ++m)
    rebuilt += sd.coefficients[m] * kron(sd.left[m].amplitudes(), sd.right[m].amplitudes());
  EXPECT_LE((rebuilt - s.amplitudes()).norm(), 1e-12);
}

TEST(Pauli, SetIsUnitaryAndTwirlGivesMaximallyMixed) {
  const auto v = pauli_matrices();
  Eigen::Matrix2cd expect_y;
  expect_y << 0, -1, 1, 0;
  EXPECT_LE((v[2] - expect_y).norm(), 1e-15);
  for (const auto& p : v) EXPECT_LE((p * p.adjoint() - Eigen::Matrix2cd::Identity()).norm(), 1e-15);
  Rng rng(3);
  for (int t = 0; t < 50; ++t) {
    const Vec psi = haar_matrix(2, rng).col(0);
    const Eigen::Matrix2cd rho = psi * psi.adjoint();
    EXPECT_LE((pauli_twirl(rho) - 0.5 * Eigen::Matrix2cd::Identity()).norm(), 1e-12);
  }
}

TEST(Pauli, ControlledPauliIsBlockDiagonal) {
  const UnitaryOp cp = controlled_pauli(SubsystemId::adam(Slot::Mu), kQa);
  const auto v = pauli_matrices();
  ASSERT_EQ(cp.matrix().rows(), 8);
  for (int i = 0; i < 4; ++i) EXPECT_LE((cp.matrix().block(2 * i, 2 * i, 2, 2) - Mat(v[i])).norm(), 1e-15);
  EXPECT_NEAR(cp.matrix().norm(), std::sqrt(8.0), 1e-12);
}

TEST(Random, SeedsAreReproducible) {
  Rng a(derive_seed(42, 3)), b(derive_seed(42, 3));
  EXPECT_LE((haar_matrix(4, a) - haar_matrix(4, b)).norm(), 0.0);
  EXPECT_NE(derive_seed(42, 3), derive_seed(42, 4));
  EXPECT_THROW(haar_matrix(0, a), std::invalid_argument);
}

TEST(Random, HaarMomentsMatchUniformMeasure) {
  // E|U_11|^2 = 1/d, Var = (d - 1) / (d^2 (d + 1)); check within 5 standard errors.
  for (Index d : {2, 4}) {
    Rng rng(derive_seed(7, static_cast<std::uint64_t>(d)));
    const int samples = 20000;
    double sum = 0.0;
    for (int i = 0; i < samples; ++i) sum += std::norm(haar_matrix(d, rng)(0, 0));
    const double mean = sum / samples;
    const double dd = static_cast<double>(d);
    const double se = std::sqrt((dd - 1) / (dd * dd * (dd + 1)) / samples);
    EXPECT_NEAR(mean, 1.0 / dd, 5 * se) << "d = " << d;
  }
}

TEST(Random, OrthobasisIsOrthonormal) {
  const auto basis = random_orthobasis(qubits({kQa, kQb}), 9);
  ASSERT_EQ(basis.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      EXPECT_NEAR(std::abs(overlap(basis[i], basis[j])), i == j ? 1.0 : 0.0, 1e-12);
}

TEST(Random, RandomDensityIsValid) {
  Rng rng(4);
  const auto rho = random_density(qubits({kQa, kQb}), rng, 2);
  EXPECT_TRUE(rho.check().ok());
}
