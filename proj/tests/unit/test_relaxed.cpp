#include "qbc4/analysis/relaxed.hpp"

#include <gtest/gtest.h>

using namespace qbc4;

namespace {

RelaxedOptions small_options(std::uint64_t seed) {
  RelaxedOptions o;
  o.seed = seed;
  o.lambdas = {0.0, 1.0, 8.0};
  o.rounds = 10;
  o.inner_iterations = 50;
  o.reference.restarts = 2;
  return o;
}

}  // namespace

TEST(Relaxed, HonestCommitMatchesProtocolStates) {
  const auto e = BasisEnsemble::mub2();
  const detail::RelaxedModel model(e, 1);
  const auto committed = model.committed(model.honest_commit());
  ASSERT_EQ(committed.size(), 4u);
  int n = 0;
  for (int a = 0; a < 2; ++a)
    for (int c = 0; c < 2; ++c, ++n) {
      const Vec expect = committed_state(e.basis(Slot::Mu, a), e.basis(Slot::Nu, c), kBit0).amplitudes();
      EXPECT_LE((committed[static_cast<std::size_t>(n)] - expect).norm(), 1e-12);
    }
  EXPECT_NEAR(model.bit0_success(model.honest_commit()), 1.0, 1e-12);
}

TEST(Relaxed, SwitchingCommitOpensOneWithoutRotation) {
  const detail::RelaxedModel model(BasisEnsemble::computational(), 1);
  const Mat w = model.switching_commit();
  EXPECT_NEAR(model.bit1_success(w, Mat::Identity(16, 16)), 1.0, 1e-12);
  EXPECT_NEAR(model.bit0_success(w), 0.25, 1e-12);
}

TEST(Relaxed, ExtensionRegisterEmbedsConsistently) {
  const detail::RelaxedModel model(BasisEnsemble::mub2(), 2);
  EXPECT_EQ(model.ancilla_dim(), 32);
  EXPECT_NEAR(model.bit0_success(model.honest_commit()), 1.0, 1e-12);
}

TEST(Relaxed, CurveIsMonotoneWithEndpoints) {
  const std::vector<double> deltas{0.0, 0.05, 0.2, 0.5, 1.0};
  const auto curve = relaxed_opening_tradeoff(BasisEnsemble::mub2(), deltas, small_options(3));
  ASSERT_EQ(curve.points.size(), deltas.size());
  for (std::size_t k = 1; k < curve.points.size(); ++k)
    EXPECT_GE(curve.points[k].bit1_success, curve.points[k - 1].bit1_success - 1e-12);
  for (const auto& p : curve.points) EXPECT_GE(p.bit0_success, 1.0 - p.delta - 1e-9);
  EXPECT_NEAR(curve.points.front().bit1_success, curve.perfect_opening_p_a, 2e-3);
  EXPECT_NEAR(curve.points.back().bit1_success, 1.0, 1e-6);
}

TEST(Relaxed, RejectsBadInput) {
  EXPECT_THROW(relaxed_opening_tradeoff(BasisEnsemble::mub2(), {-0.1}, small_options(1)), std::invalid_argument);
  RelaxedOptions o = small_options(1);
  o.ancilla_factor = 0;
  EXPECT_THROW(relaxed_opening_tradeoff(BasisEnsemble::mub2(), {0.0}, o), std::invalid_argument);
}

TEST(Relaxed, Deterministic) {
  const auto a = to_json(relaxed_opening_tradeoff(BasisEnsemble::haar(2, 1), {0.0, 1.0}, small_options(5)));
  const auto b = to_json(relaxed_opening_tradeoff(BasisEnsemble::haar(2, 1), {0.0, 1.0}, small_options(5)));
  EXPECT_EQ(a.dump(), b.dump());
}
