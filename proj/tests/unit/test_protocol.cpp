#include "qbc4/protocol/ensemble.hpp"
#include "qbc4/protocol/session.hpp"
#include "qbc4/protocol/states.hpp"
#include "qbc4/protocol/transcript.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace qbc4;

namespace {

// Committed state from index loops over the canonical layout
// (A_mu, A_nu, B_mu_alpha, B_nu_alpha, B_mu_beta, B_nu_beta), built without the
// registry, permutation or apply machinery.
Vec brute_committed(const Eigen::Matrix2cd& fm, const Eigen::Matrix2cd& fn, int b) {
  const auto v = pauli_matrices();
  Vec out = Vec::Zero(256);
  for (int i = 0; i < 4; ++i)
    for (int ip = 0; ip < 4; ++ip)
      for (int xm = 0; xm < 2; ++xm)
        for (int xn = 0; xn < 2; ++xn)
          for (int ym = 0; ym < 2; ++ym)
            for (int yn = 0; yn < 2; ++yn) {
              // after the switch the mu-alpha wire carries what the nu-alpha wire carried
              const int am = b == 0 ? xm : xn;
              const int an = b == 0 ? xn : xm;
              cplx amp = 0.0;
              for (int km = 0; km < 2; ++km)
                for (int kn = 0; kn < 2; ++kn)
                  amp += v[i](am, km) * v[ip](an, kn) * fm(ym, km) * fn(yn, kn);
              const int idx = ((((i * 4 + ip) * 2 + xm) * 2 + xn) * 2 + ym) * 2 + yn;
              out(idx) = amp / 8.0;
            }
  return out;
}

Eigen::Matrix2cd random_basis(Rng& rng) { return haar_matrix(2, rng); }

}  // namespace

TEST(States, CommittedStateMatchesIndexLoops) {
  Rng rng(21);
  for (int t = 0; t < 10; ++t) {
    const auto fm = random_basis(rng), fn = random_basis(rng);
    for (int b : {0, 1}) {
      const PureState s = committed_state(fm, fn, CommitBit::from_int(b));
      EXPECT_EQ(s.registry(), instance_registry());
      EXPECT_LE((s.amplitudes() - brute_committed(fm, fn, b)).norm(), 1e-12);
    }
  }
}

TEST(States, SplitPairIsMaximallyEntangled) {
  Rng rng(2);
  const PureState s = split_pair_state(random_basis(rng), Slot::Mu);
  const auto rho = partial_trace(s, {SubsystemId::alpha(Slot::Mu)});
  EXPECT_LE((rho.matrix() - 0.5 * Mat::Identity(2, 2)).norm(), 1e-12);
}

TEST(States, CommitBitRejectsOutOfRange) {
  EXPECT_THROW(CommitBit::from_int(2), std::invalid_argument);
  EXPECT_THROW(CommitBit::from_int(-1), std::invalid_argument);
  EXPECT_EQ(CommitBit::from_int(1), kBit1);
}

TEST(States, SwitchedCommitIsAnInvolutionOfTheHonestOne) {
  Rng rng(8);
  const auto fm = random_basis(rng), fn = random_basis(rng);
  const PureState s0 = committed_state(fm, fn, kBit0);
  const PureState s1 = committed_state(fm, fn, kBit1);
  EXPECT_LE((switch_alpha_wires(s1).amplitudes() - s0.amplitudes()).norm(), 1e-14);
  EXPECT_NEAR(std::norm(overlap(verification_reference(fm, fn), switch_alpha_wires(s1))), 1.0, 1e-12);
}

TEST(Ensemble, ValidatesOrthonormalityAndWeights) {
  Eigen::Matrix2cd bad = Eigen::Matrix2cd::Identity();
  bad(0, 1) = 0.1;
  EXPECT_THROW(BasisEnsemble({{bad, 1.0, "bad"}}, {{Eigen::Matrix2cd::Identity(), 1.0, "c"}}), std::invalid_argument);
  EXPECT_THROW(BasisEnsemble({{Eigen::Matrix2cd::Identity(), 0.6, "c"}}, {{Eigen::Matrix2cd::Identity(), 1.0, "c"}}),
               std::invalid_argument);
  EXPECT_THROW(BasisEnsemble::preset("haar-0", 1), std::invalid_argument);
  EXPECT_THROW(BasisEnsemble::preset("haar-2x", 1), std::invalid_argument);
  EXPECT_THROW(BasisEnsemble::preset("nope", 1), std::invalid_argument);
}

TEST(Ensemble, PresetsAreMutuallyUnbiased) {
  const auto e = BasisEnsemble::mub3();
  ASSERT_EQ(e.size(Slot::Mu), 3);
  for (int a = 0; a < 3; ++a)
    for (int c = a + 1; c < 3; ++c) {
      const Eigen::Matrix2cd g = e.basis(Slot::Mu, a).adjoint() * e.basis(Slot::Mu, c);
      for (int i = 0; i < 4; ++i) EXPECT_NEAR(std::norm(g(i / 2, i % 2)), 0.5, 1e-12);
    }
}

TEST(Ensemble, JsonRoundTrip) {
  const auto e = BasisEnsemble::haar(3, 99);
  const auto back = ensemble_from_json(nlohmann::json::parse(to_json(e).dump()));
  EXPECT_EQ(to_json(back), to_json(e));
  EXPECT_THROW(ensemble_from_json(nlohmann::json{{"mu", 3}}), std::invalid_argument);
}

TEST(Ensemble, DrawFrequenciesFollowWeights) {
  const auto e = BasisEnsemble::mub2();
  Rng rng(31);
  const int n = 20000;
  int hits = 0;
  for (int t = 0; t < n; ++t) hits += e.draw(Slot::Mu, rng) == 1;
  EXPECT_NEAR(hits / static_cast<double>(n), 0.5, 5 * std::sqrt(0.25 / n));
}

TEST(Session, HonestRunsAcceptWithCertainty) {
  for (const char* name : {"computational", "mub2", "mub3", "haar-3"})
    for (CommitMode mode : {CommitMode::Entangled, CommitMode::Classical})
      for (int b : {0, 1})
        for (int n : {1, 3}) {
          const Transcript t = run_protocol(n, BasisEnsemble::preset(name, 5), CommitBit::from_int(b), 77, mode);
          EXPECT_TRUE(t.accepted) << name << " b=" << b << " N=" << n;
          for (const auto& o : t.outcomes) EXPECT_NEAR(o.acceptance_probability, 1.0, 1e-12);
        }
}

TEST(Session, WrongAnnouncementInComputationalBasis) {
  // Honest b = 0 commit opened as b = 1 without any rotation. The value is the
  // squared overlap of the two index-loop states.
  const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
  const double brute = std::norm(brute_committed(id, id, 0).dot(brute_committed(id, id, 1)));
  EXPECT_NEAR(brute, 0.25, 1e-15);

  auto session = SessionState::babe_prepare(BasisEnsemble::computational(), 4);
  session.adam_commit(kBit0);
  const auto res = session.babe_verify(session.adam_open_as(kBit1));
  ASSERT_FALSE(res.aborted);
  EXPECT_NEAR(res.probabilities[0], brute, 1e-12);
}

TEST(Session, PhaseOrderIsEnforced) {
  auto s = SessionState::babe_prepare(BasisEnsemble::mub2(), 1);
  EXPECT_THROW(s.adam_open(), ProtocolError);
  s.adam_commit(kBit1);
  EXPECT_THROW(s.adam_commit(kBit0), ProtocolError);
  EXPECT_THROW(s.babe_verify(Announcement{}), ProtocolError);
  const auto ann = s.adam_open();
  EXPECT_EQ(s.phase(), Phase::Opened);
  s.babe_verify(ann);
  EXPECT_EQ(s.phase(), Phase::Verified);
}

TEST(Session, MalformedAnnouncementAborts) {
  auto s = SessionState::babe_prepare(BasisEnsemble::mub2(), 1, 2);
  s.adam_commit(kBit1);
  Announcement ann = s.adam_open();
  ann.orders[0] = WireOrder::Original;
  const auto res = s.babe_verify(ann);
  EXPECT_TRUE(res.aborted);
  EXPECT_FALSE(res.accepted);
  EXPECT_EQ(s.phase(), Phase::Aborted);
  EXPECT_FALSE(res.diagnostic.empty());
}

TEST(Session, HolderAuditBlocksForeignAccess) {
  auto s = SessionState::babe_prepare(BasisEnsemble::mub2(), 3);
  s.adam_commit(kBit0);
  // beta wires never leave Babe
  const UnitaryOp on_beta = UnitaryOp::identity(HilbertRegistry{{SubsystemId::beta(Slot::Mu), 2}});
  EXPECT_THROW(s.adam_local_operation(on_beta), ProtocolError);
  const UnitaryOp on_a = UnitaryOp::identity(HilbertRegistry{{SubsystemId::adam(Slot::Mu), 4}});
  EXPECT_NO_THROW(s.adam_local_operation(on_a));
  EXPECT_EQ(s.holder(SubsystemId::adam(Slot::Mu)), Holder::Adam);
  EXPECT_EQ(s.holder(SubsystemId::alpha(Slot::Mu)), Holder::Babe);
  s.babe_verify(s.adam_open());
  for (const auto& rec : s.access_log()) {
    if (rec.actor != Holder::Babe || rec.operation == std::string("verify")) continue;
    for (const auto& id : rec.factors) EXPECT_NE(id.party(), Party::A) << rec.operation;
  }
}

TEST(Session, EventSequenceAndWireOrder) {
  auto s = SessionState::babe_prepare(BasisEnsemble::mub2(), 3);
  s.adam_commit(kBit1);
  s.babe_verify(s.adam_open());
  std::vector<std::string> actions;
  for (const auto& e : s.events()) actions.push_back(e.action);
  EXPECT_EQ(actions, (std::vector<std::string>{"send_alpha", "commit_return", "announce", "submit_ancilla", "verify"}));
  EXPECT_EQ(s.events()[1].subsystems, (std::vector<std::string>{"B_nu_alpha[1]", "B_mu_alpha[1]"}));
}

TEST(Session, ClassicalModeAnnouncesPauliChoices) {
  auto s = SessionState::babe_prepare(BasisEnsemble::mub2(), 3, 1, CommitMode::Classical);
  s.adam_commit(kBit0);
  Announcement ann = s.adam_open();
  ASSERT_EQ(ann.pauli_choices.size(), 1u);
  // a wrong Pauli record is caught by the projection
  ann.pauli_choices[0][0] = (ann.pauli_choices[0][0] + 1) % 4;
  const auto res = s.babe_verify(ann);
  EXPECT_LT(res.probabilities[0], 1.0 - 1e-6);
}

TEST(Transcript, ReplayIsByteIdentical) {
  for (CommitMode mode : {CommitMode::Entangled, CommitMode::Classical}) {
    const Transcript t = run_protocol(3, BasisEnsemble::preset("haar-3", 12), kBit1, 12, mode);
    const std::string first = to_json(t).dump();
    EXPECT_EQ(to_json(replay(nlohmann::json::parse(first))).dump(), first);
  }
}

TEST(Transcript, DifferentSeedsDrawDifferently) {
  std::set<std::string> seen;
  for (std::uint64_t seed = 0; seed < 8; ++seed)
    seen.insert(to_json(run_protocol(4, BasisEnsemble::mub3(), kBit0, seed)).at("instances").dump());
  EXPECT_GT(seen.size(), 1u);
}
