#pragma once

#include "qbc4/core/random.hpp"
#include "qbc4/protocol/ensemble.hpp"
#include "qbc4/protocol/states.hpp"

#include <json.hpp>

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qbc4 {

enum class Phase { Init, Prepared, Committed, Opened, Verified, Aborted };
enum class Holder { Adam, Babe };

/// Entangled: Adam's ancilla controls the Paulis coherently and is submitted
/// at opening. Classical: Adam picks each V_i at random, keeps the choice as a
/// classical record and announces it at opening.
enum class CommitMode { Entangled, Classical };

/// Order in which the two alpha wires of an instance come back: (mu, nu) or (nu, mu).
enum class WireOrder { Original, Switched };

inline const char* to_string(Phase p) {
  switch (p) {
    case Phase::Init: return "init";
    case Phase::Prepared: return "prepared";
    case Phase::Committed: return "committed";
    case Phase::Opened: return "opened";
    case Phase::Verified: return "verified";
    case Phase::Aborted: return "aborted";
  }
  return "?";
}
inline const char* to_string(Holder h) { return h == Holder::Adam ? "Adam" : "Babe"; }
inline const char* to_string(CommitMode m) { return m == CommitMode::Entangled ? "entangled" : "classical"; }
inline const char* to_string(WireOrder o) { return o == WireOrder::Original ? "mu,nu" : "nu,mu"; }

class ProtocolError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct Announcement {
  CommitBit bit = kBit0;
  std::vector<WireOrder> orders;                    // one per instance
  std::vector<std::array<int, 2>> pauli_choices;    // classical mode only: (i_mu, i_nu) per instance
};

struct Event {
  std::string action;
  Holder sender;
  Holder receiver;
  std::vector<std::string> subsystems;  // quantum payload, in transmitted order
  nlohmann::json data;                  // classical payload
};

struct AccessRecord {
  Holder actor;
  std::vector<SubsystemId> factors;
  std::string operation;
};

struct VerifyResult {
  bool aborted = false;
  std::string diagnostic;
  std::vector<double> probabilities;
  std::vector<bool> outcomes;
  double joint_probability = 0.0;
  bool accepted = false;
};

/// One protocol session between Adam and Babe over `instances` split-pair
/// instances. Each instance's state is kept separately; instances never
/// interact, so the global state is their tensor product.
class SessionState {
 public:
  /// Babe draws (n_mu, n_nu) per instance, prepares |Psi_mu>|Psi_nu> and sends
  /// the alpha wires to Adam.
  static SessionState babe_prepare(const BasisEnsemble& ensemble, std::uint64_t seed, int instances = 1,
                                   CommitMode mode = CommitMode::Entangled) {
    if (instances < 1) throw std::invalid_argument("number of instances must be >= 1");
    SessionState s(ensemble, seed, mode);
    std::vector<std::string> sent;
    for (int l = 1; l <= instances; ++l) {
      const int n_mu = ensemble.draw(Slot::Mu, s.babe_rng_);
      const int n_nu = ensemble.draw(Slot::Nu, s.babe_rng_);
      InstanceRecord rec{babe_input_state(ensemble.basis(Slot::Mu, n_mu), ensemble.basis(Slot::Nu, n_nu), l), n_mu,
                         n_nu, {}};
      for (const auto& id : babe_factors(l)) s.holders_[id] = Holder::Babe;
      s.touch(Holder::Babe, babe_factors(l), "prepare");
      for (const auto& id : alpha_factors(l)) {
        s.holders_[id] = Holder::Adam;
        sent.push_back(id.label());
      }
      s.instances_.push_back(std::move(rec));
    }
    s.events_.push_back({"send_alpha", Holder::Babe, Holder::Adam, sent, nlohmann::json::object()});
    s.phase_ = Phase::Prepared;
    return s;
  }

  /// Controlled-Pauli transform on every instance, then the alpha wires go back
  /// to Babe, switched when `b` = 1.
  void adam_commit(CommitBit b) {
    require_phase(Phase::Prepared, "commit");
    std::vector<std::string> returned;
    for (std::size_t k = 0; k < instances_.size(); ++k) {
      const int l = static_cast<int>(k) + 1;
      auto& rec = instances_[k];
      for (const auto& id : adam_factors(l)) holders_[id] = Holder::Adam;
      auto touched = adam_factors(l);
      for (const auto& id : alpha_factors(l)) touched.push_back(id);
      touch(Holder::Adam, touched, "commit");
      if (mode_ == CommitMode::Entangled) {
        PureState s = tensor({adam_ready_state(Slot::Mu, l), adam_ready_state(Slot::Nu, l), rec.state});
        rec.state = commit_transform(s, l);
      } else {
        std::uniform_int_distribution<int> pick(0, 3);
        rec.pauli_choice = {pick(adam_rng_), pick(adam_rng_)};
        std::vector<PureState> parts;
        for (int i : rec.pauli_choice) {
          HilbertRegistry a;
          a.add(SubsystemId::adam(parts.empty() ? Slot::Mu : Slot::Nu, l));
          parts.push_back(PureState::basis(a, i));
        }
        parts.push_back(rec.state);
        PureState s = tensor(parts);
        const auto paulis = pauli_matrices();
        for (Slot j : {Slot::Mu, Slot::Nu}) {
          const int i = rec.pauli_choice[j == Slot::Mu ? 0 : 1];
          s = apply(UnitaryOp(HilbertRegistry{{SubsystemId::alpha(j, l), 2}}, paulis[static_cast<std::size_t>(i)]), s);
        }
        rec.state = s;
      }
      if (b == kBit1) rec.state = switch_alpha_wires(rec.state, l);
      const auto& ids = alpha_factors(l);
      if (b == kBit1) {
        returned.push_back(ids[1].label());
        returned.push_back(ids[0].label());
      } else {
        returned.push_back(ids[0].label());
        returned.push_back(ids[1].label());
      }
      for (const auto& id : ids) holders_[id] = Holder::Babe;
    }
    committed_bit_ = b;
    events_.push_back({"commit_return", Holder::Adam, Holder::Babe, returned, nlohmann::json::object()});
    phase_ = Phase::Committed;
  }

  /// A local unitary by Adam on factors he holds (used to model cheating).
  void adam_local_operation(const UnitaryOp& u) {
    require_phase(Phase::Committed, "local operation");
    touch(Holder::Adam, u.support().ids(), "local_operation");
    for (auto& rec : instances_) {
      bool here = true;
      for (const auto& id : u.support().ids()) here = here && rec.state.registry().contains(id);
      if (here) {
        rec.state = apply(u, rec.state);
        return;
      }
    }
    throw std::invalid_argument("local operation support spans several instances");
  }

  /// Honest opening: announces the committed bit and hands over the ancillas.
  Announcement adam_open() {
    require_phase(Phase::Committed, "open");
    return open_as(*committed_bit_);
  }

  /// Opening that claims `claimed`, whatever was committed.
  Announcement adam_open_as(CommitBit claimed) {
    require_phase(Phase::Committed, "open");
    return open_as(claimed);
  }

  /// Babe undoes the announced order and projects each instance onto the
  /// reference built from her drawn bases.
  VerifyResult babe_verify(const Announcement& ann) {
    require_phase(Phase::Opened, "verify");
    VerifyResult res;
    const std::string problem = malformed(ann);
    if (!problem.empty()) {
      res.aborted = true;
      res.diagnostic = problem;
      phase_ = Phase::Aborted;
      events_.push_back({"abort", Holder::Babe, Holder::Adam, {}, {{"reason", problem}}});
      return res;
    }
    std::uniform_real_distribution<double> u(0.0, 1.0);
    res.joint_probability = 1.0;
    res.accepted = true;
    nlohmann::json per = nlohmann::json::array();
    for (std::size_t k = 0; k < instances_.size(); ++k) {
      const int l = static_cast<int>(k) + 1;
      const auto& rec = instances_[k];
      touch(Holder::Babe, mode_ == CommitMode::Entangled ? rec.state.registry().ids() : babe_factors(l), "verify");
      PureState s = ann.orders[k] == WireOrder::Switched ? switch_alpha_wires(rec.state, l) : rec.state;
      const auto& fm = ensemble_.basis(Slot::Mu, rec.drawn_mu);
      const auto& fn = ensemble_.basis(Slot::Nu, rec.drawn_nu);
      double p = 0.0;
      if (mode_ == CommitMode::Entangled) {
        p = std::norm(overlap(verification_reference(fm, fn, l), s));
      } else {
        // project Babe's wires onto (V_i (x) V_i')|Psi_mu>|Psi_nu>, ignoring the classical record
        PureState target = babe_input_state(fm, fn, l);
        const auto paulis = pauli_matrices();
        for (Slot j : {Slot::Mu, Slot::Nu}) {
          const int i = ann.pauli_choices[k][j == Slot::Mu ? 0 : 1];
          target = apply(UnitaryOp(HilbertRegistry{{SubsystemId::alpha(j, l), 2}}, paulis[static_cast<std::size_t>(i)]),
                         target);
        }
        const DensityOperator rho = partial_trace(s, babe_factors(l));
        p = (target.amplitudes().adjoint() * rho.matrix() * target.amplitudes())(0).real();
      }
      p = std::clamp(p, 0.0, 1.0);
      const bool ok = u(babe_rng_) < p;
      res.probabilities.push_back(p);
      res.outcomes.push_back(ok);
      res.joint_probability *= p;
      res.accepted = res.accepted && ok;
      per.push_back({{"instance", l}, {"acceptance_probability", p}, {"accepted", ok}});
    }
    events_.push_back({"verify", Holder::Babe, Holder::Babe, {}, {{"instances", per}, {"accepted", res.accepted}}});
    phase_ = Phase::Verified;
    return res;
  }

  Phase phase() const { return phase_; }
  CommitMode mode() const { return mode_; }
  int instances() const { return static_cast<int>(instances_.size()); }
  const BasisEnsemble& ensemble() const { return ensemble_; }
  std::array<int, 2> drawn(int instance) const {
    const auto& r = instances_.at(static_cast<std::size_t>(instance - 1));
    return {r.drawn_mu, r.drawn_nu};
  }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t babe_seed() const { return derive_seed(seed_, 0); }
  std::uint64_t adam_seed() const { return derive_seed(seed_, 1); }

  Holder holder(const SubsystemId& id) const {
    auto it = holders_.find(id);
    if (it == holders_.end()) throw std::invalid_argument("unknown subsystem " + id.label());
    return it->second;
  }

  /// State of one instance. Analysis and test access only; no protocol step
  /// reads it except through the holder audit.
  const PureState& instance_state(int instance) const {
    return instances_.at(static_cast<std::size_t>(instance - 1)).state;
  }

  const std::vector<Event>& events() const { return events_; }
  const std::vector<AccessRecord>& access_log() const { return access_log_; }

 private:
  struct InstanceRecord {
    PureState state;
    int drawn_mu = 0;
    int drawn_nu = 0;
    std::array<int, 2> pauli_choice{};
  };

  SessionState(const BasisEnsemble& ensemble, std::uint64_t seed, CommitMode mode)
      : ensemble_(ensemble), mode_(mode), seed_(seed), babe_rng_(derive_seed(seed, 0)), adam_rng_(derive_seed(seed, 1)) {}

  void require_phase(Phase expected, const char* op) const {
    if (phase_ != expected)
      throw ProtocolError(std::string(op) + " requires phase '" + to_string(expected) + "', session is '" +
                          to_string(phase_) + "'");
  }

  /// Records an access and enforces that `actor` holds every factor touched.
  void touch(Holder actor, const std::vector<SubsystemId>& factors, const char* op) {
    for (const auto& id : factors) {
      auto it = holders_.find(id);
      if (it == holders_.end() || it->second != actor)
        throw ProtocolError(std::string(to_string(actor)) + " does not hold " + id.label() + " during " + op);
    }
    access_log_.push_back({actor, factors, op});
  }

  Announcement open_as(CommitBit claimed) {
    Announcement ann;
    ann.bit = claimed;
    nlohmann::json choices = nlohmann::json::array();
    std::vector<std::string> submitted;
    for (std::size_t k = 0; k < instances_.size(); ++k) {
      ann.orders.push_back(claimed == kBit1 ? WireOrder::Switched : WireOrder::Original);
      if (mode_ == CommitMode::Classical) {
        ann.pauli_choices.push_back(instances_[k].pauli_choice);
        choices.push_back(instances_[k].pauli_choice);
      } else {
        for (const auto& id : adam_factors(static_cast<int>(k) + 1)) {
          holders_[id] = Holder::Babe;
          submitted.push_back(id.label());
        }
      }
    }
    nlohmann::json data{{"bit", claimed.value()}, {"order", claimed == kBit1 ? "nu,mu" : "mu,nu"}};
    if (mode_ == CommitMode::Classical) data["pauli_choices"] = choices;
    events_.push_back({"announce", Holder::Adam, Holder::Babe, {}, data});
    if (mode_ == CommitMode::Entangled)
      events_.push_back({"submit_ancilla", Holder::Adam, Holder::Babe, submitted, nlohmann::json::object()});
    phase_ = Phase::Opened;
    return ann;
  }

  std::string malformed(const Announcement& ann) const {
    if (ann.orders.size() != instances_.size()) return "announcement lists a wrong number of wire orders";
    for (const auto& o : ann.orders)
      if ((o == WireOrder::Switched) != (ann.bit == kBit1)) return "announced wire order contradicts announced bit";
    if (mode_ == CommitMode::Classical) {
      if (ann.pauli_choices.size() != instances_.size()) return "classical opening lacks Pauli choices";
      for (const auto& c : ann.pauli_choices)
        for (int i : c)
          if (i < 0 || i > 3) return "Pauli choice out of range";
    }
    return {};
  }

  BasisEnsemble ensemble_;
  CommitMode mode_;
  std::uint64_t seed_;
  Rng babe_rng_;
  Rng adam_rng_;
  Phase phase_ = Phase::Init;
  std::vector<InstanceRecord> instances_;
  std::map<SubsystemId, Holder> holders_;
  std::optional<CommitBit> committed_bit_;
  std::vector<Event> events_;
  std::vector<AccessRecord> access_log_;
};

}  // namespace qbc4
