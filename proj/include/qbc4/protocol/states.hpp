#pragma once

// Builders for the honest protocol states of one instance. The canonical
// instance registry is
//
//   A_mu(4) A_nu(4) B_mu_alpha(2) B_nu_alpha(2) B_mu_beta(2) B_nu_beta(2)
//
// i.e. Adam's ancillas, then the two wires Babe sends out, then the two she keeps.

#include "qbc4/core/pauli.hpp"
#include "qbc4/core/state.hpp"
#include "qbc4/protocol/ensemble.hpp"

namespace qbc4 {

enum class CommitBitValue { Zero = 0, One = 1 };

/// A committed bit; only 0 and 1 are constructible.
class CommitBit {
 public:
  constexpr explicit CommitBit(CommitBitValue v) : v_(v) {}
  static CommitBit from_int(long long v) {
    if (v != 0 && v != 1) throw std::invalid_argument("commit bit must be 0 or 1");
    return CommitBit(v == 0 ? CommitBitValue::Zero : CommitBitValue::One);
  }
  constexpr int value() const { return static_cast<int>(v_); }
  constexpr bool operator==(const CommitBit&) const = default;

 private:
  CommitBitValue v_;
};

inline constexpr CommitBit kBit0{CommitBitValue::Zero};
inline constexpr CommitBit kBit1{CommitBitValue::One};

inline std::vector<SubsystemId> adam_factors(int instance = 1) {
  return {SubsystemId::adam(Slot::Mu, instance), SubsystemId::adam(Slot::Nu, instance)};
}

inline std::vector<SubsystemId> alpha_factors(int instance = 1) {
  return {SubsystemId::alpha(Slot::Mu, instance), SubsystemId::alpha(Slot::Nu, instance)};
}

inline std::vector<SubsystemId> beta_factors(int instance = 1) {
  return {SubsystemId::beta(Slot::Mu, instance), SubsystemId::beta(Slot::Nu, instance)};
}

inline std::vector<SubsystemId> babe_factors(int instance = 1) {
  auto out = alpha_factors(instance);
  for (const auto& id : beta_factors(instance)) out.push_back(id);
  return out;
}

inline HilbertRegistry instance_registry(int instance = 1) {
  HilbertRegistry r;
  for (const auto& id : adam_factors(instance)) r.add(id);
  for (const auto& id : babe_factors(instance)) r.add(id);
  return r;
}

/// (1/sqrt 2) sum_k |k>_{j alpha} |f_k>_{j beta}; the columns of `f` are the f_k.
inline PureState split_pair_state(const Eigen::Matrix2cd& f, Slot slot, int instance = 1) {
  HilbertRegistry reg;
  reg.add(SubsystemId::alpha(slot, instance)).add(SubsystemId::beta(slot, instance));
  Vec v(4);
  for (Index k = 0; k < 2; ++k)
    for (Index y = 0; y < 2; ++y) v(2 * k + y) = f(y, k) / std::sqrt(2.0);
  return PureState(std::move(reg), std::move(v));
}

/// Adam's ancilla |psi_A> = (1/2) sum_i |e_i>.
inline PureState adam_ready_state(Slot slot, int instance = 1) {
  HilbertRegistry reg;
  reg.add(SubsystemId::adam(slot, instance));
  return PureState(std::move(reg), Vec::Constant(4, cplx(0.5)));
}

/// |Psi_mu>|Psi_nu> on Babe's four wires, ordered as in the instance registry.
inline PureState babe_input_state(const Eigen::Matrix2cd& f_mu, const Eigen::Matrix2cd& f_nu, int instance = 1) {
  return permute(tensor(split_pair_state(f_mu, Slot::Mu, instance), split_pair_state(f_nu, Slot::Nu, instance)),
                 babe_factors(instance));
}

/// Ancillas in |psi_A> next to Babe's input, in canonical order.
inline PureState pre_commit_state(const Eigen::Matrix2cd& f_mu, const Eigen::Matrix2cd& f_nu, int instance = 1) {
  return tensor({adam_ready_state(Slot::Mu, instance), adam_ready_state(Slot::Nu, instance),
                 babe_input_state(f_mu, f_nu, instance)});
}

/// Controlled-Pauli transform on A_j (x) B_{j alpha} for both slots. With
/// `controlled == false` the Pauli step is skipped (diagnostic corruption).
inline PureState commit_transform(const PureState& s, int instance = 1, bool controlled = true) {
  if (!controlled) return s;
  PureState out = s;
  for (Slot j : {Slot::Mu, Slot::Nu})
    out = apply(controlled_pauli(SubsystemId::adam(j, instance), SubsystemId::alpha(j, instance)), out);
  return out;
}

/// Switches the two alpha wires (the b = 1 reordering).
inline PureState switch_alpha_wires(const PureState& s, int instance = 1) {
  return exchange(s, SubsystemId::alpha(Slot::Mu, instance), SubsystemId::alpha(Slot::Nu, instance));
}

/// Honest committed global state for bit `b` on the canonical registry,
/// as Babe holds it physically after the commit step.
inline PureState committed_state(const Eigen::Matrix2cd& f_mu, const Eigen::Matrix2cd& f_nu, CommitBit b,
                                 int instance = 1, bool controlled = true) {
  PureState s = commit_transform(pre_commit_state(f_mu, f_nu, instance), instance, controlled);
  return b == kBit1 ? switch_alpha_wires(s, instance) : s;
}

/// |Phi_mu>|Phi_nu>: the state Babe projects onto after undoing the announced order.
inline PureState verification_reference(const Eigen::Matrix2cd& f_mu, const Eigen::Matrix2cd& f_nu,
                                        int instance = 1) {
  return committed_state(f_mu, f_nu, kBit0, instance);
}

}  // namespace qbc4
