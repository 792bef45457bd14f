#pragma once

#include "qbc4/core/random.hpp"
#include "qbc4/core/state.hpp"
#include "qbc4/protocol/ensemble.hpp"
#include "qbc4/protocol/states.hpp"

#include <json.hpp>

#include <algorithm>
#include <vector>

namespace qbc4 {

/// Tr_A of the committed state for fixed bases: Babe's whole view before opening.
/// With `controlled == false` the Pauli step is skipped (diagnostic corruption).
inline DensityOperator evidence_state(const Eigen::Matrix2cd& f_mu, const Eigen::Matrix2cd& f_nu, CommitBit b,
                                      bool controlled = true) {
  return partial_trace(committed_state(f_mu, f_nu, b, 1, controlled), babe_factors());
}

/// Babe purifies her basis choice into a register C of dimension m_mu * m_nu:
///   sum_{n_mu, n_nu} sqrt(p_mu p_nu) |g^{n_mu}>|g^{n_nu}>_C |Psi^{n_mu}_mu>|Psi^{n_nu}_nu>.
/// Returns the state on A, B and C before Adam acts.
inline PureState purified_input_state(const BasisEnsemble& e) {
  const int m_mu = e.size(Slot::Mu);
  const int m_nu = e.size(Slot::Nu);
  HilbertRegistry reg = instance_registry();
  reg.add(SubsystemId::purifier(), static_cast<Index>(m_mu) * m_nu);
  const Index dc = static_cast<Index>(m_mu) * m_nu;
  Vec v = Vec::Zero(reg.total_dim());
  for (int a = 0; a < m_mu; ++a)
    for (int c = 0; c < m_nu; ++c) {
      const double w = std::sqrt(e.probability(Slot::Mu, a) * e.probability(Slot::Nu, c));
      if (w == 0.0) continue;
      const Vec branch = pre_commit_state(e.basis(Slot::Mu, a), e.basis(Slot::Nu, c)).amplitudes();
      const Index g = static_cast<Index>(a) * m_nu + c;
      for (Index k = 0; k < branch.size(); ++k) v(k * dc + g) += w * branch(k);
    }
  return PureState(std::move(reg), std::move(v));
}

/// Babe's state on B (x) C after the commit transform for bit `b`.
inline DensityOperator purified_evidence_state(const BasisEnsemble& e, CommitBit b, bool controlled = true) {
  PureState s = commit_transform(purified_input_state(e), 1, controlled);
  if (b == kBit1) s = switch_alpha_wires(s);
  auto keep = babe_factors();
  keep.push_back(SubsystemId::purifier());
  return partial_trace(s, keep);
}

/// Trace distance between `rho` and (I_alpha / 4) (x) Tr_alpha(rho).
inline double product_form_check(const DensityOperator& rho) {
  std::vector<SubsystemId> alphas;
  for (const auto& f : rho.registry().factors())
    if (f.id.party() == Party::BAlpha) alphas.push_back(f.id);
  if (alphas.empty()) throw std::invalid_argument("product form check needs alpha factors");
  const HilbertRegistry rest = rho.registry().complement(alphas);
  const DensityOperator mixed = DensityOperator::maximally_mixed(rho.registry().subset(alphas));
  if (rest.empty()) return trace_distance(rho, mixed);
  const DensityOperator product = tensor(mixed, partial_trace(rho, rest.ids()));
  return trace_distance(rho, permute(product, rho.registry().ids()));
}

struct ConcealingReport {
  double max_bit_distance = 0.0;       // max TD(rho^B_0, rho^B_1)
  double max_mixed_distance = 0.0;     // max TD(rho^B_b, I/16)
  double max_purified_distance = 0.0;  // max TD(rho^BC_0, rho^BC_1)
  double max_product_residual = 0.0;   // max product_form_check over rho^BC_b
  int basis_pairs_checked = 0;
  int ensembles_checked = 0;
  bool purified = false;
  bool corrupted = false;
  std::vector<std::string> ensembles;

  bool holds(double tol = kDefaultTolerances.structural) const {
    return max_bit_distance <= tol && max_mixed_distance <= tol && max_purified_distance <= tol &&
           max_product_residual <= tol;
  }
};

struct ConcealingOptions {
  int random_basis_pairs = 100;
  int random_ensembles = 20;
  std::vector<int> ensemble_sizes{1, 2, 3, 4};  // m values cycled over for random ensembles
  bool purify = true;
  bool corrupt = false;                          // skip the Pauli control
};

namespace detail {

inline void check_basis_pair(ConcealingReport& r, const Eigen::Matrix2cd& f_mu, const Eigen::Matrix2cd& f_nu,
                             bool controlled) {
  const DensityOperator r0 = evidence_state(f_mu, f_nu, kBit0, controlled);
  const DensityOperator r1 = evidence_state(f_mu, f_nu, kBit1, controlled);
  const DensityOperator mixed = DensityOperator::maximally_mixed(r0.registry());
  r.max_bit_distance = std::max(r.max_bit_distance, trace_distance(r0, r1));
  r.max_mixed_distance =
      std::max({r.max_mixed_distance, trace_distance(r0, mixed), trace_distance(r1, mixed)});
  ++r.basis_pairs_checked;
}

inline void check_ensemble(ConcealingReport& r, const BasisEnsemble& e, const ConcealingOptions& opt) {
  const bool controlled = !opt.corrupt;
  for (int a = 0; a < e.size(Slot::Mu); ++a)
    for (int c = 0; c < e.size(Slot::Nu); ++c) check_basis_pair(r, e.basis(Slot::Mu, a), e.basis(Slot::Nu, c), controlled);
  if (opt.purify) {
    const DensityOperator r0 = purified_evidence_state(e, kBit0, controlled);
    const DensityOperator r1 = purified_evidence_state(e, kBit1, controlled);
    r.max_purified_distance = std::max(r.max_purified_distance, trace_distance(r0, r1));
    r.max_product_residual =
        std::max({r.max_product_residual, product_form_check(r0), product_form_check(r1)});
  }
  ++r.ensembles_checked;
  r.ensembles.push_back(e.name());
}

}  // namespace detail

/// Checks the listed ensembles, then Haar-random basis pairs and random
/// weighted ensembles drawn from `seed`. Reports maxima of every distance.
inline ConcealingReport concealing_sweep(const std::vector<BasisEnsemble>& ensembles, std::uint64_t seed,
                                         const ConcealingOptions& opt = {}) {
  ConcealingReport r;
  r.purified = opt.purify;
  r.corrupted = opt.corrupt;
  for (const auto& e : ensembles) detail::check_ensemble(r, e, opt);

  Rng pairs(derive_seed(seed, 1));
  for (int k = 0; k < opt.random_basis_pairs; ++k) {
    const Mat f_mu = haar_matrix(2, pairs);
    const Mat f_nu = haar_matrix(2, pairs);
    detail::check_basis_pair(r, f_mu, f_nu, !opt.corrupt);
  }

  if (opt.purify && !opt.ensemble_sizes.empty()) {
    Rng ens(derive_seed(seed, 2));
    for (int k = 0; k < opt.random_ensembles; ++k) {
      const int m = opt.ensemble_sizes[static_cast<std::size_t>(k) % opt.ensemble_sizes.size()];
      detail::check_ensemble(r, BasisEnsemble::random_weighted(m, ens), opt);
    }
  }
  return r;
}

inline nlohmann::json to_json(const ConcealingReport& r) {
  return {{"max_trace_distance_bits", r.max_bit_distance},
          {"max_trace_distance_to_maximally_mixed", r.max_mixed_distance},
          {"max_trace_distance_purified", r.max_purified_distance},
          {"max_product_form_residual", r.max_product_residual},
          {"basis_pairs_checked", r.basis_pairs_checked},
          {"ensembles_checked", r.ensembles_checked},
          {"purified", r.purified},
          {"corrupted_transform", r.corrupted},
          {"ensembles", r.ensembles},
          {"concealing_holds", r.holds()}};
}

}  // namespace qbc4
