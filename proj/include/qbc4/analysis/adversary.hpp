#pragma once

#include "qbc4/core/random.hpp"
#include "qbc4/core/state.hpp"
#include "qbc4/protocol/ensemble.hpp"
#include "qbc4/protocol/states.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

namespace qbc4 {

/// What Babe sends on one alpha wire: a state on alpha (x) a reference she
/// keeps. reference_dim == 1 means the wire is unentangled with anything.
struct SlotInput {
  Vec state;  // index alpha * reference_dim + reference
  Index reference_dim = 1;
};

struct BabeAttack {
  std::string description;
  SlotInput mu;
  SlotInput nu;

  const SlotInput& slot(Slot s) const { return s == Slot::Mu ? mu : nu; }
  bool entangled() const;
};

namespace detail {

inline PureState slot_state(const SlotInput& in, Slot s) {
  if (in.reference_dim < 1 || in.state.size() != 2 * in.reference_dim)
    throw std::invalid_argument("attack state size must be 2 * reference_dim");
  HilbertRegistry reg;
  reg.add(SubsystemId::alpha(s), 2).add(SubsystemId::beta(s), in.reference_dim);
  return PureState(std::move(reg), in.state);
}

}  // namespace detail

inline bool BabeAttack::entangled() const {
  for (Slot s : {Slot::Mu, Slot::Nu}) {
    const auto& in = slot(s);
    if (in.reference_dim > 1 && schmidt(detail::slot_state(in, s), {SubsystemId::alpha(s)}).coefficients.size() > 1)
      return true;
  }
  return false;
}

/// |1> on the mu wire and |2> on the nu wire, both product states.
inline BabeAttack orthogonal_probe_attack() {
  BabeAttack a;
  a.description = "orthogonal product probes |1> (mu), |2> (nu)";
  a.mu.state = Vec::Unit(2, 0);
  a.nu.state = Vec::Unit(2, 1);
  return a;
}

/// The honest inputs |Psi_mu>|Psi_nu>, expressed as an attack with the beta wires as references.
inline BabeAttack honest_inputs(const Eigen::Matrix2cd& f_mu, const Eigen::Matrix2cd& f_nu) {
  BabeAttack a;
  a.description = "honest split pairs";
  a.mu = {split_pair_state(f_mu, Slot::Mu).amplitudes(), 2};
  a.nu = {split_pair_state(f_nu, Slot::Nu).amplitudes(), 2};
  return a;
}

/// Babe's post-commit view (every wire she holds) for bit `b` under `attack`.
inline DensityOperator babe_view(const BabeAttack& attack, CommitBit b) {
  PureState input = tensor({adam_ready_state(Slot::Mu), adam_ready_state(Slot::Nu),
                            detail::slot_state(attack.mu, Slot::Mu), detail::slot_state(attack.nu, Slot::Nu)});
  PureState s = commit_transform(input);
  if (b == kBit1) s = switch_alpha_wires(s);
  return partial_trace(s, babe_factors());
}

/// Helstrom probability of guessing b from Babe's view: (1 + TD(sigma_0, sigma_1)) / 2.
inline double bit_distinguishability(const BabeAttack& attack) {
  return 0.5 * (1.0 + trace_distance(babe_view(attack, kBit0), babe_view(attack, kBit1)));
}

struct EntanglementCheck {
  bool pass = false;
  double purity = 0.0;
  std::vector<double> schmidt_coefficients;
  std::string diagnostic;
};

/// Adam's check that an alpha/beta pair is of the split-pair form for some
/// orthonormal {f_k}: pure and maximally entangled across alpha | beta.
inline EntanglementCheck adam_entanglement_check(const DensityOperator& rho,
                                                 const Tolerances& tol = kDefaultTolerances) {
  EntanglementCheck out;
  const auto& f = rho.registry().factors();
  if (f.size() != 2 || f[0].dim != 2 || f[1].dim != 2) {
    out.diagnostic = "checked state must live on one alpha qubit and one beta qubit";
    return out;
  }
  out.purity = rho.purity();
  if (std::abs(out.purity - 1.0) > tol.structural) {
    out.diagnostic = "state is mixed";
    return out;
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(rho.matrix());
  const Vec top = es.eigenvectors().col(rho.dim() - 1);
  Eigen::Matrix2cd psi;
  psi << top(0), top(1), top(2), top(3);
  const Eigen::Vector2d sv = Eigen::JacobiSVD<Eigen::Matrix2cd>(psi).singularValues();
  out.schmidt_coefficients = {sv(0), sv(1)};
  const double target = 1.0 / std::sqrt(2.0);
  out.pass = std::abs(sv(0) - target) <= tol.structural && std::abs(sv(1) - target) <= tol.structural;
  if (!out.pass) out.diagnostic = "Schmidt coefficients are not both 1/sqrt(2)";
  return out;
}

inline EntanglementCheck adam_entanglement_check(const PureState& s, const Tolerances& tol = kDefaultTolerances) {
  return adam_entanglement_check(DensityOperator::from_pure(s), tol);
}

/// The pair Adam receives when he asks for the beta wire of slot `s`. A
/// product input with no reference is completed with beta = |1>.
inline PureState checked_pair(const SlotInput& in, Slot s) {
  if (in.reference_dim == 2) return detail::slot_state(in, s);
  if (in.reference_dim == 1) {
    HilbertRegistry reg;
    reg.add(SubsystemId::alpha(s)).add(SubsystemId::beta(s));
    return PureState(std::move(reg), kron(in.state, Vec(Vec::Unit(2, 0))));
  }
  throw std::invalid_argument("checked reference must be a qubit or absent");
}

struct CutAndChooseResult {
  bool aborted = false;
  std::vector<int> checked;    // instance indices (1-based)
  std::vector<int> surviving;  // instances that continue the protocol
};

/// Number of instances Adam checks: ceil(fraction * N).
inline int checked_count(int instances, double fraction) {
  if (!(fraction >= 0.0 && fraction < 1.0)) throw std::invalid_argument("check fraction must lie in [0, 1)");
  if (instances < 1) throw std::invalid_argument("number of instances must be >= 1");
  return static_cast<int>(std::ceil(fraction * instances - 1e-12));
}

/// Adam checks a uniformly random subset of instances and aborts on any
/// failure. Instance l (1-based) carries `inputs[l - 1]`; checked instances
/// are consumed.
inline CutAndChooseResult cut_and_choose(const std::vector<BabeAttack>& inputs, double fraction, std::uint64_t seed) {
  const int n = static_cast<int>(inputs.size());
  const int c = checked_count(n, fraction);
  Rng rng(seed);
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i + 1;
  for (int i = 0; i < c; ++i) {  // partial Fisher-Yates
    std::uniform_int_distribution<int> pick(i, n - 1);
    std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(pick(rng))]);
  }
  CutAndChooseResult out;
  out.checked.assign(order.begin(), order.begin() + c);
  std::sort(out.checked.begin(), out.checked.end());
  for (int l : out.checked) {
    const auto& a = inputs[static_cast<std::size_t>(l - 1)];
    for (Slot s : {Slot::Mu, Slot::Nu})
      if (!adam_entanglement_check(checked_pair(a.slot(s), s)).pass) out.aborted = true;
  }
  for (int l = 1; l <= n; ++l)
    if (!std::binary_search(out.checked.begin(), out.checked.end(), l)) out.surviving.push_back(l);
  return out;
}

/// Probability that a uniform ceil(fraction * N)-subset hits at least one of `attacked` instances.
inline double abort_probability(int instances, double fraction, int attacked) {
  const int c = checked_count(instances, fraction);
  if (attacked < 0 || attacked > instances) throw std::invalid_argument("attacked count out of range");
  // C(N - k, c) / C(N, c) = prod_{i < c} (N - k - i) / (N - i)
  double miss = 1.0;
  for (int i = 0; i < c; ++i) miss *= std::max(0, instances - attacked - i) / static_cast<double>(instances - i);
  return 1.0 - miss;
}

struct MonteCarloAbort {
  int trials = 0;
  double rate = 0.0;
  double standard_error = 0.0;
  double predicted = 0.0;
};

/// Repeats cut_and_choose with the first `attacked` instances carrying
/// `attack` and the rest honest pairs in bases drawn from `honest_ensemble`.
inline MonteCarloAbort cut_and_choose_monte_carlo(int instances, double fraction, int attacked, const BabeAttack& attack,
                                                  const BasisEnsemble& honest_ensemble, int trials, std::uint64_t seed) {
  MonteCarloAbort mc;
  mc.trials = trials;
  mc.predicted = abort_probability(instances, fraction, attacked);
  Rng draws(derive_seed(seed, 0));
  int aborts = 0;
  for (int t = 0; t < trials; ++t) {
    std::vector<BabeAttack> inputs;
    for (int l = 1; l <= instances; ++l) {
      if (l <= attacked) {
        inputs.push_back(attack);
      } else {
        const auto& fm = honest_ensemble.basis(Slot::Mu, honest_ensemble.draw(Slot::Mu, draws));
        const auto& fn = honest_ensemble.basis(Slot::Nu, honest_ensemble.draw(Slot::Nu, draws));
        inputs.push_back(honest_inputs(fm, fn));
      }
    }
    if (cut_and_choose(inputs, fraction, derive_seed(seed, static_cast<std::uint64_t>(t) + 1)).aborted) ++aborts;
  }
  mc.rate = trials > 0 ? static_cast<double>(aborts) / trials : 0.0;
  mc.standard_error = trials > 0 ? std::sqrt(mc.rate * (1.0 - mc.rate) / trials) : 0.0;
  return mc;
}

// JSON ----------------------------------------------------------------------
//
// {"description": "...",
//  "mu": {"state": [[re, im], ...], "reference_dim": 1},
//  "nu": {"state": [[re, im], ...], "reference_dim": 2}}
// "state" lists amplitudes over alpha (x) reference, reference index fastest.

inline BabeAttack attack_from_json(const nlohmann::json& j) {
  try {
    BabeAttack a;
    a.description = j.value("description", std::string("custom attack"));
    for (Slot s : {Slot::Mu, Slot::Nu}) {
      const auto& node = j.at(to_string(s));
      SlotInput in;
      in.reference_dim = node.value("reference_dim", 1);
      const auto& amps = node.at("state");
      in.state = Vec(static_cast<Index>(amps.size()));
      for (std::size_t k = 0; k < amps.size(); ++k) in.state(static_cast<Index>(k)) = complex_from_json(amps[k]);
      detail::slot_state(in, s);  // validates size and norm
      (s == Slot::Mu ? a.mu : a.nu) = std::move(in);
    }
    return a;
  } catch (const nlohmann::json::exception& ex) {
    throw std::invalid_argument(std::string("malformed attack description: ") + ex.what());
  }
}

inline nlohmann::json to_json(const BabeAttack& a) {
  nlohmann::json out{{"description", a.description}};
  for (Slot s : {Slot::Mu, Slot::Nu}) {
    nlohmann::json amps = nlohmann::json::array();
    for (Index k = 0; k < a.slot(s).state.size(); ++k) amps.push_back(complex_to_json(a.slot(s).state(k)));
    out[to_string(s)] = {{"state", amps}, {"reference_dim", a.slot(s).reference_dim}};
  }
  return out;
}

inline BabeAttack load_attack(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open attack file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& ex) {
    throw std::invalid_argument("attack file is not valid JSON: " + std::string(ex.what()));
  }
  return attack_from_json(j);
}

}  // namespace qbc4
