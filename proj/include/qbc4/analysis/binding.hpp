#pragma once

// Adam's cheating probability under the local-rotation attack: he commits
// b = 0 honestly, applies a unitary U on his ancillas H^A, then announces
// b = 1. For Babe's basis draw n the attack succeeds with probability
// |<T_n|(U (x) I)|S_n>|^2 = |tr(U M_n)|^2, where S_n is the honest b = 0
// state, T_n the honest b = 1 state in the same physical wire order, and
// M_n the transition operator on H^A.

#include "qbc4/analysis/unitary_search.hpp"
#include "qbc4/core/random.hpp"
#include "qbc4/core/state.hpp"
#include "qbc4/protocol/ensemble.hpp"
#include "qbc4/protocol/states.hpp"

#include <json.hpp>

#include <cmath>
#include <string>
#include <vector>

namespace qbc4 {

struct CheatDraw {
  std::vector<int> basis_indices;  // (n_mu, n_nu) per instance
  double weight = 0.0;
  PureState source;  // honest b = 0 committed state
  PureState target;  // state a b = 1 opening is verified against, same wire order
};

/// Per-draw source/target pairs for one attack, and the factors Adam rotates.
struct CheatInstance {
  std::vector<CheatDraw> draws;
  std::vector<SubsystemId> adam_side;
};

/// One instance ell: every joint draw (n_mu, n_nu) with positive weight.
inline CheatInstance build_cheat_instances(const BasisEnsemble& e, int instance = 1) {
  CheatInstance out;
  out.adam_side = adam_factors(instance);
  for (int a = 0; a < e.size(Slot::Mu); ++a)
    for (int c = 0; c < e.size(Slot::Nu); ++c) {
      const double q = e.probability(Slot::Mu, a) * e.probability(Slot::Nu, c);
      if (q == 0.0) continue;
      const auto& fm = e.basis(Slot::Mu, a);
      const auto& fn = e.basis(Slot::Nu, c);
      out.draws.push_back({{a, c}, q, committed_state(fm, fn, kBit0, instance), committed_state(fm, fn, kBit1, instance)});
    }
  return out;
}

/// Joint attack on `rounds` independent instances: every combination of
/// per-instance draws, product weights, Adam acting on all ancillas at once.
inline CheatInstance build_joint_cheat_instances(const BasisEnsemble& e, int rounds) {
  if (rounds < 1) throw std::invalid_argument("rounds must be >= 1");
  CheatInstance joint = build_cheat_instances(e, 1);
  for (int l = 2; l <= rounds; ++l) {
    const CheatInstance next = build_cheat_instances(e, l);
    CheatInstance merged;
    merged.adam_side = joint.adam_side;
    for (const auto& id : next.adam_side) merged.adam_side.push_back(id);
    for (const auto& d1 : joint.draws)
      for (const auto& d2 : next.draws) {
        auto idx = d1.basis_indices;
        idx.insert(idx.end(), d2.basis_indices.begin(), d2.basis_indices.end());
        merged.draws.push_back(
            {idx, d1.weight * d2.weight, tensor(d1.source, d2.source), tensor(d1.target, d2.target)});
      }
    joint = std::move(merged);
  }
  return joint;
}

/// M with <T|(U (x) I)|S> = tr(U M) for every U on `adam_side`
/// (U acting on the adam_side factors in the order listed).
inline Mat transition_operator(const PureState& source, const PureState& target,
                               const std::vector<SubsystemId>& adam_side) {
  if (!(source.registry() == target.registry()))
    throw std::invalid_argument("source and target live on different registries");
  for (const auto& id : adam_side)
    if (!source.registry().contains(id)) throw std::invalid_argument("Adam factor not in registry: " + id.label());
  const HilbertRegistry rest = source.registry().complement(adam_side);
  auto order = adam_side;
  for (const auto& id : rest.ids()) order.push_back(id);
  const PureState s = permute(source, order);
  const PureState t = permute(target, order);
  Index da = 1;
  for (const auto& id : adam_side) da *= source.registry().dim_of(id);
  const Index db = source.dim() / da;
  Eigen::Map<const RowMajorMat> sm(s.amplitudes().data(), da, db);
  Eigen::Map<const RowMajorMat> tm(t.amplitudes().data(), da, db);
  return sm * tm.adjoint();
}

inline std::vector<OverlapTerm> transition_terms(const CheatInstance& inst) {
  std::vector<OverlapTerm> terms;
  terms.reserve(inst.draws.size());
  for (const auto& d : inst.draws) terms.push_back({d.weight, transition_operator(d.source, d.target, inst.adam_side)});
  return terms;
}

inline Index adam_dimension(const CheatInstance& inst) {
  if (inst.draws.empty()) throw std::invalid_argument("cheat instance set is empty");
  Index d = 1;
  for (const auto& id : inst.adam_side) d *= inst.draws.front().source.registry().dim_of(id);
  return d;
}

// ---------------------------------------------------------------------------
// known bases

struct KnownBasisCheat {
  Mat unitary;
  double fidelity = 0.0;
  double marginal_distance = 0.0;  // TD of Babe's reduced states of S and T
  bool exact = false;              // false when the marginals differ: fidelity is then the Uhlmann bound
};

/// Aligns the Schmidt frames of S and T across the Adam | Babe cut. Working
/// with M = Tr_Babe |S><T| handles degenerate Schmidt blocks directly: its
/// polar factor is the overlap-maximizing rotation, and |tr(U M)| reaches the
/// nuclear norm of M, which equals the fidelity of Babe's two marginals.
inline KnownBasisCheat known_basis_cheat(const PureState& source, const PureState& target,
                                         const std::vector<SubsystemId>& adam_side,
                                         const Tolerances& tol = kDefaultTolerances) {
  KnownBasisCheat out;
  const auto babe_side = source.registry().complement(adam_side).ids();
  out.marginal_distance = trace_distance(partial_trace(source, babe_side), partial_trace(target, babe_side));
  const Mat m = transition_operator(source, target, adam_side);
  out.unitary = polar_maximizer(m);
  out.fidelity = std::min(1.0, std::norm(trace_product(out.unitary, m)));
  out.exact = out.marginal_distance <= tol.structural;
  return out;
}

inline KnownBasisCheat known_basis_cheat(const CheatDraw& d, const std::vector<SubsystemId>& adam_side) {
  return known_basis_cheat(d.source, d.target, adam_side);
}

// ---------------------------------------------------------------------------
// baselines

struct Baselines {
  double identity = 0.0;             // announce b = 1 without touching the ancillas
  std::vector<double> blind;         // known-basis unitary for draw n applied to all draws
  double best = 0.0;
  std::string best_strategy;
};

inline Baselines trivial_strategies(const CheatInstance& inst) {
  const auto terms = transition_terms(inst);
  const Index d = adam_dimension(inst);
  Baselines b;
  b.identity = overlap_objective(Mat::Identity(d, d), terms);
  b.best = b.identity;
  b.best_strategy = "announce-flip";
  for (std::size_t n = 0; n < inst.draws.size(); ++n) {
    const double v = overlap_objective(known_basis_cheat(inst.draws[n], inst.adam_side).unitary, terms);
    b.blind.push_back(v);
    if (v > b.best) {
      b.best = v;
      b.best_strategy = "known-basis-unitary-for-draw-" + std::to_string(n);
    }
  }
  return b;
}

// ---------------------------------------------------------------------------
// optimization

struct SeesawOptions {
  int restarts = 32;
  int max_iterations = 10000;
  double tol = kDefaultTolerances.convergence;
  std::uint64_t seed = 0;
  bool record_history = false;
};

struct RestartSummary {
  std::string start;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct CheatReport {
  double p_a = 0.0;
  Mat unitary;
  std::vector<RestartSummary> restarts;
  std::vector<double> history;  // best restart's objective history (if recorded)
  bool monotone = true;
  bool converged = true;
  std::vector<double> per_draw_success;
  std::vector<std::vector<int>> draw_indices;
  std::vector<double> draw_weights;
  Baselines baselines;
  bool has_oracle = false;
  double oracle_value = 0.0;
  double oracle_gap = 0.0;
  bool oracle_exhausted = false;
  int rounds = 1;
  double round_bound = 0.0;  // p_a ^ rounds
  std::string strategy;
};

inline double n_round_bound(double p_a, int rounds) {
  if (!(p_a >= 0.0 && p_a <= 1.0)) throw std::invalid_argument("p_A must lie in [0, 1]");
  if (rounds < 1) throw std::invalid_argument("N must be >= 1");
  return std::pow(p_a, rounds);
}

/// Best of `restarts` seesaw runs; the first starts at the known-basis cheat
/// for the heaviest draw, the rest at Haar-random unitaries. Ties go to the
/// earlier restart.
inline CheatReport seesaw_optimize(const CheatInstance& inst, const SeesawOptions& opt) {
  if (inst.draws.empty()) throw std::invalid_argument("cheat instance set is empty");
  const auto terms = transition_terms(inst);
  const Index d = adam_dimension(inst);
  std::size_t heaviest = 0;
  for (std::size_t n = 1; n < inst.draws.size(); ++n)
    if (inst.draws[n].weight > inst.draws[heaviest].weight) heaviest = n;

  CheatReport rep;
  rep.p_a = -1.0;
  Rng rng(opt.seed);
  for (int r = 0; r < std::max(1, opt.restarts); ++r) {
    Mat start;
    std::string label;
    if (r == 0) {
      start = known_basis_cheat(inst.draws[heaviest], inst.adam_side).unitary;
      label = "known-basis-draw-" + std::to_string(heaviest);
    } else {
      start = haar_matrix(d, rng);
      label = "haar-" + std::to_string(r);
    }
    SeesawRun run = seesaw_ascent(terms, start, opt.tol, opt.max_iterations);
    rep.monotone = rep.monotone && run.monotone;
    rep.restarts.push_back({label, run.value, run.iterations, run.converged});
    if (run.value > rep.p_a) {
      rep.p_a = run.value;
      rep.unitary = run.unitary;
      rep.converged = run.converged;
      rep.strategy = "seesaw from " + label;
      if (opt.record_history) rep.history = run.history;
    }
  }
  rep.p_a = std::min(rep.p_a, 1.0);
  for (std::size_t n = 0; n < inst.draws.size(); ++n) {
    rep.per_draw_success.push_back(std::norm(trace_product(rep.unitary, terms[n].transition)));
    rep.draw_indices.push_back(inst.draws[n].basis_indices);
    rep.draw_weights.push_back(inst.draws[n].weight);
  }
  rep.baselines = trivial_strategies(inst);
  rep.round_bound = rep.p_a;
  return rep;
}

inline OracleResult oracle_optimize(const CheatInstance& inst, const OracleOptions& opt) {
  return oracle_optimize(transition_terms(inst), adam_dimension(inst), opt);
}

struct BindingOptions {
  SeesawOptions seesaw;
  OracleOptions oracle;
  bool run_oracle = true;
  int rounds = 1;
};

/// Seesaw, oracle, baselines and the N-round bound for one ensemble.
inline CheatReport analyze_binding(const BasisEnsemble& e, const BindingOptions& opt) {
  const CheatInstance inst = build_cheat_instances(e);
  CheatReport rep = seesaw_optimize(inst, opt.seesaw);
  if (opt.run_oracle) {
    const OracleResult o = oracle_optimize(inst, opt.oracle);
    rep.has_oracle = true;
    rep.oracle_value = o.value;
    rep.oracle_gap = std::abs(rep.p_a - o.value);
    rep.oracle_exhausted = o.budget_exhausted;
  }
  rep.rounds = opt.rounds;
  rep.round_bound = n_round_bound(rep.p_a, opt.rounds);
  return rep;
}

struct JointRoundCheck {
  int rounds = 2;
  double single = 0.0;        // single-instance p_A
  double single_power = 0.0;  // p_A ^ rounds
  double joint = 0.0;         // seesaw optimum on the joint instance set
  double difference = 0.0;    // |joint - single_power|
  bool converged = true;
};

/// Compares the joint optimum over `rounds` instances with p_A ^ rounds.
inline JointRoundCheck n_round_joint_check(const BasisEnsemble& e, int rounds, const SeesawOptions& single_opt,
                                           const SeesawOptions& joint_opt) {
  JointRoundCheck out;
  out.rounds = rounds;
  out.single = seesaw_optimize(build_cheat_instances(e), single_opt).p_a;
  out.single_power = n_round_bound(out.single, rounds);
  const CheatReport joint = seesaw_optimize(build_joint_cheat_instances(e, rounds), joint_opt);
  out.joint = joint.p_a;
  out.converged = joint.converged;
  out.difference = std::abs(out.joint - out.single_power);
  return out;
}

inline nlohmann::json to_json(const CheatReport& r, bool include_history = false) {
  nlohmann::json restarts = nlohmann::json::array();
  for (const auto& s : r.restarts)
    restarts.push_back({{"start", s.start}, {"value", s.value}, {"iterations", s.iterations}, {"converged", s.converged}});
  nlohmann::json draws = nlohmann::json::array();
  for (std::size_t n = 0; n < r.per_draw_success.size(); ++n)
    draws.push_back({{"basis_indices", r.draw_indices[n]}, {"weight", r.draw_weights[n]}, {"success", r.per_draw_success[n]}});
  nlohmann::json out{{"p_a", r.p_a},
                     {"strategy", r.strategy},
                     {"converged", r.converged},
                     {"monotone", r.monotone},
                     {"restarts", restarts},
                     {"per_draw", draws},
                     {"baselines",
                      {{"announce_flip", r.baselines.identity},
                       {"blind_known_basis", r.baselines.blind},
                       {"best", r.baselines.best},
                       {"best_strategy", r.baselines.best_strategy}}},
                     {"rounds", r.rounds},
                     {"round_bound", r.round_bound}};
  if (r.has_oracle)
    out["oracle"] = {{"value", r.oracle_value}, {"gap", r.oracle_gap}, {"budget_exhausted", r.oracle_exhausted}};
  if (include_history) out["history"] = r.history;
  return out;
}

}  // namespace qbc4
