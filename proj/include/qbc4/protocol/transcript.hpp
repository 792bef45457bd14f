#pragma once

#include "qbc4/protocol/session.hpp"

#include <json.hpp>

namespace qbc4 {

struct InstanceOutcome {
  int instance = 1;
  int drawn_mu = 0;
  int drawn_nu = 0;
  double acceptance_probability = 0.0;
  bool accepted = false;
};

/// Complete record of one protocol run, sufficient to replay it.
struct Transcript {
  int instances = 1;
  CommitBit bit = kBit0;
  CommitMode mode = CommitMode::Entangled;
  nlohmann::json ensemble;
  std::uint64_t seed = 0;
  std::uint64_t babe_seed = 0;
  std::uint64_t adam_seed = 0;
  std::vector<Event> events;
  std::vector<InstanceOutcome> outcomes;
  double joint_acceptance_probability = 0.0;
  bool accepted = false;
  bool aborted = false;
};

/// Honest run over `instances` independent pairs.
inline Transcript run_protocol(int instances, const BasisEnsemble& ensemble, CommitBit b, std::uint64_t seed,
                               CommitMode mode = CommitMode::Entangled) {
  if (instances < 1) throw std::invalid_argument("number of instances must be >= 1");
  SessionState session = SessionState::babe_prepare(ensemble, seed, instances, mode);
  session.adam_commit(b);
  const Announcement ann = session.adam_open();
  const VerifyResult res = session.babe_verify(ann);

  Transcript t;
  t.instances = instances;
  t.bit = b;
  t.mode = mode;
  t.ensemble = to_json(ensemble);
  t.seed = seed;
  t.babe_seed = session.babe_seed();
  t.adam_seed = session.adam_seed();
  t.events = session.events();
  t.aborted = res.aborted;
  t.accepted = res.accepted;
  t.joint_acceptance_probability = res.joint_probability;
  for (int l = 1; l <= instances && !res.aborted; ++l) {
    const auto d = session.drawn(l);
    const auto k = static_cast<std::size_t>(l - 1);
    t.outcomes.push_back({l, d[0], d[1], res.probabilities[k], res.outcomes[k]});
  }
  return t;
}

inline nlohmann::json to_json(const Event& e) {
  return {{"action", e.action},
          {"sender", to_string(e.sender)},
          {"receiver", to_string(e.receiver)},
          {"subsystems", e.subsystems},
          {"data", e.data}};
}

inline nlohmann::json to_json(const Transcript& t) {
  nlohmann::json events = nlohmann::json::array();
  for (const auto& e : t.events) events.push_back(to_json(e));
  nlohmann::json instances = nlohmann::json::array();
  for (const auto& o : t.outcomes)
    instances.push_back({{"instance", o.instance},
                         {"drawn_basis", {{"mu", o.drawn_mu}, {"nu", o.drawn_nu}}},
                         {"acceptance_probability", o.acceptance_probability},
                         {"accepted", o.accepted}});
  return {{"config",
           {{"instances", t.instances}, {"bit", t.bit.value()}, {"mode", to_string(t.mode)}, {"ensemble", t.ensemble}}},
          {"seeds", {{"seed", t.seed}, {"babe", t.babe_seed}, {"adam", t.adam_seed}}},
          {"events", events},
          {"instances", instances},
          {"joint_acceptance_probability", t.joint_acceptance_probability},
          {"accepted", t.accepted},
          {"aborted", t.aborted}};
}

/// Re-runs the protocol from a serialized transcript's config and seed.
inline Transcript replay(const nlohmann::json& transcript) {
  const auto& cfg = transcript.at("config");
  const CommitMode mode = cfg.at("mode").get<std::string>() == "classical" ? CommitMode::Classical : CommitMode::Entangled;
  return run_protocol(cfg.at("instances").get<int>(), ensemble_from_json(cfg.at("ensemble")),
                      CommitBit::from_int(cfg.at("bit").get<int>()), transcript.at("seeds").at("seed").get<std::uint64_t>(),
                      mode);
}

}  // namespace qbc4
