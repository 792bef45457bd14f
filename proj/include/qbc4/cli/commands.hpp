#pragma once

// Command implementations behind the qbc4 executable. Each command turns a
// RunConfig into a report payload, a human-readable summary and an exit code:
//   0 success / claims hold, 1 claims violated, 2 numerical flag, 3 usage error.

#include "qbc4/analysis/adversary.hpp"
#include "qbc4/analysis/binding.hpp"
#include "qbc4/analysis/concealing.hpp"
#include "qbc4/analysis/relaxed.hpp"
#include "qbc4/protocol/transcript.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace qbc4::cli {

inline constexpr int kSchemaVersion = 1;

enum ExitCode : int { kOk = 0, kClaimsViolated = 1, kNumericalFlag = 2, kUsage = 3 };

struct RunConfig {
  std::string command;
  int instances = 1;  // babe-attack defaults to 10 when --n is absent
  long long bit = 0;
  std::vector<std::string> ensembles;
  std::optional<std::uint64_t> seed;
  std::string mode = "entangled";
  // optimizer
  int restarts = 32;
  int max_iterations = 10000;
  double tol = kDefaultTolerances.convergence;
  int oracle_starts = 4;
  int oracle_iterations = 4000;
  bool oracle = true;
  int rounds = 1;
  bool relaxed = false;
  bool joint = false;
  bool history = false;
  // concealing
  bool purify = false;
  bool corrupt = false;
  int random_pairs = 100;
  int random_ensembles = 20;
  // adversary
  std::string attack_file;
  bool honest = false;
  double fraction = 0.5;
  std::optional<int> attacked;
  int trials = 10000;
  // output
  std::string output;
  std::string format = "json";
};

struct CommandResult {
  int exit_code = kOk;
  nlohmann::json report;
  std::string summary;
  std::string csv;  // filled when format == csv
};

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline nlohmann::json config_echo(const RunConfig& c) {
  nlohmann::json j{{"command", c.command},
                   {"instances", c.instances},
                   {"bit", c.bit},
                   {"ensembles", c.ensembles},
                   {"seed", c.seed ? nlohmann::json(*c.seed) : nlohmann::json(nullptr)},
                   {"mode", c.mode},
                   {"restarts", c.restarts},
                   {"max_iterations", c.max_iterations},
                   {"tol", c.tol},
                   {"oracle", c.oracle},
                   {"oracle_starts", c.oracle_starts},
                   {"oracle_iterations", c.oracle_iterations},
                   {"rounds", c.rounds},
                   {"relaxed", c.relaxed},
                   {"joint", c.joint},
                   {"history", c.history},
                   {"purify", c.purify},
                   {"corrupt", c.corrupt},
                   {"random_pairs", c.random_pairs},
                   {"random_ensembles", c.random_ensembles},
                   {"attack_file", c.attack_file},
                   {"honest", c.honest},
                   {"fraction", c.fraction},
                   {"attacked", c.attacked ? nlohmann::json(*c.attacked) : nlohmann::json(nullptr)},
                   {"trials", c.trials},
                   {"format", c.format}};
  return j;
}

/// Inverse of config_echo: rebuilds the configuration a report was produced from.
inline RunConfig config_from_json(const nlohmann::json& j) {
  RunConfig c;
  c.command = j.at("command").get<std::string>();
  c.instances = j.at("instances").get<int>();
  c.bit = j.at("bit").get<long long>();
  c.ensembles = j.at("ensembles").get<std::vector<std::string>>();
  if (!j.at("seed").is_null()) c.seed = j.at("seed").get<std::uint64_t>();
  c.mode = j.at("mode").get<std::string>();
  c.restarts = j.at("restarts").get<int>();
  c.max_iterations = j.at("max_iterations").get<int>();
  c.tol = j.at("tol").get<double>();
  c.oracle = j.at("oracle").get<bool>();
  c.oracle_starts = j.at("oracle_starts").get<int>();
  c.oracle_iterations = j.at("oracle_iterations").get<int>();
  c.rounds = j.at("rounds").get<int>();
  c.relaxed = j.at("relaxed").get<bool>();
  c.joint = j.at("joint").get<bool>();
  c.history = j.value("history", false);
  c.purify = j.at("purify").get<bool>();
  c.corrupt = j.at("corrupt").get<bool>();
  c.random_pairs = j.at("random_pairs").get<int>();
  c.random_ensembles = j.at("random_ensembles").get<int>();
  c.attack_file = j.at("attack_file").get<std::string>();
  c.honest = j.at("honest").get<bool>();
  c.fraction = j.at("fraction").get<double>();
  if (!j.at("attacked").is_null()) c.attacked = j.at("attacked").get<int>();
  c.trials = j.at("trials").get<int>();
  c.format = j.at("format").get<std::string>();
  return c;
}

inline void validate(const RunConfig& c) {
  if (!c.seed) throw UsageError("--seed is required; seeds are never taken from the environment");
  if (c.instances < 1) throw UsageError("--n must be >= 1");
  if (c.bit != 0 && c.bit != 1) throw UsageError("--bit must be 0 or 1");
  if (c.format != "json" && c.format != "csv") throw UsageError("--format must be json or csv");
  if (c.format == "csv" && c.command != "bind") throw UsageError("csv output is only available for bind");
  if (c.mode != "entangled" && c.mode != "classical") throw UsageError("--mode must be entangled or classical");
  if (c.rounds < 1) throw UsageError("--n-rounds must be >= 1");
  if (c.restarts < 1) throw UsageError("--restarts must be >= 1");
  if (!(c.fraction >= 0.0 && c.fraction < 1.0)) throw UsageError("--fraction must lie in [0, 1)");
  if (c.trials < 0) throw UsageError("--trials must be >= 0");
}

/// Preset name or path to an ensemble JSON file.
inline BasisEnsemble resolve_ensemble(const std::string& name, std::uint64_t seed) {
  try {
    return BasisEnsemble::preset(name, seed);
  } catch (const std::invalid_argument&) {
    if (!std::filesystem::exists(name)) throw UsageError("unknown ensemble preset or missing file: " + name);
  }
  try {
    return load_ensemble(name);
  } catch (const std::invalid_argument& ex) {
    throw UsageError(ex.what());
  }
}

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline nlohmann::json envelope(const RunConfig& c, nlohmann::json result) {
  return {{"schema_version", kSchemaVersion},
          {"command", c.command},
          {"config", config_echo(c)},
          {"generated_at", utc_timestamp()},
          {"result", std::move(result)}};
}

/// The report without its timestamp, for replay comparisons.
inline nlohmann::json comparable(nlohmann::json report) {
  report.erase("generated_at");
  return report;
}

inline std::string fmt(double v, int precision = 6) {
  std::ostringstream os;
  os.precision(precision);
  os << v;
  return os.str();
}

// run -----------------------------------------------------------------------

inline CommandResult cmd_run(const RunConfig& c) {
  validate(c);
  if (c.ensembles.size() > 1) throw UsageError("run takes a single --ensemble");
  const BasisEnsemble e = resolve_ensemble(c.ensembles.empty() ? "mub2" : c.ensembles.front(), *c.seed);
  const CommitMode mode = c.mode == "classical" ? CommitMode::Classical : CommitMode::Entangled;
  const Transcript t = run_protocol(c.instances, e, CommitBit::from_int(c.bit), *c.seed, mode);
  CommandResult r;
  r.report = envelope(c, to_json(t));
  std::ostringstream os;
  for (const auto& o : t.outcomes)
    os << "instance " << o.instance << ": bases (" << o.drawn_mu << "," << o.drawn_nu
       << ") acceptance probability " << fmt(o.acceptance_probability, 17) << " -> "
       << (o.accepted ? "accept" : "reject") << "\n";
  os << "verdict: " << (t.accepted ? "ACCEPTED" : "REJECTED") << "\n";
  r.summary = os.str();
  r.exit_code = t.accepted ? kOk : kClaimsViolated;
  return r;
}

// conceal -------------------------------------------------------------------

inline std::vector<BasisEnsemble> structured_ensembles() {
  return {BasisEnsemble::computational(), BasisEnsemble::hadamard(), BasisEnsemble::mub2(), BasisEnsemble::mub3()};
}

inline CommandResult cmd_conceal(const RunConfig& c) {
  validate(c);
  std::vector<BasisEnsemble> listed;
  if (c.ensembles.empty()) listed = structured_ensembles();
  for (const auto& name : c.ensembles) listed.push_back(resolve_ensemble(name, *c.seed));
  ConcealingOptions opt;
  opt.purify = c.purify;
  opt.corrupt = c.corrupt;
  opt.random_basis_pairs = c.random_pairs;
  opt.random_ensembles = c.random_ensembles;
  const ConcealingReport rep = concealing_sweep(listed, *c.seed, opt);
  CommandResult r;
  r.report = envelope(c, to_json(rep));
  std::ostringstream os;
  os << "quantity                                   max value\n";
  os << "TD(rho^B_0, rho^B_1)                       " << fmt(rep.max_bit_distance, 3) << "\n";
  os << "TD(rho^B_b, I/16)                          " << fmt(rep.max_mixed_distance, 3) << "\n";
  if (rep.purified) {
    os << "TD(rho^BC_0, rho^BC_1)                     " << fmt(rep.max_purified_distance, 3) << "\n";
    os << "product-form residual                      " << fmt(rep.max_product_residual, 3) << "\n";
  }
  os << "basis pairs " << rep.basis_pairs_checked << ", ensembles " << rep.ensembles_checked << "\n";
  os << "concealing " << (rep.holds() ? "HOLDS" : "VIOLATED") << "\n";
  r.summary = os.str();
  r.exit_code = rep.holds() ? kOk : kClaimsViolated;
  return r;
}

// bind ----------------------------------------------------------------------

struct BindClaims {
  bool dominance = true;
  bool bounded = true;
  bool oracle_agreement = true;
  bool binding_gap = true;      // only for randomized ensembles
  bool randomized = false;
};

inline BindClaims evaluate_claims(const CheatReport& rep, const BasisEnsemble& e) {
  BindClaims cl;
  cl.dominance = rep.p_a >= rep.baselines.best - 1e-9;
  cl.bounded = rep.p_a <= 1.0 + 1e-12;
  cl.oracle_agreement = !rep.has_oracle || rep.oracle_gap <= 1e-4;
  cl.randomized = e.size(Slot::Mu) * e.size(Slot::Nu) > 1;
  cl.binding_gap = !cl.randomized || rep.p_a <= 1.0 - 1e-3;
  return cl;
}

inline CommandResult cmd_bind(const RunConfig& c) {
  validate(c);
  std::vector<std::string> names = c.ensembles.empty() ? std::vector<std::string>{"mub2"} : c.ensembles;
  nlohmann::json per = nlohmann::json::array();
  std::ostringstream os, csv;
  csv << "ensemble_id,m,p_a,oracle,gap,baseline_announce_flip,baseline_best,rounds,round_bound\n";
  bool violated = false, flagged = false;
  for (std::size_t k = 0; k < names.size(); ++k) {
    const BasisEnsemble e = resolve_ensemble(names[k], *c.seed);
    BindingOptions opt;
    opt.seesaw.restarts = c.restarts;
    opt.seesaw.max_iterations = c.max_iterations;
    opt.seesaw.tol = c.tol;
    opt.seesaw.seed = derive_seed(*c.seed, 100 + k);
    opt.seesaw.record_history = c.history;
    opt.oracle.starts = c.oracle_starts;
    opt.oracle.iterations_per_start = c.oracle_iterations;
    opt.oracle.seed = derive_seed(*c.seed, 200 + k);
    opt.run_oracle = c.oracle;
    opt.rounds = c.rounds;
    const CheatReport rep = analyze_binding(e, opt);
    const BindClaims cl = evaluate_claims(rep, e);
    nlohmann::json item = to_json(rep, c.history);
    item["ensemble"] = to_json(e);
    item["claims"] = {{"dominates_baselines", cl.dominance},
                      {"at_most_one", cl.bounded},
                      {"oracle_agreement", cl.oracle_agreement},
                      {"randomized_ensemble", cl.randomized},
                      {"binding_gap", cl.binding_gap}};
    if (c.relaxed) {
      RelaxedOptions ro;
      ro.seed = derive_seed(*c.seed, 300 + k);
      ro.reference.restarts = c.restarts;
      ro.reference.tol = c.tol;
      item["relaxed_opening"] = to_json(relaxed_opening_tradeoff(e, {0.0, 0.01, 0.05, 0.1, 0.25, 0.5, 1.0}, ro));
    }
    if (c.joint) {
      SeesawOptions single = opt.seesaw, joint = opt.seesaw;
      joint.restarts = std::min(c.restarts, 3);
      joint.seed = derive_seed(*c.seed, 400 + k);
      const JointRoundCheck jc = n_round_joint_check(e, 2, single, joint);
      item["joint_rounds"] = {{"rounds", jc.rounds}, {"single", jc.single}, {"single_power", jc.single_power},
                              {"joint", jc.joint}, {"difference", jc.difference}, {"converged", jc.converged}};
      flagged = flagged || !jc.converged;
    }
    per.push_back(item);
    violated = violated || !(cl.dominance && cl.bounded && cl.oracle_agreement && cl.binding_gap);
    flagged = flagged || !rep.converged || !rep.monotone || rep.oracle_exhausted;

    const int m = std::max(e.size(Slot::Mu), e.size(Slot::Nu));
    os << e.name() << ": p_A = " << fmt(rep.p_a, 12);
    if (rep.has_oracle) os << ", oracle = " << fmt(rep.oracle_value, 12) << ", gap = " << fmt(rep.oracle_gap, 3);
    os << ", best baseline = " << fmt(rep.baselines.best, 12) << " (" << rep.baselines.best_strategy << ")"
       << ", p_A^" << rep.rounds << " = " << fmt(rep.round_bound, 12) << "\n";
    if (cl.randomized && !cl.binding_gap) os << "  binding gap claim violated: p_A > 1 - 1e-3\n";
    csv.precision(17);
    csv << e.name() << "," << m << "," << rep.p_a << "," << (rep.has_oracle ? rep.oracle_value : rep.p_a) << ","
        << rep.oracle_gap << "," << rep.baselines.identity << "," << rep.baselines.best << "," << rep.rounds << ","
        << rep.round_bound << "\n";
  }
  CommandResult r;
  r.report = envelope(c, {{"ensembles", per}});
  r.summary = os.str();
  r.csv = csv.str();
  r.exit_code = flagged ? kNumericalFlag : (violated ? kClaimsViolated : kOk);
  return r;
}

// babe-attack ---------------------------------------------------------------

inline CommandResult cmd_babe_attack(const RunConfig& c) {
  validate(c);
  const int n = c.instances;
  BabeAttack attack = orthogonal_probe_attack();
  if (c.honest) {
    Rng rng(derive_seed(*c.seed, 1));
    const Mat fm = haar_matrix(2, rng);
    const Mat fn = haar_matrix(2, rng);
    attack = honest_inputs(fm, fn);
  } else if (!c.attack_file.empty()) {
    try {
      attack = load_attack(c.attack_file);
    } catch (const std::invalid_argument& ex) {
      throw UsageError(ex.what());
    }
  }
  const int attacked = c.honest ? 0 : c.attacked.value_or(n);
  if (attacked < 0 || attacked > n) throw UsageError("--attacked must lie in [0, N]");
  const double helstrom = bit_distinguishability(attack);

  std::vector<BabeAttack> inputs;
  Rng draws(derive_seed(*c.seed, 2));
  const BasisEnsemble honest_ens = BasisEnsemble::mub2();
  for (int l = 1; l <= n; ++l) {
    if (l <= attacked) {
      inputs.push_back(attack);
    } else {
      inputs.push_back(honest_inputs(honest_ens.basis(Slot::Mu, honest_ens.draw(Slot::Mu, draws)),
                                     honest_ens.basis(Slot::Nu, honest_ens.draw(Slot::Nu, draws))));
    }
  }
  const CutAndChooseResult single = cut_and_choose(inputs, c.fraction, derive_seed(*c.seed, 3));
  const MonteCarloAbort mc =
      cut_and_choose_monte_carlo(n, c.fraction, attacked, attack, honest_ens, c.trials, derive_seed(*c.seed, 4));

  const double mc_dev = std::abs(mc.rate - mc.predicted);
  const bool mc_ok = c.trials == 0 || mc_dev <= std::max(3.0 * mc.standard_error, 1e-12);
  const bool concealing_ok = !c.honest || std::abs(helstrom - 0.5) <= 1e-12;

  nlohmann::json result{{"attack", to_json(attack)},
                        {"honest_mode", c.honest},
                        {"entangled_with_reference", attack.entangled()},
                        {"bit_distinguishability", helstrom},
                        {"instances", n},
                        {"attacked_instances", attacked},
                        {"check_fraction", c.fraction},
                        {"checked_count", checked_count(n, c.fraction)},
                        {"cut_and_choose",
                         {{"aborted", single.aborted}, {"checked", single.checked}, {"surviving", single.surviving}}},
                        {"monte_carlo",
                         {{"trials", mc.trials},
                          {"abort_rate", mc.rate},
                          {"standard_error", mc.standard_error},
                          {"predicted_abort_probability", mc.predicted},
                          {"within_three_standard_errors", mc_ok}}}};
  CommandResult r;
  r.report = envelope(c, result);
  std::ostringstream os;
  os << "attack: " << attack.description << "\n";
  os << "bit distinguishability (Helstrom): " << fmt(helstrom, 17) << "\n";
  os << "cut-and-choose: N = " << n << ", checked " << checked_count(n, c.fraction) << ", "
     << (single.aborted ? "ABORT" : "PROCEED") << " (" << single.surviving.size() << " instances continue)\n";
  os << "abort rate " << fmt(mc.rate) << " over " << mc.trials << " trials, predicted " << fmt(mc.predicted) << "\n";
  r.summary = os.str();
  r.exit_code = (mc_ok && concealing_ok) ? kOk : kClaimsViolated;
  return r;
}

inline CommandResult dispatch(const RunConfig& c) {
  if (c.command == "run") return cmd_run(c);
  if (c.command == "conceal") return cmd_conceal(c);
  if (c.command == "bind") return cmd_bind(c);
  if (c.command == "babe-attack") return cmd_babe_attack(c);
  throw UsageError("unknown command: " + c.command);
}

/// Writes `content` to `path` through a temporary file and a rename.
inline void write_atomically(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

inline std::string payload(const RunConfig& c, const CommandResult& r) {
  return c.format == "csv" ? r.csv : r.report.dump(2) + "\n";
}

}  // namespace qbc4::cli
