#pragma once

#include "qbc4/core/random.hpp"
#include "qbc4/core/registry.hpp"
#include "qbc4/core/state.hpp"

#include <json.hpp>

#include <array>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace qbc4 {

/// One of Babe's orthonormal qubit bases {|f_1>, |f_2>} (the matrix columns)
/// and the probability she uses it with.
struct WeightedBasis {
  Eigen::Matrix2cd basis;
  double probability = 1.0;
  std::string name;
};

/// Babe's randomized basis choice, one list of weighted bases per pair slot.
class BasisEnsemble {
 public:
  BasisEnsemble(std::vector<WeightedBasis> mu, std::vector<WeightedBasis> nu, std::string name = "custom",
                const Tolerances& tol = kDefaultTolerances)
      : slots_{std::move(mu), std::move(nu)}, name_(std::move(name)) {
    for (const auto& bases : slots_) {
      if (bases.empty()) throw std::invalid_argument("ensemble slot has no bases");
      double total = 0.0;
      for (const auto& b : bases) {
        if (!(b.probability >= 0.0)) throw std::invalid_argument("basis probability must be nonnegative");
        const double err = (b.basis.adjoint() * b.basis - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff();
        if (err > tol.structural) throw std::invalid_argument("ensemble basis is not orthonormal");
        total += b.probability;
      }
      if (std::abs(total - 1.0) > tol.equality)
        throw std::invalid_argument("ensemble probabilities do not sum to 1");
    }
  }

  const std::vector<WeightedBasis>& slot(Slot s) const { return slots_.at(index_of(s)); }
  const std::string& name() const { return name_; }

  const Eigen::Matrix2cd& basis(Slot s, int n) const { return slot(s).at(static_cast<std::size_t>(n)).basis; }
  double probability(Slot s, int n) const { return slot(s).at(static_cast<std::size_t>(n)).probability; }
  int size(Slot s) const { return static_cast<int>(slot(s).size()); }

  /// Samples a basis index for slot `s`.
  int draw(Slot s, Rng& rng) const {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double x = u(rng);
    double acc = 0.0;
    const auto& bases = slot(s);
    for (std::size_t n = 0; n < bases.size(); ++n) {
      acc += bases[n].probability;
      if (x < acc) return static_cast<int>(n);
    }
    for (std::size_t n = bases.size(); n-- > 0;)
      if (bases[n].probability > 0) return static_cast<int>(n);
    return 0;
  }

  /// The same ensemble with the mu and nu slots exchanged.
  BasisEnsemble mirrored() const { return BasisEnsemble(slots_[1], slots_[0], name_ + "-mirrored"); }

  // presets ---------------------------------------------------------------

  static Eigen::Matrix2cd computational_basis() { return Eigen::Matrix2cd::Identity(); }
  static Eigen::Matrix2cd hadamard_basis() {
    Eigen::Matrix2cd h;
    h << 1, 1, 1, -1;
    return h / std::sqrt(2.0);
  }
  static Eigen::Matrix2cd circular_basis() {
    Eigen::Matrix2cd c;
    c << 1, 1, cplx(0, 1), cplx(0, -1);
    return c / std::sqrt(2.0);
  }

  /// Both slots use the single known basis pair (f_mu, f_nu).
  static BasisEnsemble known(const Eigen::Matrix2cd& f_mu, const Eigen::Matrix2cd& f_nu,
                             std::string name = "known") {
    return BasisEnsemble({{f_mu, 1.0, "mu"}}, {{f_nu, 1.0, "nu"}}, std::move(name));
  }

  static BasisEnsemble uniform(const std::vector<std::pair<std::string, Eigen::Matrix2cd>>& bases,
                               std::string name) {
    std::vector<WeightedBasis> list;
    for (const auto& [n, b] : bases) list.push_back({b, 1.0 / static_cast<double>(bases.size()), n});
    return BasisEnsemble(list, list, std::move(name));
  }

  static BasisEnsemble computational() { return known(computational_basis(), computational_basis(), "computational"); }
  static BasisEnsemble hadamard() { return known(hadamard_basis(), hadamard_basis(), "hadamard"); }
  static BasisEnsemble mub2() {
    return uniform({{"computational", computational_basis()}, {"hadamard", hadamard_basis()}}, "mub2");
  }
  static BasisEnsemble mub3() {
    return uniform({{"computational", computational_basis()},
                    {"hadamard", hadamard_basis()},
                    {"circular", circular_basis()}},
                   "mub3");
  }

  /// m Haar-random bases per slot, drawn independently for mu and nu, uniform weights.
  static BasisEnsemble haar(int m, std::uint64_t seed) {
    if (m < 1) throw std::invalid_argument("haar ensemble needs m >= 1");
    Rng rng(seed);
    std::array<std::vector<WeightedBasis>, 2> slots;
    for (auto& list : slots)
      for (int n = 0; n < m; ++n)
        list.push_back({haar_matrix(2, rng), 1.0 / m, "haar-" + std::to_string(n)});
    return BasisEnsemble(slots[0], slots[1], "haar-" + std::to_string(m));
  }

  /// m Haar-random bases per slot with Dirichlet(1,...,1) weights.
  static BasisEnsemble random_weighted(int m, Rng& rng) {
    if (m < 1) throw std::invalid_argument("random ensemble needs m >= 1");
    std::exponential_distribution<double> e(1.0);
    std::array<std::vector<WeightedBasis>, 2> slots;
    for (auto& list : slots) {
      std::vector<double> w(static_cast<std::size_t>(m));
      for (auto& x : w) x = e(rng);
      const double total = std::accumulate(w.begin(), w.end(), 0.0);
      double acc = 0.0;
      for (int n = 0; n < m; ++n) {
        // last weight absorbs rounding so the sum is exact to 1e-12
        const double p = n + 1 < m ? w[static_cast<std::size_t>(n)] / total : 1.0 - acc;
        acc += p;
        list.push_back({haar_matrix(2, rng), p, "random-" + std::to_string(n)});
      }
    }
    return BasisEnsemble(slots[0], slots[1], "random-" + std::to_string(m));
  }

  /// Resolves a preset name: computational, hadamard, mub2, mub3, haar-<m>.
  static BasisEnsemble preset(const std::string& name, std::uint64_t seed) {
    if (name == "computational") return computational();
    if (name == "hadamard") return hadamard();
    if (name == "mub2") return mub2();
    if (name == "mub3") return mub3();
    if (name.rfind("haar-", 0) == 0) {
      int m = 0;
      try {
        std::size_t used = 0;
        m = std::stoi(name.substr(5), &used);
        if (used != name.size() - 5) m = 0;
      } catch (const std::exception&) {
        m = 0;
      }
      if (m < 1) throw std::invalid_argument("bad haar preset: " + name);
      return haar(m, derive_seed(seed, 0x6861617200ULL));
    }
    throw std::invalid_argument("unknown ensemble preset: " + name);
  }

 private:
  static std::size_t index_of(Slot s) {
    if (s == Slot::None) throw std::invalid_argument("ensembles are indexed by mu or nu");
    return s == Slot::Mu ? 0 : 1;
  }

  std::array<std::vector<WeightedBasis>, 2> slots_;
  std::string name_;
};

// JSON ----------------------------------------------------------------------
//
// {"name": "...", "mu": [{"name": "...", "probability": p,
//                          "matrix": [[[re, im], [re, im]], [[re, im], [re, im]]]}, ...],
//                 "nu": [...]}
// "matrix" is row-major; its columns are the basis vectors |f_1>, |f_2>.

inline nlohmann::json complex_to_json(cplx z) { return nlohmann::json::array({z.real(), z.imag()}); }

inline cplx complex_from_json(const nlohmann::json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) throw std::invalid_argument("complex number must be [re, im]");
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

inline nlohmann::json to_json(const BasisEnsemble& e) {
  nlohmann::json out;
  out["name"] = e.name();
  for (Slot s : {Slot::Mu, Slot::Nu}) {
    auto& list = out[to_string(s)];
    list = nlohmann::json::array();
    for (const auto& b : e.slot(s)) {
      nlohmann::json m = nlohmann::json::array();
      for (Index r = 0; r < 2; ++r)
        m.push_back({complex_to_json(b.basis(r, 0)), complex_to_json(b.basis(r, 1))});
      list.push_back({{"name", b.name}, {"probability", b.probability}, {"matrix", m}});
    }
  }
  return out;
}

inline BasisEnsemble ensemble_from_json(const nlohmann::json& j) {
  try {
    std::array<std::vector<WeightedBasis>, 2> slots;
    for (Slot s : {Slot::Mu, Slot::Nu}) {
      auto& list = slots[s == Slot::Mu ? 0 : 1];
      for (const auto& item : j.at(to_string(s))) {
        WeightedBasis b;
        b.probability = item.at("probability").get<double>();
        b.name = item.value("name", std::string{});
        const auto& m = item.at("matrix");
        if (m.size() != 2 || m.at(0).size() != 2 || m.at(1).size() != 2)
          throw std::invalid_argument("basis matrix must be 2x2");
        for (Index r = 0; r < 2; ++r)
          for (Index c = 0; c < 2; ++c)
            b.basis(r, c) = complex_from_json(m.at(static_cast<std::size_t>(r)).at(static_cast<std::size_t>(c)));
        list.push_back(b);
      }
    }
    return BasisEnsemble(slots[0], slots[1], j.value("name", std::string("file")));
  } catch (const nlohmann::json::exception& ex) {
    throw std::invalid_argument(std::string("malformed ensemble description: ") + ex.what());
  }
}

inline BasisEnsemble load_ensemble(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open ensemble file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& ex) {
    throw std::invalid_argument("ensemble file is not valid JSON: " + std::string(ex.what()));
  }
  return ensemble_from_json(j);
}

}  // namespace qbc4
