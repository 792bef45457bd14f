#pragma once

// Relaxed opening: Adam may commit any state W (|psi_A>|0>_ext (x) input) with
// a unitary W on his ancilla (plus an optional extension register of
// dimension `ancilla_factor`) and the two alpha wires. He opens b = 0 as
// is and b = 1 after a unitary U on the ancilla. Both success probabilities
// are sums of |tr(X M)|^2 terms, so each of W and U is improved by a seesaw
// step on the weighted objective P1 + lambda * P0. Every visited strategy is
// a feasible point; the curve is the upper envelope of those points.

#include "qbc4/analysis/binding.hpp"
#include "qbc4/analysis/unitary_search.hpp"
#include "qbc4/core/pauli.hpp"

#include <json.hpp>

#include <algorithm>
#include <vector>

namespace qbc4 {

struct RelaxedOptions {
  int ancilla_factor = 1;  // ancilla dimension = 16 * ancilla_factor
  std::vector<double> lambdas{0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 64.0};
  int random_starts = 1;
  int rounds = 40;               // W/U alternations per start
  int inner_iterations = 200;    // seesaw iterations per W or U step
  double tol = kDefaultTolerances.convergence;
  double feasibility_tol = kDefaultTolerances.convergence;
  std::uint64_t seed = 0;
  SeesawOptions reference;       // settings for the delta = 0 (perfect opening) start
};

struct TradeoffPoint {
  double delta = 0.0;
  double bit0_success = 0.0;  // P0 of the chosen strategy, >= 1 - delta
  double bit1_success = 0.0;  // max P1 found
};

struct TradeoffCurve {
  std::vector<TradeoffPoint> points;
  std::vector<std::pair<double, double>> visited;  // (P0, P1) of every strategy evaluated
  double perfect_opening_p_a = 0.0;
};

namespace detail {

/// Vectors of the relaxed model for one draw, embedded with the extension
/// register as (ancilla(16) ext(r) alpha(4) beta(4)).
struct RelaxedDraw {
  double weight;
  Vec input;
  Vec source;
  Vec target;
};

inline Vec embed_extension(const Vec& canonical, Index r) {
  // canonical index: (a * 4 + x) * 4 + y with a over A_mu A_nu, x over the alpha pair, y over the beta pair
  Vec out = Vec::Zero(canonical.size() * r);
  for (Index a = 0; a < 16; ++a)
    for (Index xy = 0; xy < 16; ++xy) out(((a * r) * 16) + xy) = canonical(a * 16 + xy);
  return out;
}

/// Row-major (rows x cols) view of a vector as a matrix.
inline Mat as_matrix(const Vec& v, Index rows) {
  const Index cols = v.size() / rows;
  return Eigen::Map<const RowMajorMat>(v.data(), rows, cols);
}

/// Vector with the extension register set to |e> in place of |0>.
inline Vec shift_extension(const Vec& v, Index r, Index e) {
  Vec out = Vec::Zero(v.size());
  for (Index a = 0; a < 16; ++a)
    for (Index xy = 0; xy < 16; ++xy) out(((a * r + e) * 16) + xy) = v(((a * r) * 16) + xy);
  return out;
}

class RelaxedModel {
 public:
  RelaxedModel(const BasisEnsemble& ens, Index r) : r_(r) {
    for (int a = 0; a < ens.size(Slot::Mu); ++a)
      for (int c = 0; c < ens.size(Slot::Nu); ++c) {
        const double q = ens.probability(Slot::Mu, a) * ens.probability(Slot::Nu, c);
        if (q == 0.0) continue;
        const auto& fm = ens.basis(Slot::Mu, a);
        const auto& fn = ens.basis(Slot::Nu, c);
        draws_.push_back({q, embed_extension(pre_commit_state(fm, fn).amplitudes(), r),
                          embed_extension(committed_state(fm, fn, kBit0).amplitudes(), r),
                          embed_extension(committed_state(fm, fn, kBit1).amplitudes(), r)});
      }
  }

  Index ancilla_dim() const { return 16 * r_; }
  Index commit_dim() const { return 64 * r_; }  // ancilla (x) alpha pair

  /// Controlled Paulis on (A_mu, B_mu_alpha) and (A_nu, B_nu_alpha), identity on the extension.
  Mat honest_commit() const {
    const auto v = pauli_matrices();
    // local order (a_mu, a_nu, ext, x_mu, x_nu)
    Mat w = Mat::Zero(commit_dim(), commit_dim());
    for (Index am = 0; am < 4; ++am)
      for (Index an = 0; an < 4; ++an) {
        const Mat block = kron(Mat(v[static_cast<std::size_t>(am)]), Mat(v[static_cast<std::size_t>(an)]));
        for (Index e = 0; e < r_; ++e) {
          const Index base = ((am * 4 + an) * r_ + e) * 4;
          w.block(base, base, 4, 4) = block;
        }
      }
    return w;
  }

  /// Honest transform, then the alpha wires go back switched.
  Mat switching_commit() const {
    Mat swap = Mat::Zero(4, 4);
    swap(0, 0) = swap(3, 3) = 1.0;
    swap(1, 2) = swap(2, 1) = 1.0;
    return kron(Mat::Identity(ancilla_dim(), ancilla_dim()), swap) * honest_commit();
  }

  /// (W (x) I_beta) applied to the input of every draw.
  std::vector<Vec> committed(const Mat& w) const {
    std::vector<Vec> out;
    for (const auto& d : draws_) {
      const Mat m = w * as_matrix(d.input, commit_dim());
      out.emplace_back(Eigen::Map<const Vec>(RowMajorMat(m).data(), m.size()));
    }
    return out;
  }

  double bit0_success(const Mat& w) const {
    const auto c = committed(w);
    double p = 0.0;
    for (std::size_t n = 0; n < draws_.size(); ++n)
      for (Index e = 0; e < r_; ++e)
        p += draws_[n].weight * std::norm(shift_extension(draws_[n].source, r_, e).dot(c[n]));
    return p;
  }

  /// Terms over U for the b = 1 opening of the states committed by `w`.
  std::vector<OverlapTerm> opening_terms(const Mat& w) const {
    const auto c = committed(w);
    std::vector<OverlapTerm> terms;
    for (std::size_t n = 0; n < draws_.size(); ++n)
      for (Index e = 0; e < r_; ++e) {
        const Mat cm = as_matrix(c[n], ancilla_dim());
        const Mat tm = as_matrix(shift_extension(draws_[n].target, r_, e), ancilla_dim());
        terms.push_back({draws_[n].weight, cm * tm.adjoint()});
      }
    return terms;
  }

  /// Terms over W for P1 + lambda * P0 with the opening unitary `u` fixed.
  std::vector<OverlapTerm> commit_terms(const Mat& u, double lambda) const {
    std::vector<OverlapTerm> terms;
    const Mat u_full_adj = kron(Mat(u.adjoint()), Mat(Mat::Identity(16, 16)));  // U^dag on ancilla, identity on alpha beta
    for (const auto& d : draws_) {
      const Mat in = as_matrix(d.input, commit_dim());
      for (Index e = 0; e < r_; ++e) {
        const Vec t = u_full_adj * shift_extension(d.target, r_, e);
        terms.push_back({d.weight, in * as_matrix(t, commit_dim()).adjoint()});
        if (lambda > 0.0)
          terms.push_back({lambda * d.weight, in * as_matrix(shift_extension(d.source, r_, e), commit_dim()).adjoint()});
      }
    }
    return terms;
  }

  double bit1_success(const Mat& w, const Mat& u) const { return overlap_objective(u, opening_terms(w)); }

 private:
  Index r_;
  std::vector<RelaxedDraw> draws_;
};

}  // namespace detail

/// Upper envelope of max P1 subject to P0 >= 1 - delta over the explored strategies.
inline TradeoffCurve relaxed_opening_tradeoff(const BasisEnsemble& ens, const std::vector<double>& deltas,
                                              const RelaxedOptions& opt = {}) {
  for (double d : deltas)
    if (!(d >= 0.0)) throw std::invalid_argument("relaxation delta must be >= 0");
  if (opt.ancilla_factor < 1) throw std::invalid_argument("ancilla factor must be >= 1");
  const detail::RelaxedModel model(ens, opt.ancilla_factor);
  const Index da = model.ancilla_dim();
  TradeoffCurve curve;

  auto record = [&](const Mat& w, const Mat& u) {
    curve.visited.emplace_back(model.bit0_success(w), model.bit1_success(w, u));
  };

  // perfect-opening start: honest commit, best local rotation
  const Mat honest = model.honest_commit();
  const SeesawRun best_u = [&] {
    SeesawRun best;
    best.value = -1.0;
    Rng rng(derive_seed(opt.seed, 7));
    const auto terms = model.opening_terms(honest);
    for (int r = 0; r < std::max(1, opt.reference.restarts); ++r) {
      const Mat start = r == 0 ? polar_maximizer(terms.front().transition) : haar_matrix(da, rng);
      SeesawRun run = seesaw_ascent(terms, start, opt.reference.tol, opt.reference.max_iterations);
      if (run.value > best.value) best = std::move(run);
    }
    return best;
  }();
  curve.perfect_opening_p_a = best_u.value;
  record(honest, best_u.unitary);
  record(model.switching_commit(), Mat::Identity(da, da));

  Rng rng(opt.seed);
  std::vector<std::pair<Mat, Mat>> starts{{honest, best_u.unitary}, {model.switching_commit(), Mat::Identity(da, da)}};
  for (int k = 0; k < opt.random_starts; ++k) starts.emplace_back(haar_matrix(model.commit_dim(), rng), haar_matrix(da, rng));

  for (double lambda : opt.lambdas)
    for (const auto& [w0, u0] : starts) {
      Mat w = w0, u = u0;
      double last = model.bit1_success(w, u) + lambda * model.bit0_success(w);
      for (int round = 0; round < opt.rounds; ++round) {
        w = seesaw_ascent(model.commit_terms(u, lambda), w, opt.tol, opt.inner_iterations).unitary;
        u = seesaw_ascent(model.opening_terms(w), u, opt.tol, opt.inner_iterations).unitary;
        record(w, u);
        const double now = curve.visited.back().second + lambda * curve.visited.back().first;
        if (now - last < opt.tol) break;
        last = now;
      }
    }

  for (double d : deltas) {
    TradeoffPoint pt{d, 0.0, 0.0};
    for (const auto& [p0, p1] : curve.visited)
      if (p0 >= 1.0 - d - opt.feasibility_tol && p1 > pt.bit1_success) {
        pt.bit1_success = std::min(1.0, p1);
        pt.bit0_success = std::min(1.0, p0);
      }
    curve.points.push_back(pt);
  }
  return curve;
}

inline nlohmann::json to_json(const TradeoffCurve& c) {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : c.points)
    pts.push_back({{"delta", p.delta}, {"bit0_success", p.bit0_success}, {"bit1_success", p.bit1_success}});
  return {{"perfect_opening_p_a", c.perfect_opening_p_a}, {"points", pts}, {"strategies_visited", c.visited.size()}};
}

}  // namespace qbc4
