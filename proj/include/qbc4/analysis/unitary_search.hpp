#pragma once

// Maximization of f(U) = sum_k w_k |tr(U M_k)|^2 over d x d unitaries.
//
// f is convex in U, so its linearization at U is a global minorant. The
// seesaw step maximizes that linearization over the unitary group, which is
// the polar factor of the gradient matrix; f never decreases.

#include "qbc4/core/random.hpp"
#include "qbc4/core/state.hpp"
#include "qbc4/core/tolerance.hpp"

#include <vector>

namespace qbc4 {

struct OverlapTerm {
  double weight = 1.0;
  Mat transition;  // contributes weight * |tr(U * transition)|^2
};

inline cplx trace_product(const Mat& u, const Mat& m) { return u.cwiseProduct(m.transpose()).sum(); }

inline double overlap_objective(const Mat& u, const std::vector<OverlapTerm>& terms) {
  double f = 0.0;
  for (const auto& t : terms) f += t.weight * std::norm(trace_product(u, t.transition));
  return f;
}

/// argmax over unitaries U of Re tr(U G): with G = W S V^dag, U = V W^dag.
inline Mat polar_maximizer(const Mat& g) {
  Eigen::BDCSVD<Mat> svd(g, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixV() * svd.matrixU().adjoint();
}

/// Sum of singular values of `m`: the maximum of |tr(U m)| over unitaries.
inline double nuclear_norm(const Mat& m) {
  Eigen::BDCSVD<Mat> svd(m);
  return svd.singularValues().sum();
}

struct SeesawRun {
  Mat unitary;
  double value = 0.0;
  std::vector<double> history;  // objective after each iterate, starting value first
  int iterations = 0;
  bool converged = false;
  bool monotone = true;
};

inline SeesawRun seesaw_ascent(const std::vector<OverlapTerm>& terms, const Mat& start, double tol,
                               int max_iterations) {
  SeesawRun run;
  run.unitary = start;
  run.value = overlap_objective(start, terms);
  run.history.push_back(run.value);
  const Index d = start.rows();
  for (int it = 0; it < max_iterations; ++it) {
    Mat g = Mat::Zero(d, d);
    for (const auto& t : terms) g += t.weight * std::conj(trace_product(run.unitary, t.transition)) * t.transition;
    Mat next = polar_maximizer(g);
    const double v = overlap_objective(next, terms);
    run.history.push_back(v);
    ++run.iterations;
    // allow for rounding in the objective, not for genuine decrease
    if (v < run.value - kDefaultTolerances.equality) run.monotone = false;
    const double gain = v - run.value;
    if (v >= run.value) {
      run.unitary = std::move(next);
      run.value = v;
    }
    if (gain < tol) {
      run.converged = true;
      break;
    }
  }
  return run;
}

// ---------------------------------------------------------------------------
// Independent check: gradient ascent on the exponential chart U exp(iH),
// with the gradient taken by central finite differences over the d^2 real
// coordinates of H. Shares nothing with the seesaw beyond the objective.

/// exp(iH) for Hermitian H.
inline Mat expi_hermitian(const Mat& h) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (h + h.adjoint()));
  const Eigen::VectorXcd phases = (cplx(0, 1) * es.eigenvalues().cast<cplx>()).array().exp();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

/// Orthonormal (Hilbert-Schmidt) basis of d x d Hermitian matrices.
inline std::vector<Mat> hermitian_basis(Index d) {
  std::vector<Mat> out;
  out.reserve(static_cast<std::size_t>(d * d));
  const double s = 1.0 / std::sqrt(2.0);
  for (Index j = 0; j < d; ++j) {
    Mat e = Mat::Zero(d, d);
    e(j, j) = 1.0;
    out.push_back(e);
  }
  for (Index j = 0; j < d; ++j)
    for (Index k = j + 1; k < d; ++k) {
      Mat sym = Mat::Zero(d, d);
      sym(j, k) = sym(k, j) = s;
      out.push_back(sym);
      Mat asym = Mat::Zero(d, d);
      asym(j, k) = cplx(0, -s);
      asym(k, j) = cplx(0, s);
      out.push_back(asym);
    }
  return out;
}

struct OracleOptions {
  int starts = 4;                  // first start is the identity
  int iterations_per_start = 4000;  // outer gradient steps per start
  double step = 1e-5;              // finite-difference step
  double gradient_tol = 1e-9;      // stop a start when the gradient norm falls below this
  std::uint64_t seed = 0;
};

struct OracleResult {
  double value = 0.0;
  bool budget_exhausted = false;
  int iterations = 0;
};

inline OracleResult oracle_optimize(const std::vector<OverlapTerm>& terms, Index d, const OracleOptions& opt) {
  OracleResult res;
  Rng rng(opt.seed);
  const auto basis = hermitian_basis(d);
  std::vector<Mat> plus, minus;
  plus.reserve(basis.size());
  minus.reserve(basis.size());
  for (const auto& g : basis) {
    plus.push_back(expi_hermitian(opt.step * g));
    minus.push_back(expi_hermitian(-opt.step * g));
  }
  bool first = true;
  res.value = -1.0;
  for (int s = 0; s < std::max(1, opt.starts); ++s) {
    Mat u = first ? Mat::Identity(d, d) : haar_matrix(d, rng);
    first = false;
    double f = overlap_objective(u, terms);
    double t = 1.0;
    bool converged = false;
    for (int it = 0; it < opt.iterations_per_start; ++it) {
      ++res.iterations;
      Eigen::VectorXd grad(static_cast<Index>(basis.size()));
      for (std::size_t k = 0; k < basis.size(); ++k)
        grad(static_cast<Index>(k)) =
            (overlap_objective(u * plus[k], terms) - overlap_objective(u * minus[k], terms)) / (2 * opt.step);
      const double gn2 = grad.squaredNorm();
      if (std::sqrt(gn2) < opt.gradient_tol) {
        converged = true;
        break;
      }
      Mat h = Mat::Zero(d, d);
      for (std::size_t k = 0; k < basis.size(); ++k) h += grad(static_cast<Index>(k)) * basis[k];
      // Armijo backtracking along the gradient, with step growth on success
      t = std::min(2.0 * t, 1e3);
      bool moved = false;
      while (t > 1e-14) {
        const Mat cand = u * expi_hermitian(t * h);
        const double fc = overlap_objective(cand, terms);
        if (fc >= f + 1e-4 * t * gn2) {
          u = cand;
          f = fc;
          moved = true;
          break;
        }
        t *= 0.5;
      }
      if (!moved) {
        converged = true;
        break;
      }
    }
    if (f > res.value) {
      res.value = f;
      res.budget_exhausted = !converged;
    }
  }
  if (opt.iterations_per_start == 0) res.budget_exhausted = true;
  return res;
}

}  // namespace qbc4
