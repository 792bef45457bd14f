#pragma once

#include "qbc4/core/registry.hpp"
#include "qbc4/core/tolerance.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <utility>
#include <vector>

namespace qbc4 {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;
using RowMajorMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline Vec kron(const Vec& a, const Vec& b) {
  Vec out(a.size() * b.size());
  for (Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

/// Normalized amplitude vector over a registry.
class PureState {
 public:
  PureState(HilbertRegistry registry, Vec amplitudes, const Tolerances& tol = kDefaultTolerances)
      : registry_(std::move(registry)), amps_(std::move(amplitudes)) {
    if (amps_.size() != registry_.total_dim())
      throw std::invalid_argument("amplitude vector length does not match registry dimension");
    if (std::abs(amps_.norm() - 1.0) > tol.structural)
      throw std::invalid_argument("pure state is not normalized");
  }

  /// Rescales `amplitudes` to unit norm; rejects the zero vector.
  static PureState normalized(HilbertRegistry registry, Vec amplitudes) {
    const double n = amplitudes.norm();
    if (n == 0.0) throw std::invalid_argument("cannot normalize the zero vector");
    return PureState(std::move(registry), amplitudes / n);
  }

  static PureState basis(HilbertRegistry registry, Index index) {
    Vec v = Vec::Zero(registry.total_dim());
    if (index < 0 || index >= v.size()) throw std::out_of_range("basis index out of range");
    v(index) = 1.0;
    return PureState(std::move(registry), std::move(v));
  }

  const HilbertRegistry& registry() const { return registry_; }
  const Vec& amplitudes() const { return amps_; }
  Index dim() const { return amps_.size(); }

  /// Same amplitudes under new factor labels with identical dimensions.
  PureState relabeled(HilbertRegistry registry) const {
    if (registry.size() != registry_.size())
      throw std::invalid_argument("relabel must keep the factor count");
    for (std::size_t i = 0; i < registry.size(); ++i)
      if (registry.factors()[i].dim != registry_.factors()[i].dim)
        throw std::invalid_argument("relabel must keep factor dimensions");
    return PureState(std::move(registry), amps_);
  }

 private:
  HilbertRegistry registry_;
  Vec amps_;
};

struct DensityCheck {
  double hermiticity_error = 0.0;
  double trace_error = 0.0;
  double min_eigenvalue = 0.0;
  bool ok(const Tolerances& tol = kDefaultTolerances) const {
    return hermiticity_error <= tol.equality && trace_error <= tol.equality &&
           min_eigenvalue >= -tol.equality;
  }
};

/// Hermitian, positive semidefinite, unit-trace operator over a registry.
class DensityOperator {
 public:
  DensityOperator(HilbertRegistry registry, Mat matrix, const Tolerances& tol = kDefaultTolerances)
      : registry_(std::move(registry)), mat_(std::move(matrix)) {
    const Index d = registry_.total_dim();
    if (mat_.rows() != d || mat_.cols() != d)
      throw std::invalid_argument("density matrix shape does not match registry dimension");
    if (std::abs(mat_.trace() - cplx(1.0)) > tol.structural)
      throw std::invalid_argument("density matrix does not have unit trace");
    if ((mat_ - mat_.adjoint()).cwiseAbs().maxCoeff() > tol.structural)
      throw std::invalid_argument("density matrix is not Hermitian");
  }

  static DensityOperator from_pure(const PureState& s) {
    return DensityOperator(s.registry(), s.amplitudes() * s.amplitudes().adjoint());
  }

  static DensityOperator maximally_mixed(HilbertRegistry registry) {
    const Index d = registry.total_dim();
    return DensityOperator(std::move(registry), Mat::Identity(d, d) / static_cast<double>(d));
  }

  const HilbertRegistry& registry() const { return registry_; }
  const Mat& matrix() const { return mat_; }
  Index dim() const { return mat_.rows(); }

  double purity() const { return (mat_ * mat_).trace().real(); }

  DensityCheck check() const {
    DensityCheck c;
    c.hermiticity_error = (mat_ - mat_.adjoint()).cwiseAbs().maxCoeff();
    c.trace_error = std::abs(mat_.trace() - cplx(1.0));
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (mat_ + mat_.adjoint()), Eigen::EigenvaluesOnly);
    c.min_eigenvalue = es.eigenvalues().minCoeff();
    return c;
  }

 private:
  HilbertRegistry registry_;
  Mat mat_;
};

/// Unitary acting on the factors listed in `support` (with their dimensions).
class UnitaryOp {
 public:
  UnitaryOp(HilbertRegistry support, Mat matrix, const Tolerances& tol = kDefaultTolerances)
      : support_(std::move(support)), mat_(std::move(matrix)) {
    const Index d = support_.total_dim();
    if (support_.empty()) throw std::invalid_argument("unitary needs a nonempty support");
    if (mat_.rows() != d || mat_.cols() != d)
      throw std::invalid_argument("unitary shape does not match support dimension");
    if ((mat_.adjoint() * mat_ - Mat::Identity(d, d)).cwiseAbs().maxCoeff() > tol.structural)
      throw std::invalid_argument("matrix is not unitary");
  }

  static UnitaryOp identity(HilbertRegistry support) {
    const Index d = support.total_dim();
    return UnitaryOp(std::move(support), Mat::Identity(d, d));
  }

  const HilbertRegistry& support() const { return support_; }
  const Mat& matrix() const { return mat_; }

  UnitaryOp adjoint() const { return UnitaryOp(support_, mat_.adjoint()); }

 private:
  HilbertRegistry support_;
  Mat mat_;
};

// ---------------------------------------------------------------------------
// tensor products

inline PureState tensor(const PureState& a, const PureState& b) {
  return PureState(a.registry().concat(b.registry()), kron(a.amplitudes(), b.amplitudes()));
}

inline PureState tensor(const std::vector<PureState>& parts) {
  if (parts.empty()) throw std::invalid_argument("tensor of an empty list");
  PureState out = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) out = tensor(out, parts[i]);
  return out;
}

inline DensityOperator tensor(const DensityOperator& a, const DensityOperator& b) {
  return DensityOperator(a.registry().concat(b.registry()), kron(a.matrix(), b.matrix()));
}

inline UnitaryOp tensor(const UnitaryOp& a, const UnitaryOp& b) {
  return UnitaryOp(a.support().concat(b.support()), kron(a.matrix(), b.matrix()));
}

// ---------------------------------------------------------------------------
// reordering

/// Same physical state with its factors listed in `order`.
inline PureState permute(const PureState& s, const std::vector<SubsystemId>& order) {
  HilbertRegistry target = s.registry().reordered(order);
  const auto map = detail::reindex_map(s.registry(), target);
  Vec out(s.dim());
  for (Index k = 0; k < s.dim(); ++k) out(map[static_cast<std::size_t>(k)]) = s.amplitudes()(k);
  return PureState(std::move(target), std::move(out));
}

inline DensityOperator permute(const DensityOperator& rho, const std::vector<SubsystemId>& order) {
  HilbertRegistry target = rho.registry().reordered(order);
  const auto map = detail::reindex_map(rho.registry(), target);
  const Index d = rho.dim();
  Mat out(d, d);
  for (Index j = 0; j < d; ++j)
    for (Index i = 0; i < d; ++i)
      out(map[static_cast<std::size_t>(i)], map[static_cast<std::size_t>(j)]) = rho.matrix()(i, j);
  return DensityOperator(std::move(target), std::move(out));
}

namespace detail {

inline std::vector<SubsystemId> exchanged_order(const HilbertRegistry& reg, const SubsystemId& a,
                                                const SubsystemId& b) {
  if (reg.dim_of(a) != reg.dim_of(b))
    throw std::invalid_argument("cannot exchange factors of different dimension");
  auto order = reg.ids();
  for (auto& id : order) {
    if (id == a) id = b;
    else if (id == b) id = a;
  }
  return order;
}

}  // namespace detail

/// Physically exchanges the contents of factors `a` and `b`, keeping the
/// registry labels in place. This is the wire switch.
inline PureState exchange(const PureState& s, const SubsystemId& a, const SubsystemId& b) {
  return permute(s, detail::exchanged_order(s.registry(), a, b)).relabeled(s.registry());
}

inline DensityOperator exchange(const DensityOperator& rho, const SubsystemId& a,
                                const SubsystemId& b) {
  DensityOperator p = permute(rho, detail::exchanged_order(rho.registry(), a, b));
  return DensityOperator(rho.registry(), p.matrix());
}

// ---------------------------------------------------------------------------
// unitary action

namespace detail {

/// Registry order with `front` factors first (in the given order), the rest after.
inline std::vector<SubsystemId> front_order(const HilbertRegistry& reg,
                                            const std::vector<SubsystemId>& front) {
  std::vector<SubsystemId> order = front;
  for (const auto& id : reg.ids())
    if (std::find(front.begin(), front.end(), id) == front.end()) order.push_back(id);
  return order;
}

}  // namespace detail

inline PureState apply(const UnitaryOp& u, const PureState& s) {
  for (const auto& f : u.support().factors())
    if (!s.registry().contains(f.id) || s.registry().dim_of(f.id) != f.dim)
      throw std::invalid_argument("unitary support not in state registry: " + f.id.label());
  const auto front = u.support().ids();
  PureState moved = permute(s, detail::front_order(s.registry(), front));
  const Index ds = u.support().total_dim();
  const Index dr = s.dim() / ds;
  Eigen::Map<const RowMajorMat> block(moved.amplitudes().data(), ds, dr);
  RowMajorMat out = u.matrix() * block;
  Vec flat = Eigen::Map<const Vec>(out.data(), out.size());
  return permute(PureState(moved.registry(), std::move(flat)), s.registry().ids());
}

inline DensityOperator apply(const UnitaryOp& u, const DensityOperator& rho) {
  for (const auto& f : u.support().factors())
    if (!rho.registry().contains(f.id) || rho.registry().dim_of(f.id) != f.dim)
      throw std::invalid_argument("unitary support not in operator registry: " + f.id.label());
  DensityOperator moved = permute(rho, detail::front_order(rho.registry(), u.support().ids()));
  const Index dr = rho.dim() / u.support().total_dim();
  const Mat full = kron(u.matrix(), Mat::Identity(dr, dr));
  DensityOperator evolved(moved.registry(), full * moved.matrix() * full.adjoint());
  return permute(evolved, rho.registry().ids());
}

// ---------------------------------------------------------------------------
// reduced states

inline DensityOperator partial_trace(const PureState& s, const std::vector<SubsystemId>& keep) {
  if (keep.empty()) throw std::invalid_argument("partial trace must keep at least one factor");
  HilbertRegistry kept = s.registry().subset(keep);
  PureState moved = permute(s, detail::front_order(s.registry(), kept.ids()));
  const Index dk = kept.total_dim();
  const Index dr = s.dim() / dk;
  Eigen::Map<const RowMajorMat> psi(moved.amplitudes().data(), dk, dr);
  Mat rho = psi * psi.adjoint();
  return DensityOperator(std::move(kept), 0.5 * (rho + rho.adjoint()));
}

inline DensityOperator partial_trace(const DensityOperator& rho,
                                     const std::vector<SubsystemId>& keep) {
  if (keep.empty()) throw std::invalid_argument("partial trace must keep at least one factor");
  HilbertRegistry kept = rho.registry().subset(keep);
  DensityOperator moved = permute(rho, detail::front_order(rho.registry(), kept.ids()));
  const Index dk = kept.total_dim();
  const Index dr = rho.dim() / dk;
  Mat out = Mat::Zero(dk, dk);
  for (Index i = 0; i < dk; ++i)
    for (Index j = 0; j < dk; ++j)
      for (Index r = 0; r < dr; ++r) out(i, j) += moved.matrix()(i * dr + r, j * dr + r);
  return DensityOperator(std::move(kept), std::move(out));
}

// ---------------------------------------------------------------------------
// distances and overlaps

inline double trace_distance(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("trace distance between operators of different dimension");
  const Mat diff = a - b;
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (diff + diff.adjoint()), Eigen::EigenvaluesOnly);
  return std::min(1.0, 0.5 * es.eigenvalues().cwiseAbs().sum());
}

inline double trace_distance(const DensityOperator& rho, const DensityOperator& sigma) {
  if (!(rho.registry() == sigma.registry()))
    throw std::invalid_argument("trace distance between operators on different registries");
  return trace_distance(rho.matrix(), sigma.matrix());
}

inline cplx overlap(const PureState& a, const PureState& b) {
  if (!(a.registry() == b.registry()))
    throw std::invalid_argument("overlap between states on different registries");
  return a.amplitudes().dot(b.amplitudes());  // conjugates the left argument
}

// ---------------------------------------------------------------------------
// Schmidt decomposition

struct SchmidtDecomposition {
  std::vector<double> coefficients;  // descending, nonzero only
  std::vector<PureState> left;       // on the cut factors
  std::vector<PureState> right;      // on the remaining factors
};

/// Schmidt form across `cut | rest`. Coefficients below `tol.structural`
/// are dropped.
inline SchmidtDecomposition schmidt(const PureState& s, const std::vector<SubsystemId>& cut,
                                    const Tolerances& tol = kDefaultTolerances) {
  HilbertRegistry left_reg = s.registry().subset(cut);
  if (left_reg.empty() || left_reg.size() == s.registry().size())
    throw std::invalid_argument("Schmidt cut must be a nonempty proper subset");
  HilbertRegistry right_reg = s.registry().complement(left_reg.ids());
  PureState moved = permute(s, left_reg.concat(right_reg).ids());
  const Index dl = left_reg.total_dim();
  const Index dr = right_reg.total_dim();
  Eigen::Map<const RowMajorMat> psi(moved.amplitudes().data(), dl, dr);
  Eigen::JacobiSVD<Mat> svd(Mat(psi), Eigen::ComputeThinU | Eigen::ComputeThinV);
  SchmidtDecomposition out;
  for (Index m = 0; m < svd.singularValues().size(); ++m) {
    const double c = svd.singularValues()(m);
    if (c <= tol.structural) break;
    out.coefficients.push_back(c);
    out.left.emplace_back(left_reg, Vec(svd.matrixU().col(m)));
    out.right.emplace_back(right_reg, Vec(svd.matrixV().col(m).conjugate()));
  }
  return out;
}

}  // namespace qbc4
