#pragma once

#include "qbc4/core/state.hpp"

#include <cstdint>
#include <random>

namespace qbc4 {

using Rng = std::mt19937_64;

/// Independent child seed for stream `stream` of `seed` (splitmix64 finalizer).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline Vec gaussian_vector(Index n, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vec v(n);
  for (Index i = 0; i < n; ++i) {
    const double re = g(rng);
    const double im = g(rng);
    v(i) = cplx(re, im);
  }
  return v;
}

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the phases of
/// R's diagonal moved into Q.
inline Mat haar_matrix(Index dim, Rng& rng) {
  if (dim < 1) throw std::invalid_argument("Haar unitary dimension must be >= 1");
  Mat z(dim, dim);
  for (Index j = 0; j < dim; ++j) z.col(j) = gaussian_vector(dim, rng) / std::sqrt(2.0);
  Eigen::HouseholderQR<Mat> qr(z);
  Mat q = qr.householderQ();
  const Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < dim; ++j) {
    const cplx d = r(j, j);
    q.col(j) *= std::abs(d) > 0 ? d / std::abs(d) : cplx(1.0);
  }
  return q;
}

inline UnitaryOp haar_unitary(const HilbertRegistry& support, std::uint64_t seed) {
  Rng rng(seed);
  return UnitaryOp(support, haar_matrix(support.total_dim(), rng));
}

/// Columns of a Haar unitary as states on `registry`.
inline std::vector<PureState> random_orthobasis(const HilbertRegistry& registry, std::uint64_t seed) {
  Rng rng(seed);
  const Mat u = haar_matrix(registry.total_dim(), rng);
  std::vector<PureState> out;
  out.reserve(static_cast<std::size_t>(u.cols()));
  for (Index j = 0; j < u.cols(); ++j) out.emplace_back(registry, Vec(u.col(j)));
  return out;
}

inline PureState random_pure_state(const HilbertRegistry& registry, Rng& rng) {
  return PureState::normalized(registry, gaussian_vector(registry.total_dim(), rng));
}

/// Random mixed state of the given rank (Wishart construction).
inline DensityOperator random_density(const HilbertRegistry& registry, Rng& rng, Index rank = 0) {
  const Index d = registry.total_dim();
  if (rank <= 0) rank = d;
  Mat g(d, rank);
  for (Index j = 0; j < rank; ++j) g.col(j) = gaussian_vector(d, rng);
  Mat rho = g * g.adjoint();
  rho /= rho.trace().real();
  return DensityOperator(registry, 0.5 * (rho + rho.adjoint()));
}

}  // namespace qbc4
