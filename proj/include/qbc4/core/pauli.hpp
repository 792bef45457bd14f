#pragma once

#include "qbc4/core/state.hpp"

#include <array>

namespace qbc4 {

/// I, sigma_x, -i sigma_y, sigma_z in the z basis (|1> -> index 0, |2> -> index 1).
/// All four are real matrices.
inline std::array<Eigen::Matrix2cd, 4> pauli_matrices() {
  Eigen::Matrix2cd id, x, iy, z;
  id << 1, 0, 0, 1;
  x << 0, 1, 1, 0;
  iy << 0, -1, 1, 0;  // -i * [[0, -i], [i, 0]]
  z << 1, 0, 0, -1;
  return {id, x, iy, z};
}

inline std::array<UnitaryOp, 4> pauli_set(const SubsystemId& qubit) {
  const auto m = pauli_matrices();
  HilbertRegistry support{{qubit, 2}};
  return {UnitaryOp(support, m[0]), UnitaryOp(support, m[1]), UnitaryOp(support, m[2]),
          UnitaryOp(support, m[3])};
}

/// (1/4) sum_i V_i rho V_i^dag on a single qubit.
inline Eigen::Matrix2cd pauli_twirl(const Eigen::Matrix2cd& rho) {
  Eigen::Matrix2cd out = Eigen::Matrix2cd::Zero();
  for (const auto& v : pauli_matrices()) out += v * rho * v.adjoint();
  return out / 4.0;
}

/// sum_i |e_i><e_i| (x) V_i on control (dim 4) then target (dim 2).
inline UnitaryOp controlled_pauli(const SubsystemId& control, const SubsystemId& target) {
  const auto m = pauli_matrices();
  Mat u = Mat::Zero(8, 8);
  for (Index i = 0; i < 4; ++i) u.block(2 * i, 2 * i, 2, 2) = m[static_cast<std::size_t>(i)];
  return UnitaryOp(HilbertRegistry{{control, 4}, {target, 2}}, u);
}

}  // namespace qbc4
