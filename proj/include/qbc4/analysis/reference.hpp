#pragma once

// Recorded binding value for the mub2 ensemble. Regenerate with
//   qbc4 bind --ensemble mub2 --seed 20261015 --restarts 32
// and update both constants together.

#include <cstdint>

namespace qbc4::reference {

inline constexpr std::uint64_t kMub2Seed = 20261015;
inline constexpr int kMub2Restarts = 32;
inline constexpr double kMub2PA = 1.0;

}  // namespace qbc4::reference
