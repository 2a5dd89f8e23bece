#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "pspin/hamiltonian.hpp"

namespace pspin {

struct CovarianceRow {
  double overlap = 0;
  /// N R^p.
  double target = 0;
  double mean = 0;
  double std_error = 0;
  double z = 0;
};

/// Empirical E[H(sigma)H(sigma')] over fresh disorder draws against N R^p.
std::vector<CovarianceRow> covariance_check(int n, int p,
                                            const std::vector<std::pair<SpinConfiguration, SpinConfiguration>>& pairs,
                                            std::size_t draws, std::uint64_t seed);

}  // namespace pspin
