#pragma once

#include <cstdint>
#include <vector>

#include "pspin/hamiltonian.hpp"

namespace pspin {

struct GroundStateOptions {
  int restarts = 10;
  int max_iters = 2000;
  /// Stop when |tangential gradient| <= tol * |gradient|.
  double tol = 1e-9;
  std::uint64_t seed = 1;
};

struct RestartResult {
  double energy_per_spin = 0;
  int iterations = 0;
  bool converged = false;
};

struct GroundStateResult {
  SpinConfiguration config;
  double energy_per_spin;
  /// True when the best restart met the tolerance.
  bool converged;
  std::vector<RestartResult> restarts;
};

/// Projected gradient ascent of H on the sphere with backtracking, best of
/// several uniformly random starts. Never throws on non-convergence; the
/// best iterate is returned with converged = false.
GroundStateResult ground_state_search(const DisorderTensor& j, const GroundStateOptions& opts = {});

}  // namespace pspin
