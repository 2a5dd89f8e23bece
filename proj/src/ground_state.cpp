#include "pspin/ground_state.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace pspin {

namespace {

struct Ascent {
  Eigen::VectorXd sigma;
  double energy;
  RestartResult summary;
};

Ascent ascend(const DisorderTensor& j, Eigen::VectorXd sigma, const GroundStateOptions& opts) {
  const double n = static_cast<double>(j.n());
  const double radius = std::sqrt(n);
  auto [energy, grad] = energy_and_gradient(j, sigma);
  double step = 0.1 / j.p();
  RestartResult summary;
  for (int it = 0; it < opts.max_iters; ++it) {
    summary.iterations = it;
    const Eigen::VectorXd tangent = grad - (grad.dot(sigma) / n) * sigma;
    const double gnorm = grad.norm();
    if (gnorm == 0.0 || tangent.norm() <= opts.tol * gnorm) {
      summary.converged = true;
      break;
    }
    bool moved = false;
    while (step > 1e-16) {
      Eigen::VectorXd trial = sigma + step * tangent;
      trial *= radius / trial.norm();
      const double trial_energy = hamiltonian(j, trial);
      if (trial_energy > energy) {
        sigma = std::move(trial);
        moved = true;
        step *= 1.5;
        break;
      }
      step *= 0.5;
    }
    if (!moved) {
      // No ascent direction left at machine precision.
      summary.converged = true;
      break;
    }
    auto eg = energy_and_gradient(j, sigma);
    energy = eg.energy;
    grad = std::move(eg.grad);
    summary.iterations = it + 1;
  }
  summary.energy_per_spin = energy / n;
  return {std::move(sigma), energy, summary};
}

}  // namespace

GroundStateResult ground_state_search(const DisorderTensor& j, const GroundStateOptions& opts) {
  if (opts.restarts < 1) throw std::invalid_argument("ground_state_search: restarts must be >= 1");
  if (opts.max_iters < 0) throw std::invalid_argument("ground_state_search: max_iters must be >= 0");
  std::vector<RestartResult> restarts;
  Eigen::VectorXd best_sigma;
  double best_energy = -std::numeric_limits<double>::infinity();
  bool best_converged = false;
  for (int r = 0; r < opts.restarts; ++r) {
    Engine rng = make_stream(opts.seed, static_cast<std::uint64_t>(r));
    const SpinConfiguration start = SpinConfiguration::uniform(j.n(), rng);
    Ascent a = ascend(j, start.coords(), opts);
    restarts.push_back(a.summary);
    if (a.energy > best_energy) {
      best_energy = a.energy;
      best_sigma = std::move(a.sigma);
      best_converged = a.summary.converged;
    }
  }
  SpinConfiguration best(best_sigma);
  return {best, best_energy / j.n(), best_converged, std::move(restarts)};
}

}  // namespace pspin
