#pragma once

// Replica-exchange Metropolis sampling of the Gibbs measure exp(beta H) on
// the sphere, thermodynamic integration, and the replica overlap probe.

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "pspin/hamiltonian.hpp"

namespace pspin {

struct TemperingOptions {
  /// Metropolis proposals per rung per sweep; 0 means N.
  std::size_t steps_per_sweep = 0;
  double initial_delta = 0.5;
  double max_delta = 10.0;
  /// Burn-in tunes delta toward this acceptance window; sampling never does.
  bool adapt = true;
  double target_low = 0.3;
  double target_high = 0.5;
  /// Sweeps between rounds of adjacent swap proposals; 0 disables swaps.
  std::size_t swap_interval = 1;
  /// Number of batches for batch-means standard errors.
  std::size_t batches = 20;
  /// Worker threads for advancing rungs between swap barriers.
  unsigned threads = 1;
};

struct RungStatistics {
  double beta = 0;
  std::size_t samples = 0;
  double mean_energy_per_spin = 0;
  double stderr_energy_per_spin = 0;
  double acceptance_rate = 0;
  /// Acceptance of swaps with the next rung up; nan for the top rung.
  double swap_acceptance_rate = 0;
  double delta = 0;
};

class TemperingEnsemble {
public:
  TemperingEnsemble(std::shared_ptr<const DisorderTensor> disorder, std::vector<double> ladder, std::uint64_t seed,
                    TemperingOptions opts = {});

  /// One Metropolis proposal at `rung`; returns whether it was accepted.
  bool mcmc_step(std::size_t rung);

  /// Sweeps that tune proposal scales and discard statistics.
  void burn_in(std::size_t sweeps);

  /// Recorded sweeps: Metropolis on every rung, then adjacent swaps.
  std::vector<RungStatistics> tempering_sweep(std::size_t sweeps);

  /// A single recorded sweep without building the statistics.
  void sweep_once();

  std::vector<RungStatistics> statistics() const;

  /// Metropolis test for exchanging the configurations of rungs i and i+1.
  bool attempt_swap(std::size_t rung);

  const std::vector<double>& ladder() const { return ladder_; }
  const DisorderTensor& disorder() const { return *disorder_; }
  std::shared_ptr<const DisorderTensor> disorder_ptr() const { return disorder_; }
  const TemperingOptions& options() const { return opts_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t rungs() const { return chains_.size(); }

  const SpinConfiguration& configuration(std::size_t rung) const { return chains_.at(rung).sigma; }
  double energy(std::size_t rung) const { return chains_.at(rung).energy; }
  double delta(std::size_t rung) const { return chains_.at(rung).delta; }
  void set_delta(std::size_t rung, double delta);

  /// Per-sweep H/N samples recorded at a rung.
  const std::vector<double>& energy_trace(std::size_t rung) const { return chains_.at(rung).trace; }

private:
  struct Chain {
    double beta;
    SpinConfiguration sigma;
    double energy;
    Engine rng;
    double delta;
    std::size_t accepted = 0;
    std::size_t proposed = 0;
    std::size_t window_accepted = 0;
    std::size_t window_proposed = 0;
    std::size_t swaps_accepted = 0;
    std::size_t swaps_proposed = 0;
    std::vector<double> trace;
  };

  void advance_all(std::size_t steps, bool tune, bool record);
  void advance_chain(Chain& c, std::size_t steps, bool tune, bool record);
  bool step_chain(Chain& c);
  void swap_round();

  std::shared_ptr<const DisorderTensor> disorder_;
  std::vector<double> ladder_;
  std::uint64_t seed_;
  TemperingOptions opts_;
  std::vector<Chain> chains_;
  Engine swap_rng_;
  std::size_t sweeps_done_ = 0;
};

/// Increasing ladder from 0 to beta_max: linear spacing plus extra rungs
/// geometrically concentrated around beta_c when it lies inside.
std::vector<double> make_ladder(double beta_max, std::size_t rungs, std::optional<double> beta_c = std::nullopt);

struct ThermoPoint {
  double beta = 0;
  double free_energy = 0;
  double std_error = 0;
  /// Some rung up to this beta accepted fewer than 1% of proposals.
  bool unequilibrated = false;
};

/// Cumulative trapezoid of mean H/N over the ladder, which must start at 0.
std::vector<ThermoPoint> thermo_integration(const TemperingEnsemble& ensemble);

struct ProbeOptions {
  std::size_t burn_in = 200;
  std::size_t bins = 40;
  /// Explicit per-replica seeds; default splits the ensemble seed.
  std::vector<std::uint64_t> replica_seeds;
  std::optional<double> target_q;
  double epsilon = 0.15;
  unsigned threads = 1;
};

struct OverlapHistogram {
  std::vector<double> bin_edges;
  std::vector<std::uint64_t> counts;
  std::size_t k = 0;
  std::uint64_t pair_count = 0;
  std::size_t modal_bin = 0;
  double modal_overlap = 0;
  /// Mode of |R| on the folded histogram (bin centre).
  double modal_abs_overlap = 0;
  /// Fraction of pairs with |R - target| < epsilon (target_q set).
  std::optional<double> mass_near_target;
  /// Fraction of pairs with |R| > 0.3.
  double mass_outside_03 = 0;
  /// Centre of the fullest bin among those with |centre| > 0.3 (nan if empty).
  double high_overlap_peak = 0;
  bool degenerate = false;
  bool unequilibrated = false;
  std::vector<double> replica_acceptance;
  std::vector<double> replica_mean_energy;
};

/// k independent replica ensembles sharing the disorder and ladder of
/// `ensemble`; records R(sigma^i, sigma^j) at rung beta_index every sweep.
OverlapHistogram overlap_probe(const TemperingEnsemble& ensemble, std::size_t k, std::size_t beta_index,
                               std::size_t sweeps, const ProbeOptions& opts = {});

}  // namespace pspin
