#include "pspin/tempering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace pspin {

namespace {

constexpr std::size_t kTuneWindow = 50;

double batch_means_stderr(const std::vector<double>& xs, std::size_t batches) {
  const std::size_t b = std::min(batches, xs.size());
  if (b < 2) return std::numeric_limits<double>::quiet_NaN();
  const std::size_t len = xs.size() / b;
  std::vector<double> means(b);
  for (std::size_t i = 0; i < b; ++i) {
    const auto first = xs.begin() + static_cast<std::ptrdiff_t>(i * len);
    means[i] = std::accumulate(first, first + static_cast<std::ptrdiff_t>(len), 0.0) / static_cast<double>(len);
  }
  const double m = std::accumulate(means.begin(), means.end(), 0.0) / static_cast<double>(b);
  double ss = 0.0;
  for (double x : means) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(b - 1) / static_cast<double>(b));
}

template <typename F>
void parallel_for(std::size_t count, unsigned threads, F&& body) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::jthread> pool;
  for (unsigned t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < count; i += threads) body(i);
    });
}

}  // namespace

TemperingEnsemble::TemperingEnsemble(std::shared_ptr<const DisorderTensor> disorder, std::vector<double> ladder,
                                     std::uint64_t seed, TemperingOptions opts)
    : disorder_(std::move(disorder)),
      ladder_(std::move(ladder)),
      seed_(seed),
      opts_(opts),
      swap_rng_(make_stream(seed, 0)) {
  if (!disorder_) throw std::invalid_argument("TemperingEnsemble: disorder is null");
  if (ladder_.empty()) throw std::invalid_argument("TemperingEnsemble: ladder is empty");
  for (std::size_t i = 0; i < ladder_.size(); ++i) {
    if (!(ladder_[i] >= 0.0)) throw std::invalid_argument("TemperingEnsemble: betas must be >= 0");
    if (i > 0 && !(ladder_[i] > ladder_[i - 1]))
      throw std::invalid_argument("TemperingEnsemble: ladder must be strictly increasing");
  }
  if (!(opts_.initial_delta > 0.0)) throw std::invalid_argument("TemperingEnsemble: initial_delta must be > 0");
  if (opts_.steps_per_sweep == 0) opts_.steps_per_sweep = static_cast<std::size_t>(disorder_->n());
  chains_.reserve(ladder_.size());
  for (std::size_t r = 0; r < ladder_.size(); ++r) {
    Engine rng = make_stream(seed, r + 1);
    SpinConfiguration sigma = SpinConfiguration::uniform(disorder_->n(), rng);
    const double e = hamiltonian(*disorder_, sigma);
    chains_.push_back(Chain{ladder_[r], std::move(sigma), e, std::move(rng), opts_.initial_delta, 0, 0, 0, 0, 0, 0, {}});
  }
}

void TemperingEnsemble::set_delta(std::size_t rung, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("set_delta: delta must be > 0");
  chains_.at(rung).delta = delta;
}

bool TemperingEnsemble::step_chain(Chain& c) {
  std::normal_distribution<double> normal;
  const Eigen::Index n = c.sigma.n();
  Eigen::VectorXd proposal(n);
  for (Eigen::Index i = 0; i < n; ++i) proposal[i] = c.sigma.coords()[i] + c.delta * normal(c.rng);
  SpinConfiguration next(proposal);
  const double e = hamiltonian(*disorder_, next);
  const double log_ratio = c.beta * (e - c.energy);
  // Always draw the uniform so the stream advances identically.
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(c.rng);
  const bool accept = log_ratio >= 0.0 || u < std::exp(log_ratio);
  ++c.proposed;
  ++c.window_proposed;
  if (accept) {
    c.sigma = std::move(next);
    c.energy = e;
    ++c.accepted;
    ++c.window_accepted;
  }
  return accept;
}

bool TemperingEnsemble::mcmc_step(std::size_t rung) { return step_chain(chains_.at(rung)); }

void TemperingEnsemble::advance_chain(Chain& c, std::size_t steps, bool tune, bool record) {
  for (std::size_t s = 0; s < steps; ++s) {
    step_chain(c);
    if (tune && c.window_proposed >= kTuneWindow) {
      const double rate = static_cast<double>(c.window_accepted) / static_cast<double>(c.window_proposed);
      if (rate > opts_.target_high)
        c.delta = std::min(c.delta * 1.25, opts_.max_delta);
      else if (rate < opts_.target_low)
        c.delta /= 1.25;
      c.window_accepted = c.window_proposed = 0;
    }
  }
  if (record) c.trace.push_back(c.energy / disorder_->n());
}

void TemperingEnsemble::advance_all(std::size_t steps, bool tune, bool record) {
  parallel_for(chains_.size(), opts_.threads, [&](std::size_t r) { advance_chain(chains_[r], steps, tune, record); });
}

bool TemperingEnsemble::attempt_swap(std::size_t rung) {
  if (rung + 1 >= chains_.size()) throw std::out_of_range("attempt_swap: rung has no upper neighbour");
  Chain& a = chains_[rung];
  Chain& b = chains_[rung + 1];
  const double log_ratio = (a.beta - b.beta) * (b.energy - a.energy);
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(swap_rng_);
  const bool accept = log_ratio >= 0.0 || u < std::exp(log_ratio);
  ++a.swaps_proposed;
  if (accept) {
    std::swap(a.sigma, b.sigma);
    std::swap(a.energy, b.energy);
    ++a.swaps_accepted;
  }
  return accept;
}

void TemperingEnsemble::swap_round() {
  for (std::size_t r = sweeps_done_ % 2; r + 1 < chains_.size(); r += 2) attempt_swap(r);
}

void TemperingEnsemble::burn_in(std::size_t sweeps) {
  for (std::size_t s = 0; s < sweeps; ++s) {
    advance_all(opts_.steps_per_sweep, opts_.adapt, false);
    if (opts_.swap_interval > 0 && sweeps_done_ % opts_.swap_interval == 0) swap_round();
    ++sweeps_done_;
  }
  for (Chain& c : chains_) {
    c.accepted = c.proposed = c.window_accepted = c.window_proposed = 0;
    c.swaps_accepted = c.swaps_proposed = 0;
  }
}

void TemperingEnsemble::sweep_once() {
  advance_all(opts_.steps_per_sweep, false, true);
  if (opts_.swap_interval > 0 && sweeps_done_ % opts_.swap_interval == 0) swap_round();
  ++sweeps_done_;
}

std::vector<RungStatistics> TemperingEnsemble::tempering_sweep(std::size_t sweeps) {
  if (sweeps < 1) throw std::invalid_argument("tempering_sweep: sweeps must be >= 1");
  for (std::size_t s = 0; s < sweeps; ++s) sweep_once();
  return statistics();
}

std::vector<RungStatistics> TemperingEnsemble::statistics() const {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<RungStatistics> out;
  out.reserve(chains_.size());
  for (std::size_t r = 0; r < chains_.size(); ++r) {
    const Chain& c = chains_[r];
    RungStatistics s;
    s.beta = c.beta;
    s.samples = c.trace.size();
    s.mean_energy_per_spin =
        c.trace.empty() ? nan : std::accumulate(c.trace.begin(), c.trace.end(), 0.0) / static_cast<double>(c.trace.size());
    s.stderr_energy_per_spin = batch_means_stderr(c.trace, opts_.batches);
    s.acceptance_rate = c.proposed ? static_cast<double>(c.accepted) / static_cast<double>(c.proposed) : nan;
    s.swap_acceptance_rate =
        c.swaps_proposed ? static_cast<double>(c.swaps_accepted) / static_cast<double>(c.swaps_proposed) : nan;
    s.delta = c.delta;
    out.push_back(s);
  }
  return out;
}

std::vector<double> make_ladder(double beta_max, std::size_t rungs, std::optional<double> beta_c) {
  if (!(beta_max > 0.0)) throw std::invalid_argument("make_ladder: beta_max must be > 0");
  if (rungs < 2) throw std::invalid_argument("make_ladder: need at least 2 rungs");
  std::vector<double> ladder;
  for (std::size_t i = 0; i < rungs; ++i)
    ladder.push_back(beta_max * static_cast<double>(i) / static_cast<double>(rungs - 1));
  if (beta_c && *beta_c > 0.0 && *beta_c < beta_max) {
    const double spacing = beta_max / static_cast<double>(rungs - 1);
    ladder.push_back(*beta_c);
    for (double f : {0.5, 0.25, 0.125}) {
      ladder.push_back(*beta_c - f * spacing);
      ladder.push_back(*beta_c + f * spacing);
    }
  }
  std::sort(ladder.begin(), ladder.end());
  std::vector<double> out;
  for (double b : ladder)
    if (b >= 0.0 && b <= beta_max && (out.empty() || b - out.back() > 1e-9 * beta_max)) out.push_back(b);
  out.back() = beta_max;
  return out;
}

std::vector<ThermoPoint> thermo_integration(const TemperingEnsemble& ensemble) {
  const auto stats = ensemble.statistics();
  if (stats.front().beta != 0.0) throw std::invalid_argument("thermo_integration: ladder must start at beta = 0");
  for (const auto& s : stats)
    if (s.samples == 0) throw std::invalid_argument("thermo_integration: no recorded sweeps");
  std::vector<ThermoPoint> out;
  out.push_back({0.0, 0.0, 0.0, !(stats[0].acceptance_rate >= 0.01)});
  // Variance of the cumulative trapezoid: rung j carries weight
  // (b_{j+1} - b_{j-1})/2 in the interior and half a gap at the ends.
  std::vector<double> weight(stats.size(), 0.0);
  double f = 0.0;
  bool flagged = out[0].unequilibrated;
  for (std::size_t i = 1; i < stats.size(); ++i) {
    const double h = stats[i].beta - stats[i - 1].beta;
    f += 0.5 * h * (stats[i - 1].mean_energy_per_spin + stats[i].mean_energy_per_spin);
    weight[i - 1] += 0.5 * h;
    weight[i] += 0.5 * h;
    double var = 0.0;
    for (std::size_t j = 0; j <= i; ++j) {
      const double se = std::isnan(stats[j].stderr_energy_per_spin) ? 0.0 : stats[j].stderr_energy_per_spin;
      var += weight[j] * weight[j] * se * se;
    }
    flagged = flagged || !(stats[i].acceptance_rate >= 0.01);
    out.push_back({stats[i].beta, f, std::sqrt(var), flagged});
  }
  return out;
}

OverlapHistogram overlap_probe(const TemperingEnsemble& ensemble, std::size_t k, std::size_t beta_index,
                               std::size_t sweeps, const ProbeOptions& opts) {
  if (k < 2) throw std::invalid_argument("overlap_probe: k must be >= 2");
  if (beta_index >= ensemble.rungs()) throw std::out_of_range("overlap_probe: beta_index out of range");
  if (sweeps < 1) throw std::invalid_argument("overlap_probe: sweeps must be >= 1");
  if (opts.bins < 1) throw std::invalid_argument("overlap_probe: bins must be >= 1");
  if (!opts.replica_seeds.empty() && opts.replica_seeds.size() != k)
    throw std::invalid_argument("overlap_probe: replica_seeds must have k entries");

  std::vector<std::uint64_t> seeds = opts.replica_seeds;
  if (seeds.empty())
    for (std::size_t i = 0; i < k; ++i) seeds.push_back(split_seed(ensemble.seed(), 0x5eed0000ULL + i));

  const Eigen::Index n = ensemble.disorder().n();
  std::vector<Eigen::MatrixXd> snapshots(k);
  std::vector<RungStatistics> rung_stats(k);
  TemperingOptions ropts = ensemble.options();
  ropts.threads = 1;
  parallel_for(k, opts.threads, [&](std::size_t i) {
    TemperingEnsemble replica(ensemble.disorder_ptr(), ensemble.ladder(), seeds[i], ropts);
    replica.burn_in(opts.burn_in);
    Eigen::MatrixXd& snap = snapshots[i];
    snap.resize(n, static_cast<Eigen::Index>(sweeps));
    for (std::size_t s = 0; s < sweeps; ++s) {
      replica.sweep_once();
      snap.col(static_cast<Eigen::Index>(s)) = replica.configuration(beta_index).coords();
    }
    rung_stats[i] = replica.statistics()[beta_index];
  });

  OverlapHistogram h;
  h.k = k;
  h.counts.assign(opts.bins, 0);
  const double width = 2.0 / static_cast<double>(opts.bins);
  for (std::size_t b = 0; b <= opts.bins; ++b) h.bin_edges.push_back(-1.0 + width * static_cast<double>(b));
  h.bin_edges.back() = 1.0;

  std::uint64_t near = 0, outside = 0;
  bool all_identical = true;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) {
      const Eigen::VectorXd r = (snapshots[i].cwiseProduct(snapshots[j])).colwise().sum().transpose() / static_cast<double>(n);
      for (double x : r) {
        const auto bin = static_cast<std::size_t>(
            std::clamp((x + 1.0) / width, 0.0, static_cast<double>(opts.bins - 1)));
        ++h.counts[bin];
        ++h.pair_count;
        if (opts.target_q && std::abs(x - *opts.target_q) < opts.epsilon) ++near;
        if (std::abs(x) > 0.3) ++outside;
        all_identical = all_identical && x >= 1.0 - 1e-9;
      }
    }
  h.modal_bin = static_cast<std::size_t>(std::max_element(h.counts.begin(), h.counts.end()) - h.counts.begin());
  h.modal_overlap = 0.5 * (h.bin_edges[h.modal_bin] + h.bin_edges[h.modal_bin + 1]);
  std::vector<std::uint64_t> folded(opts.bins, 0);
  for (std::size_t b = 0; b < opts.bins; ++b) {
    const double centre = 0.5 * (h.bin_edges[b] + h.bin_edges[b + 1]);
    const auto fb = static_cast<std::size_t>(
        std::clamp((std::abs(centre) + 1.0) / width, 0.0, static_cast<double>(opts.bins - 1)));
    folded[fb] += h.counts[b];
  }
  const auto fmode = static_cast<std::size_t>(std::max_element(folded.begin(), folded.end()) - folded.begin());
  h.modal_abs_overlap = 0.5 * (h.bin_edges[fmode] + h.bin_edges[fmode + 1]);
  h.high_overlap_peak = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t peak_count = 0;
  for (std::size_t b = 0; b < h.counts.size(); ++b) {
    const double centre = 0.5 * (h.bin_edges[b] + h.bin_edges[b + 1]);
    if (std::abs(centre) > 0.3 && h.counts[b] > peak_count) {
      peak_count = h.counts[b];
      h.high_overlap_peak = centre;
    }
  }
  const double pairs = static_cast<double>(h.pair_count);
  if (opts.target_q) h.mass_near_target = static_cast<double>(near) / pairs;
  h.mass_outside_03 = static_cast<double>(outside) / pairs;

  std::vector<std::uint64_t> sorted = seeds;
  std::sort(sorted.begin(), sorted.end());
  h.degenerate = all_identical || std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end();

  double emin = std::numeric_limits<double>::infinity(), emax = -emin;
  for (const auto& s : rung_stats) {
    h.replica_acceptance.push_back(s.acceptance_rate);
    h.replica_mean_energy.push_back(s.mean_energy_per_spin);
    emin = std::min(emin, s.mean_energy_per_spin);
    emax = std::max(emax, s.mean_energy_per_spin);
    h.unequilibrated = h.unequilibrated || !(s.acceptance_rate >= 0.01);
  }
  h.unequilibrated = h.unequilibrated || emax - emin > 0.05;
  return h;
}

}  // namespace pspin
