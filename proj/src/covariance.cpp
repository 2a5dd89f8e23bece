#include "pspin/covariance.hpp"

#include <cmath>
#include <stdexcept>

namespace pspin {

std::vector<CovarianceRow> covariance_check(int n, int p,
                                            const std::vector<std::pair<SpinConfiguration, SpinConfiguration>>& pairs,
                                            std::size_t draws, std::uint64_t seed) {
  if (draws < 1000) throw std::invalid_argument("covariance_check: draws must be >= 1000");
  for (const auto& [a, b] : pairs)
    if (a.n() != n || b.n() != n) throw std::invalid_argument("covariance_check: configuration dimension mismatch");

  std::vector<double> sum(pairs.size(), 0.0), sum_sq(pairs.size(), 0.0);
  std::vector<double> entries(tensor_entries(n, p));
  Engine rng = make_stream(seed, 0);
  std::normal_distribution<double> normal;
  for (std::size_t d = 0; d < draws; ++d) {
    for (double& x : entries) x = normal(rng);
    const DisorderTensor j(n, p, entries);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const double prod = hamiltonian(j, pairs[i].first) * hamiltonian(j, pairs[i].second);
      sum[i] += prod;
      sum_sq[i] += prod * prod;
    }
  }

  const double m = static_cast<double>(draws);
  std::vector<CovarianceRow> out;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    CovarianceRow row;
    row.overlap = overlap(pairs[i].first, pairs[i].second);
    row.target = n * std::pow(row.overlap, p);
    row.mean = sum[i] / m;
    const double var = (sum_sq[i] - m * row.mean * row.mean) / (m - 1.0);
    row.std_error = std::sqrt(std::max(var, 0.0) / m);
    row.z = (row.mean - row.target) / row.std_error;
    out.push_back(row);
  }
  return out;
}

}  // namespace pspin
