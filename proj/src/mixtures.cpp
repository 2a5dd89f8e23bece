#include "pspin/mixtures.hpp"

namespace pspin {

std::uint64_t binomial(int n, int k) {
  if (n < 0 || n > kMaxDegree) throw std::invalid_argument("binomial: n must lie in [0, 64]");
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  // r * (n - k + i) is divisible by i at every step; the 128-bit
  // intermediate keeps C(64, 32) exact.
  unsigned __int128 r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
  return static_cast<std::uint64_t>(r);
}

double onsager_term(int p, double q, double beta) {
  if (beta < 0.0) throw std::invalid_argument("onsager_term: beta must be >= 0");
  return 0.5 * beta * beta * shift_mixture(p, q).total();
}

}  // namespace pspin
