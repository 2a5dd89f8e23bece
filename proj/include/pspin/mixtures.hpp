#pragma once

// Covariance mixtures nu(x) = sum_k gamma_k^2 x^k and the overlap shift
// nu -> nu_q used by the TAP representation of spherical models.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace pspin {

/// Largest degree accepted anywhere in the library.
inline constexpr int kMaxDegree = 64;

/// Binomial coefficient C(n, k) in exact integer arithmetic, n <= 64.
std::uint64_t binomial(int n, int k);

template <typename Scalar>
struct MixtureDerivs {
  Scalar nu;
  Scalar nu_prime;
  Scalar nu_double_prime;
};

/// A finite mixture with nonnegative weights gamma_k^2 on degrees k >= 2.
template <typename Scalar>
class BasicMixture {
public:
  using Term = std::pair<int, Scalar>;

  explicit BasicMixture(std::vector<Term> terms) : terms_(std::move(terms)) {
    bool any_positive = false;
    for (const auto& [k, w] : terms_) {
      if (k < 2 || k > kMaxDegree)
        throw std::invalid_argument("mixture degree must lie in [2, 64]");
      if (!(w >= Scalar(0)))
        throw std::invalid_argument("mixture weights must be nonnegative");
      any_positive = any_positive || w > Scalar(0);
      degree_max_ = std::max(degree_max_, k);
    }
    if (!any_positive)
      throw std::invalid_argument("mixture needs at least one positive weight");
  }

  /// nu(t) = t^p.
  static BasicMixture pure(int p) { return BasicMixture({{p, Scalar(1)}}); }

  const std::vector<Term>& terms() const { return terms_; }
  int degree_max() const { return degree_max_; }

  Scalar operator()(Scalar x) const { return derivs(x).nu; }

  MixtureDerivs<Scalar> derivs(Scalar x) const {
    using std::pow;
    MixtureDerivs<Scalar> out{Scalar(0), Scalar(0), Scalar(0)};
    for (const auto& [k, w] : terms_) {
      out.nu += w * pow(x, k);
      out.nu_prime += w * Scalar(k) * pow(x, k - 1);
      out.nu_double_prime += w * Scalar(k) * Scalar(k - 1) * pow(x, k - 2);
    }
    return out;
  }

private:
  std::vector<Term> terms_;
  int degree_max_ = 0;
};

using Mixture = BasicMixture<double>;

template <typename Scalar>
Scalar eval_nu(const BasicMixture<Scalar>& m, Scalar x) {
  return m(x);
}

template <typename Scalar>
MixtureDerivs<Scalar> eval_nu_derivs(const BasicMixture<Scalar>& m, Scalar x) {
  return m.derivs(x);
}

/// Pure components of nu_q for nu(t) = t^p:
/// nu_q(x) = sum_{k=2}^{p} alpha_k^2(q) x^k, alpha_k^2 = C(p,k)(1-q)^k q^(p-k).
template <typename Scalar>
struct BasicShiftedMixture {
  int base_p = 0;
  Scalar q = 0;
  /// alpha_sq[i] holds alpha_{i+2}^2.
  std::vector<Scalar> alpha_sq;

  Scalar alpha_sq_at(int k) const { return alpha_sq.at(static_cast<std::size_t>(k - 2)); }

  /// nu_q(1), summed from the nonnegative components.
  Scalar total() const {
    Scalar s = 0;
    for (Scalar a : alpha_sq) s += a;
    return s;
  }

  Scalar operator()(Scalar x) const {
    using std::pow;
    Scalar s = 0;
    for (std::size_t i = 0; i < alpha_sq.size(); ++i)
      s += alpha_sq[i] * pow(x, static_cast<int>(i) + 2);
    return s;
  }
};

using ShiftedMixture = BasicShiftedMixture<double>;

template <typename Scalar = double>
BasicShiftedMixture<Scalar> shift_mixture(int p, Scalar q) {
  using std::pow;
  if (p < 2 || p > kMaxDegree)
    throw std::invalid_argument("shift_mixture: p must lie in [2, 64]");
  if (!(q >= Scalar(0) && q < Scalar(1)))
    throw std::domain_error("shift_mixture: q must lie in [0, 1)");
  BasicShiftedMixture<Scalar> out;
  out.base_p = p;
  out.q = q;
  out.alpha_sq.reserve(static_cast<std::size_t>(p - 1));
  const Scalar one_minus_q = Scalar(1) - q;
  for (int k = 2; k <= p; ++k)
    out.alpha_sq.push_back(Scalar(binomial(p, k)) * pow(one_minus_q, k) * pow(q, p - k));
  return out;
}

/// E_inf(p) = 2 sqrt((p-1)/p).
inline double e_infinity(int p) {
  if (p < 2) throw std::invalid_argument("e_infinity: p must be >= 2");
  return 2.0 * std::sqrt(static_cast<double>(p - 1) / p);
}

/// Onsager reaction term beta^2 nu_q(1) / 2 for the pure p-spin mixture.
double onsager_term(int p, double q, double beta);

}  // namespace pspin
