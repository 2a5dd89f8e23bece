#include "pspin/free_energy.hpp"

#include <cmath>
#include <exception>
#include <numbers>
#include <thread>

#include "pspin/mixtures.hpp"

namespace pspin {

const char* to_string(Branch b) {
  return b == Branch::replica_symmetric ? "replica_symmetric" : "tap";
}

TRoots t_pm(int p, double e_star) {
  if (p < 2) throw std::invalid_argument("t_pm: p must be >= 2");
  const double e_inf = e_infinity(p);
  const double ratio = e_star / e_inf;
  if (!(ratio >= 1.0 - 1e-14))
    throw std::domain_error("t_pm: e_star below E_inf gives a negative discriminant");
  const double disc = ratio > 1.0 ? std::sqrt(ratio * ratio - 1.0) : 0.0;
  const double scale = 1.0 / std::sqrt(static_cast<double>(p) * (p - 1));
  // Small root through the product of roots avoids cancellation.
  const double t_plus = scale * (ratio + disc);
  const double t_minus = 1.0 / (static_cast<double>(p) * (p - 1) * t_plus);
  return {t_minus, t_plus};
}

double tap_f(int p, double q) { return std::pow(q, 0.5 * p - 1.0) * (1.0 - q); }

double solve_q_beta(int p, double beta, double e_star, double tol) {
  if (p < 2) throw std::invalid_argument("solve_q_beta: p must be >= 2");
  if (!(tol > 0.0 && tol <= 1e-6)) throw std::invalid_argument("solve_q_beta: tol must lie in (0, 1e-6]");
  const double beta_c = solve_critical(p).beta_c;
  if (!(beta >= beta_c)) throw std::domain_error("solve_q_beta: beta must be >= beta_c");
  const double target = t_pm(p, e_star).t_minus / beta;
  const double ell = (p - 2.0) / p;
  if (target > tap_f(p, ell))
    throw NumericalError("solve_q_beta: t_minus/beta exceeds max f; inconsistent e_star");
  // f is strictly decreasing on (ell, 1) with f(1) = 0.
  auto h = [p, target](double q) { return tap_f(p, q) - target; };
  const Bracket b = bisect(h, ell, 1.0, tol);
  return 0.5 * (b.lo + b.hi);
}

TapSolution free_energy(const CriticalPoint& cp, double beta) {
  if (!(beta >= 0.0)) throw std::invalid_argument("free_energy: beta must be >= 0");
  const int p = cp.p;
  TapSolution s;
  s.p = p;
  s.beta = beta;
  s.ell = (p - 2.0) / p;
  const TRoots t = t_pm(p, cp.e_star);
  s.t_minus = t.t_minus;
  s.t_plus = t.t_plus;
  if (beta <= cp.beta_c) {
    s.branch = Branch::replica_symmetric;
    s.q_beta = 0.0;
    s.free_energy = 0.5 * beta * beta;
    return s;
  }
  s.branch = Branch::tap;
  if (p == 2) {
    s.q_beta = 1.0 - 1.0 / (std::numbers::sqrt2 * beta);
    s.free_energy = std::numbers::sqrt2 * beta - 0.5 * std::log(beta) - 0.25 * std::numbers::ln2 - 0.75;
    return s;
  }
  const double target = s.t_minus / beta;
  auto h = [p, target](double q) { return tap_f(p, q) - target; };
  const Bracket b = bisect(h, s.ell, 1.0, 1e-16);
  const double q = 0.5 * (b.lo + b.hi);
  s.q_beta = q;
  s.free_energy = beta * cp.e_star * std::pow(q, 0.5 * p) + 0.5 * std::log1p(-q) + onsager_term(p, q, beta);
  return s;
}

TapSolution free_energy(int p, double beta) { return free_energy(solve_critical(p), beta); }

TapFunctionalSample tap_functional(int p, double beta, double e_star, double q) {
  if (!(q >= 0.0 && q < 1.0)) throw std::domain_error("tap_functional: q must lie in [0, 1)");
  if (!(beta >= 0.0)) throw std::invalid_argument("tap_functional: beta must be >= 0");
  const auto d = Mixture::pure(p).derivs(q);
  TapFunctionalSample s;
  s.q = q;
  s.g_value = beta * e_star * std::pow(q, 0.5 * p) + 0.5 * std::log1p(-q) + onsager_term(p, q, beta);
  s.g_derivative = beta * e_star * 0.5 * p * std::pow(q, 0.5 * p - 1.0) - 0.5 / (1.0 - q) -
                   0.5 * beta * beta * (1.0 - q) * d.nu_double_prime;
  return s;
}

bool lemma_bound_check(int p, double beta, double q_beta) {
  if (p < 3) throw std::invalid_argument("lemma_bound_check: p must be >= 3");
  const double lhs = beta * tap_f(p, q_beta);
  const double rhs = 1.0 / std::sqrt(static_cast<double>(p) * (p - 1));
  return rhs - lhs >= -1e-12;
}

std::vector<TapSolution> sweep(int p, std::span<const double> betas, unsigned threads) {
  for (std::size_t i = 0; i < betas.size(); ++i) {
    if (!(betas[i] >= 0.0)) throw SweepError(betas[i], "beta must be nonnegative");
    if (i > 0 && !(betas[i] > betas[i - 1])) throw SweepError(betas[i], "betas must be strictly increasing");
  }
  const CriticalPoint cp = solve_critical(p);
  std::vector<TapSolution> out(betas.size());
  std::vector<std::exception_ptr> errors(betas.size());
  auto work = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t i = begin; i < betas.size(); i += stride) {
      try {
        out[i] = free_energy(cp, betas[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  threads = std::max(1u, threads);
  if (threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
  }
  for (std::size_t i = 0; i < betas.size(); ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      throw SweepError(betas[i], e.what());
    }
  }
  return out;
}

}  // namespace pspin
