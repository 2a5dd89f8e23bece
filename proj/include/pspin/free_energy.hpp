#pragma once

// Free energy of the spherical pure p-spin model at every temperature,
// from the TAP representation at the largest multi-samplable overlap.

#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pspin/critical.hpp"

namespace pspin {

enum class Branch { replica_symmetric, tap };

const char* to_string(Branch b);

struct TapSolution {
  int p = 0;
  double beta = 0;
  double q_beta = 0;
  double t_minus = 0;
  double t_plus = 0;
  double free_energy = 0;
  /// Maximiser (p-2)/p of f(q) = q^(p/2-1)(1-q).
  double ell = 0;
  Branch branch = Branch::replica_symmetric;
};

struct TapFunctionalSample {
  double q = 0;
  double g_value = 0;
  double g_derivative = 0;
};

struct TRoots {
  double t_minus;
  double t_plus;
};

/// Ordered roots of p(p-1)t^2 - p E t + 1 = 0. Requires E >= E_inf(p).
TRoots t_pm(int p, double e_star);

/// f(q) = q^(p/2-1)(1-q).
double tap_f(int p, double q);

/// Root of f(q) = t_minus/beta on ((p-2)/p, 1); beta >= beta_c(p).
double solve_q_beta(int p, double beta, double e_star, double tol = 1e-14);

/// F(beta) with E_star, beta_c taken from solve_critical(p).
TapSolution free_energy(int p, double beta);
TapSolution free_energy(const CriticalPoint& cp, double beta);

/// g(beta, q) = beta E q^(p/2) + log(1-q)/2 + beta^2 nu_q(1)/2 and dg/dq.
TapFunctionalSample tap_functional(int p, double beta, double e_star, double q);

/// beta q^(p/2-1)(1-q) <= 1/sqrt(p(p-1)) with slack 1e-12.
bool lemma_bound_check(int p, double beta, double q_beta);

/// Failure at one grid point of a sweep.
class SweepError : public std::runtime_error {
public:
  SweepError(double beta, const std::string& what)
      : std::runtime_error("beta = " + std::to_string(beta) + ": " + what), beta_(beta) {}
  double beta() const { return beta_; }

private:
  double beta_;
};

/// One independent TapSolution per beta; betas strictly increasing and >= 0.
/// threads > 1 evaluates points concurrently; output order follows betas.
std::vector<TapSolution> sweep(int p, std::span<const double> betas, unsigned threads = 1);

}  // namespace pspin
