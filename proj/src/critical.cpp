#include "pspin/critical.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "pspin/mixtures.hpp"

namespace pspin {

namespace {

double clamp_below_one(double q) { return std::min(q, 1.0 - kOneMinusQFloor); }

void require_overlap(double q, const char* who) {
  if (!(q >= 0.0 && q < 1.0)) throw std::domain_error(std::string(who) + ": q must lie in [0, 1)");
}

}  // namespace

double aux_a(int p, double q) {
  if (p < 2) throw std::invalid_argument("aux_a: p must be >= 2");
  require_overlap(q, "aux_a");
  if (q == 0.0) return 0.0;
  const double x = clamp_below_one(q);
  return p * (1.0 - x) * std::log1p(-x) + p * x - (p - 1) * x * x;
}

double aux_b(double q) {
  require_overlap(q, "aux_b");
  if (q == 0.0) return 1.0;
  const double x = clamp_below_one(q);
  return -std::log1p(-x) / x;
}

double solve_aux_bracket(int p) {
  if (p < 3) throw std::invalid_argument("solve_aux_bracket: p must be >= 3");
  const double target = 2.0 * (p - 1) / p;
  const Bracket b = bisect([target](double q) { return aux_b(q) - target; }, 1e-9, 1.0 - 1e-9, 1e-15);
  return 0.5 * (b.lo + b.hi);
}

double solve_qc(int p, double tol) {
  if (p < 3) throw std::invalid_argument("solve_qc: p must be >= 3 (p = 2 has q_c = 0)");
  if (!(tol > 0.0 && tol <= 1e-6)) throw std::invalid_argument("solve_qc: tol must lie in (0, 1e-6]");
  const double q_star = solve_aux_bracket(p);
  const double hi = 1.0 - 1e-9;
  auto a = [p](double q) { return aux_a(p, q); };
  if (!(a(q_star) < 0.0 && a(hi) > 0.0))
    throw NumericalError("solve_qc: a(q) does not change sign on [q*, 1)");
  const double qc = bracketed_root(a, q_star, hi, 1e-13);
  if (!(std::abs(a(qc)) <= tol))
    throw NumericalError("solve_qc: residual above tolerance for p = " + std::to_string(p));
  return qc;
}

CriticalPoint solve_critical(int p) {
  if (p < 2 || p > kMaxDegree) throw std::invalid_argument("solve_critical: p must lie in [2, 64]");
  CriticalPoint cp;
  cp.p = p;
  cp.e_inf = e_infinity(p);
  if (p == 2) {
    cp.q_c = 0.0;
    cp.beta_c = 1.0 / std::numbers::sqrt2;
    cp.e_star = std::numbers::sqrt2;
    return cp;
  }
  const double q = solve_qc(p, 1e-12);
  cp.q_c = q;
  cp.beta_c = std::pow(q, 1.0 - 0.5 * p) / std::sqrt(p * (1.0 - q));
  const double s = std::sqrt((p - 1) * (1.0 - q));
  cp.e_star = 0.5 * cp.e_inf * (1.0 / s + s);
  return cp;
}

ResidualTriple residuals_prop(int p, double beta, double q, double energy) {
  if (!(q > 0.0 && q < 1.0)) throw std::domain_error("residuals_prop: q must lie in (0, 1)");
  if (!(beta > 0.0)) throw std::invalid_argument("residuals_prop: beta must be > 0");
  const auto d = Mixture::pure(p).derivs(q);
  const double b2 = beta * beta;
  ResidualTriple r;
  r.r_I = 1.0 / (1.0 - q) + b2 * (1.0 - q) * d.nu_double_prime - beta * p * std::pow(q, 0.5 * p - 1.0) * energy;
  r.r_IIa = b2 * (d.nu + (1.0 - q) * d.nu_prime) - beta * std::pow(q, 0.5 * p) * energy;
  r.r_IIb = beta * std::pow(q, 0.5 * p) * energy + std::log1p(-q);
  return r;
}

double p2_betac_residual(double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("p2_betac_residual: beta must be > 0");
  return 0.5 * beta * beta -
         (std::numbers::sqrt2 * beta - 0.5 * std::log(beta) - 0.25 * std::numbers::ln2 - 0.75);
}

}  // namespace pspin
