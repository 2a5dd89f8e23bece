#pragma once

// Critical point (q_c, beta_c, E_star) of the spherical pure p-spin model.

#include "pspin/roots.hpp"

namespace pspin {

/// q is kept at most this close to 1 before any log(1 - q).
inline constexpr double kOneMinusQFloor = 1e-12;

struct CriticalPoint {
  int p = 0;
  double q_c = 0;
  double beta_c = 0;
  double e_star = 0;
  double e_inf = 0;
};

/// Signed left-minus-right residuals of the three stationarity relations
/// satisfied by (beta_c, q_c, E_star).
struct ResidualTriple {
  double r_I = 0;
  double r_IIa = 0;
  double r_IIb = 0;
};

/// a(q) = p(1-q)log(1-q) + pq - (p-1)q^2.
double aux_a(int p, double q);

/// b(q) = -log(1-q)/q, continued to b(0) = 1.
double aux_b(double q);

/// Unique solution of b(q) = 2(p-1)/p; a'(q) vanishes there.
double solve_aux_bracket(int p);

/// Interior root of a(q) for p >= 3.
double solve_qc(int p, double tol = 1e-13);

CriticalPoint solve_critical(int p);

ResidualTriple residuals_prop(int p, double beta, double q, double energy);

/// (1/2)b^2 - (sqrt2 b - (1/2)log b - (1/4)log 2 - 3/4), zero at b = 1/sqrt2.
double p2_betac_residual(double beta);

}  // namespace pspin
