#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "pspin/free_energy.hpp"
#include "pspin/mixtures.hpp"

using namespace pspin;

// 30-digit mpmath values.
constexpr double kTMinus3 = 0.343992513806824776;
constexpr double kTPlus3 = 0.484506667956911850;
constexpr double kQBeta3At2Bc = 0.844916846782053180;
constexpr double kF3At2Bc = 2.36187959260772847;
constexpr double kQBeta3At1e4 = 0.999965600156939628;

TEST_CASE("t_pm roots") {
  for (int p = 2; p <= 10; ++p) {
    const TRoots t = t_pm(p, e_infinity(p));
    CHECK(t.t_minus == doctest::Approx(1.0 / std::sqrt(p * (p - 1.0))).epsilon(1e-7));
    CHECK(t.t_plus == doctest::Approx(1.0 / std::sqrt(p * (p - 1.0))).epsilon(1e-7));
  }
  const CriticalPoint cp = solve_critical(3);
  const TRoots t = t_pm(3, cp.e_star);
  CHECK(t.t_minus == doctest::Approx(kTMinus3).epsilon(1e-11));
  CHECK(t.t_plus == doctest::Approx(kTPlus3).epsilon(1e-11));
  CHECK(t.t_minus * t.t_plus == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  for (double r : {t.t_minus, t.t_plus}) CHECK(std::abs(6.0 * r * r - 3.0 * cp.e_star * r + 1.0) <= 1e-12);
  CHECK_THROWS_AS(t_pm(3, 1.5), std::domain_error);
}

TEST_CASE("Vieta relations for p = 2..16") {
  for (int p = 2; p <= 16; ++p) {
    const CriticalPoint cp = solve_critical(p);
    const TRoots t = t_pm(p, cp.e_star);
    CHECK(t.t_minus * t.t_plus == doctest::Approx(1.0 / (p * (p - 1.0))).epsilon(1e-12));
    CHECK(t.t_minus + t.t_plus == doctest::Approx(cp.e_star / (p - 1.0)).epsilon(1e-12));
    CHECK(t.t_minus <= 1.0 / std::sqrt(p * (p - 1.0)) + 1e-15);
    CHECK(t.t_plus >= 1.0 / std::sqrt(p * (p - 1.0)) - 1e-15);
  }
}

TEST_CASE("solve_q_beta") {
  const CriticalPoint cp = solve_critical(3);
  CHECK(solve_q_beta(3, cp.beta_c, cp.e_star) == doctest::Approx(cp.q_c).epsilon(1e-9));

  const double q2 = solve_q_beta(3, 2.0 * cp.beta_c, cp.e_star);
  CHECK(q2 == doctest::Approx(kQBeta3At2Bc).epsilon(1e-12));
  // Independent scan oracle on (1/3, 1).
  const double target = kTMinus3 / (2.0 * cp.beta_c);
  const auto roots =
      oracle::sign_changes([&](double q) { return std::sqrt(q) * (1.0 - q) - target; }, 1.0 / 3.0, 1.0 - 1e-9, 1e-5);
  REQUIRE(roots.size() == 1);
  CHECK(std::abs(q2 - roots.front()) < 1e-6);

  const double qbig = solve_q_beta(3, 1e4, cp.e_star);
  CHECK(qbig == doctest::Approx(kQBeta3At1e4).epsilon(1e-12));
  CHECK(qbig == doctest::Approx(1.0 - kTMinus3 * 1e-4).epsilon(1e-8));

  CHECK_THROWS_AS(solve_q_beta(3, 0.5 * cp.beta_c, cp.e_star), std::domain_error);
  // An e_star far above the truth pushes t_minus/beta above max f.
  CHECK_THROWS_AS(solve_q_beta(3, cp.beta_c * 1.0001, 1.0), std::domain_error);
}

TEST_CASE("free_energy branches for p = 3") {
  const CriticalPoint cp = solve_critical(3);
  const TapSolution lo = free_energy(3, 0.5 * cp.beta_c);
  CHECK(lo.branch == Branch::replica_symmetric);
  CHECK(lo.q_beta == 0.0);
  CHECK(lo.free_energy == doctest::Approx(0.125 * cp.beta_c * cp.beta_c));

  const TapSolution at = free_energy(3, cp.beta_c);
  CHECK(at.free_energy == doctest::Approx(0.7278).epsilon(1e-4));
  const double above = free_energy(3, cp.beta_c * (1 + 1e-12)).free_energy;
  CHECK(std::abs(above - at.free_energy) <= 1e-8);

  const TapSolution hi = free_energy(3, 2.0 * cp.beta_c);
  CHECK(hi.branch == Branch::tap);
  CHECK(hi.q_beta == doctest::Approx(kQBeta3At2Bc).epsilon(1e-12));
  CHECK(hi.free_energy == doctest::Approx(kF3At2Bc).epsilon(1e-11));
  CHECK(hi.q_beta > hi.ell);
  CHECK(hi.free_energy < 0.5 * hi.beta * hi.beta);
}

TEST_CASE("free_energy p = 2 closed form") {
  const TapSolution s = free_energy(2, 2.0);
  CHECK(s.q_beta == doctest::Approx(1.0 - 1.0 / (2.0 * std::numbers::sqrt2)));
  CHECK(s.free_energy ==
        doctest::Approx(2.0 * std::numbers::sqrt2 - 0.5 * std::log(2.0) - 0.25 * std::log(2.0) - 0.75));
  // The closed form agrees with the TAP expression at q_beta.
  const double q = s.q_beta;
  const double tap = 2.0 * std::numbers::sqrt2 * q + 0.5 * std::log(1 - q) + 0.5 * 4.0 * (1 - q) * (1 - q);
  CHECK(s.free_energy == doctest::Approx(tap).epsilon(1e-13));
  CHECK(free_energy(2, 0.5).free_energy == doctest::Approx(0.125));
}

TEST_CASE("branch continuity at beta_c") {
  for (int p = 2; p <= 10; ++p) {
    const CriticalPoint cp = solve_critical(p);
    const double f = free_energy(cp, cp.beta_c + 1e-9).free_energy;
    CHECK_MESSAGE(std::abs(f - 0.5 * cp.beta_c * cp.beta_c) <= 1e-6, "p = " << p);
  }
}

TEST_CASE("free energy is nondecreasing and convex on [0, 10]") {
  for (int p : {2, 3, 4, 7}) {
    const CriticalPoint cp = solve_critical(p);
    std::vector<double> f;
    for (int i = 0; i <= 1000; ++i) f.push_back(free_energy(cp, i * 1e-2).free_energy);
    for (std::size_t i = 1; i < f.size(); ++i) REQUIRE(f[i] >= f[i - 1]);
    for (std::size_t i = 1; i + 1 < f.size(); ++i) REQUIRE(f[i + 1] - 2 * f[i] + f[i - 1] >= -1e-8);
  }
}

TEST_CASE("root identity, monotone q_beta and lemma bound on a grid") {
  for (int p : {3, 4, 5, 8}) {
    const CriticalPoint cp = solve_critical(p);
    double prev = 0.0;
    for (int i = 1; i <= 400; ++i) {
      const double beta = cp.beta_c + (10.0 - cp.beta_c) * i / 400.0;
      const TapSolution s = free_energy(cp, beta);
      REQUIRE(std::abs(beta * tap_f(p, s.q_beta) - s.t_minus) <= 1e-10);
      REQUIRE(s.q_beta >= prev);
      REQUIRE(lemma_bound_check(p, beta, s.q_beta));
      prev = s.q_beta;
    }
  }
}

TEST_CASE("ground-state limit and asymptotics") {
  const CriticalPoint cp = solve_critical(3);
  const TapSolution s = free_energy(cp, 1e4);
  CHECK(std::abs(s.free_energy / 1e4 - cp.e_star) <= 5e-3);
  CHECK(std::abs((1.0 - s.q_beta) / (s.t_minus / 1e4) - 1.0) <= 0.01);
}

TEST_CASE("tap_functional") {
  const CriticalPoint cp = solve_critical(3);
  for (double beta : {0.3, 1.0, 2.0}) {
    const auto g0 = tap_functional(3, beta, cp.e_star, 0.0);
    CHECK(g0.g_value == doctest::Approx(0.5 * beta * beta));
    CHECK(g0.g_derivative == doctest::Approx(-0.5));
  }
  const auto gc = tap_functional(3, cp.beta_c, cp.e_star, cp.q_c);
  CHECK(std::abs(gc.g_value - free_energy(cp, cp.beta_c).free_energy) <= 1e-8);
  CHECK(std::abs(gc.g_derivative) <= 1e-8);

  for (double factor : {1.1, 2.0, 5.0}) {
    const double beta = factor * cp.beta_c;
    const TapSolution s = free_energy(cp, beta);
    const auto g = tap_functional(3, beta, cp.e_star, s.q_beta);
    CHECK(std::abs(g.g_derivative) <= 1e-8);
    CHECK(g.g_value == doctest::Approx(s.free_energy).epsilon(1e-13));
    // Analytic derivative vs finite differences.
    for (double q : {0.2, 0.5, 0.9}) {
      auto gv = [&](double x) { return tap_functional(3, beta, cp.e_star, x).g_value; };
      CHECK(tap_functional(3, beta, cp.e_star, q).g_derivative == doctest::Approx(oracle::central_diff(gv, q)).epsilon(1e-6));
    }
    // g strictly decreasing on [0, q_beta^-], the small root of f = t_-/beta,
    // and stationary at q_beta^- as well.
    const double qminus = oracle::refine_root([&](double q) { return tap_f(3, q) - s.t_minus / beta; }, 0.0, s.ell);
    const double g_minus = tap_functional(3, beta, cp.e_star, qminus).g_value;
    CHECK(std::abs(tap_functional(3, beta, cp.e_star, qminus).g_derivative) <= 1e-8);
    double prev = tap_functional(3, beta, cp.e_star, 0.0).g_value;
    for (int i = 1; i < 200; ++i) {
      const double q = qminus * i / 200.0;
      const double v = tap_functional(3, beta, cp.e_star, q).g_value;
      REQUIRE(v < prev);
      REQUIRE(v > g_minus);
      prev = v;
    }
    // The high-temperature value g(0) = beta^2/2 exceeds F above beta_c.
    CHECK(tap_functional(3, beta, cp.e_star, 0.0).g_value > g.g_value);
  }
  CHECK_THROWS_AS(tap_functional(3, 1.0, cp.e_star, 1.0), std::domain_error);
}

TEST_CASE("lemma_bound_check predicate") {
  const CriticalPoint cp = solve_critical(3);
  CHECK(lemma_bound_check(3, 2.0 * cp.beta_c, kQBeta3At2Bc));
  CHECK(lemma_bound_check(3, 0.5 * cp.beta_c, 0.0));
  const double ell = 1.0 / 3.0;
  const double beta = (1.0 / std::sqrt(6.0)) / tap_f(3, ell) * 1.01;
  CHECK_FALSE(lemma_bound_check(3, beta, ell));
}

TEST_CASE("sweep") {
  const double zero[] = {0.0};
  const auto one = sweep(3, zero);
  REQUIRE(one.size() == 1);
  CHECK(one[0].free_energy == 0.0);
  CHECK(one[0].q_beta == 0.0);

  const CriticalPoint cp = solve_critical(3);
  const std::vector<double> seam{cp.beta_c - 1e-6, cp.beta_c + 1e-6};
  const auto s = sweep(3, seam);
  CHECK(s[0].q_beta == 0.0);
  CHECK(s[0].branch == Branch::replica_symmetric);
  CHECK(s[1].branch == Branch::tap);
  CHECK(s[1].q_beta == doctest::Approx(cp.q_c).epsilon(1e-4));
  CHECK(std::abs(s[1].free_energy - s[0].free_energy) <= 1e-5);

  std::vector<double> grid;
  for (int i = 0; i <= 300; ++i) grid.push_back(i * 0.01);
  const auto p2 = sweep(2, grid);
  for (const auto& x : p2) CHECK(x.q_beta == doctest::Approx(std::max(0.0, 1.0 - 1.0 / (std::numbers::sqrt2 * x.beta))).epsilon(1e-12));

  const auto serial = sweep(5, grid, 1);
  const auto parallel = sweep(5, grid, 4);
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(serial[i].free_energy == parallel[i].free_energy);

  const std::vector<double> bad{0.5, 0.4};
  CHECK_THROWS_AS(sweep(3, bad), SweepError);
  try {
    sweep(3, bad);
  } catch (const SweepError& e) {
    CHECK(e.beta() == 0.4);
  }
}
