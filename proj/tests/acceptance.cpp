// Acceptance harness: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "pspin/cli.hpp"
#include "pspin/covariance.hpp"
#include "pspin/critical.hpp"
#include "pspin/free_energy.hpp"
#include "pspin/ground_state.hpp"
#include "pspin/tempering.hpp"

using namespace pspin;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* title;
  std::function<Outcome()> body;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double cell(const Table& t, std::size_t row, const std::string& col) {
  for (std::size_t i = 0; i < t.columns.size(); ++i)
    if (t.columns[i] == col) {
      const Cell& c = t.rows.at(row)[i];
      if (const double* d = std::get_if<double>(&c)) return *d;
      if (const std::int64_t* n = std::get_if<std::int64_t>(&c)) return static_cast<double>(*n);
      if (const bool* b = std::get_if<bool>(&c)) return *b ? 1.0 : 0.0;
      return std::nan("");
    }
  throw std::runtime_error("no column " + col);
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

Outcome p2_closed_forms() {
  const Table t = cli::compute(cli::parse_config({"critical", "--p", "2"}));
  const double bc = cell(t, 0, "beta_c"), es = cell(t, 0, "e_star");
  const double res = p2_betac_residual(1.0 / std::sqrt(2.0));
  const double e1 = std::abs(bc - 1.0 / std::sqrt(2.0)), e2 = std::abs(es - std::sqrt(2.0));
  return {e1 <= 1e-12 && e2 <= 1e-12 && std::abs(res) <= 1e-12,
          fmt("|beta_c-1/sqrt2|=%.1e |E*-sqrt2|=%.1e residual=%.1e", e1, e2, res)};
}

Outcome critical_consistency() {
  double worst = 0.0;
  bool roots_ok = true;
  std::string bad;
  for (int p = 3; p <= 16; ++p) {
    const CriticalPoint cp = solve_critical(p);
    const ResidualTriple r = residuals_prop(p, cp.beta_c, cp.q_c, cp.e_star);
    worst = std::max({worst, std::abs(r.r_I), std::abs(r.r_IIa), std::abs(r.r_IIb)});
    const auto roots = oracle::sign_changes([p](double q) { return aux_a(p, q); }, 1e-6, 1.0 - 1e-9, 1e-4);
    if (roots.size() != 1 || std::abs(roots[0] - cp.q_c) > 1e-3) {
      roots_ok = false;
      bad += " p=" + std::to_string(p);
    }
  }
  return {worst <= 1e-9 && roots_ok, fmt("max |residual|=%.2e, single interior root:%s", worst, roots_ok ? " yes" : bad.c_str())};
}

Outcome branch_continuity() {
  double worst = 0.0;
  for (int p = 2; p <= 10; ++p) {
    const CriticalPoint cp = solve_critical(p);
    const double f = free_energy(cp, cp.beta_c + 1e-9).free_energy;
    worst = std::max(worst, std::abs(f - 0.5 * cp.beta_c * cp.beta_c));
  }
  return {worst <= 1e-6, fmt("max |F(beta_c+1e-9) - beta_c^2/2| = %.2e over p=2..10", worst)};
}

Outcome root_identities() {
  double w_root = 0.0, w_prod = 0.0, w_sum = 0.0;
  bool lemma = true;
  for (int p = 3; p <= 6; ++p) {
    const CriticalPoint cp = solve_critical(p);
    const TRoots t = t_pm(p, cp.e_star);
    w_prod = std::max(w_prod, std::abs(t.t_minus * t.t_plus * p * (p - 1) - 1.0));
    w_sum = std::max(w_sum, std::abs((t.t_minus + t.t_plus) * (p - 1) / cp.e_star - 1.0));
    for (int i = 1; i <= 200; ++i) {
      const double beta = cp.beta_c + (10.0 - cp.beta_c) * i / 200.0;
      const TapSolution s = free_energy(cp, beta);
      w_root = std::max(w_root, std::abs(beta * tap_f(p, s.q_beta) - t.t_minus));
      lemma = lemma && lemma_bound_check(p, beta, s.q_beta);
    }
  }
  return {w_root <= 1e-10 && w_prod <= 1e-12 && w_sum <= 1e-12 && lemma,
          fmt("beta f(q)-t_-: %.1e, product rel %.1e, sum rel %.1e, lemma %s (p=3..6)", w_root, w_prod, w_sum,
              lemma ? "true" : "false")};
}

Outcome ground_state_limit() {
  const CriticalPoint cp = solve_critical(3);
  const double r = free_energy(cp, 1e4).free_energy / 1e4;
  return {std::abs(r - cp.e_star) <= 5e-3, fmt("F(1e4)/1e4=%.9f E*=%.9f diff=%.2e", r, cp.e_star, r - cp.e_star)};
}

Outcome covariance_identity() {
  const int n = 16;
  const double rn = std::sqrt(16.0);
  Eigen::VectorXd e0 = Eigen::VectorXd::Zero(n), e1 = Eigen::VectorXd::Zero(n);
  e0[0] = rn;
  e1[1] = rn;
  const SpinConfiguration a(e0), orth(e1), half(Eigen::VectorXd(0.5 * e0 + std::sqrt(0.75) * e1));
  const auto rows = covariance_check(n, 3, {{a, orth}, {a, half}, {a, a}}, 100000, 2024);
  bool ok = true;
  std::string d;
  for (const auto& r : rows) {
    ok = ok && std::abs(r.z) <= 4.0;
    d += fmt("R=%.1f: %.4f vs %.4f (z=%+.2f) ", r.overlap, r.mean, r.target, r.z);
  }
  return {ok, d};
}

Outcome gradient_correctness() {
  double worst = 0.0;
  for (int inst = 0; inst < 20; ++inst) {
    const int p = 2 + inst % 3;
    const int n = 6 + inst % 11;
    const DisorderTensor j = sample_disorder(n, p, 500 + static_cast<std::uint64_t>(inst));
    Engine rng = make_stream(77, static_cast<std::uint64_t>(inst));
    const SpinConfiguration s = SpinConfiguration::uniform(n, rng);
    const Eigen::VectorXd g = gradient(j, s);
    Eigen::VectorXd fd(n);
    for (int i = 0; i < n; ++i)
      fd[i] = oracle::central_diff(
          [&](double x) {
            Eigen::VectorXd y = s.coords();
            y[i] = x;
            return hamiltonian(j, Eigen::Ref<const Eigen::VectorXd>(y));
          },
          s.coords()[i]);
    worst = std::max(worst, (g - fd).norm() / g.norm());
  }
  return {worst <= 1e-6, fmt("max relative FD error %.2e over 20 instances (N<=16, p=2..4)", worst)};
}

Outcome spectral_cross_check() {
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const DisorderTensor j = sample_disorder(64, 2, 900 + seed);
    const double lambda = oracle::top_eigenvalue(coupling_matrix(j));
    const auto res = ground_state_search(j, {.restarts = 3, .max_iters = 20000, .tol = 1e-10, .seed = seed});
    worst = std::max(worst, std::abs(res.energy_per_spin - lambda) / lambda);
  }
  const DisorderTensor big = sample_disorder(500, 2, 4242);
  const double e500 = ground_state_search(big, {.restarts = 2, .max_iters = 20000, .tol = 1e-9, .seed = 1}).energy_per_spin;
  const double gap = std::abs(e500 - std::sqrt(2.0));
  return {worst <= 1e-8 && gap <= 0.08,
          fmt("N=64 max rel err %.1e over 10 instances; N=500 E/N=%.4f (|.-sqrt2|=%.3f)", worst, e500, gap)};
}

Outcome p3_ground_state_band() {
  int inside = 0;
  std::string d;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const DisorderTensor j = sample_disorder(64, 3, seed);
    const auto res = ground_state_search(j, {.restarts = 50, .max_iters = 2000, .tol = 1e-9, .seed = seed});
    inside += res.energy_per_spin >= 1.50 && res.energy_per_spin <= 1.70;
    d += fmt("%.3f ", res.energy_per_spin);
  }
  return {inside >= 9, fmt("%d/10 in [1.50,1.70]: ", inside) + d};
}

std::vector<double> grid(double hi, double step) {
  std::vector<double> out;
  for (int i = 0; i * step <= hi + 1e-12; ++i) out.push_back(i * step);
  return out;
}

Outcome high_temperature_integration() {
  auto j = std::make_shared<const DisorderTensor>(sample_disorder(32, 3, 1));
  TemperingEnsemble ens(j, grid(0.6, 0.05), 31);
  ens.burn_in(200);
  ens.tempering_sweep(1000);
  const ThermoPoint top = thermo_integration(ens).back();
  const bool ok32 = std::abs(top.free_energy - 0.18) <= 0.05 && top.std_error <= 0.02;

  auto j2 = std::make_shared<const DisorderTensor>(sample_disorder(2, 2, 8));
  const Eigen::Matrix2d m = coupling_matrix(*j2);
  TemperingEnsemble small(j2, grid(1.0, 0.05), 9, {.initial_delta = 1.0, .batches = 40});
  small.burn_in(500);
  small.tempering_sweep(20000);
  const ThermoPoint end = thermo_integration(small).back();
  const double exact = oracle::n2_free_energy(m, end.beta);
  const bool ok2 = std::abs(end.free_energy - exact) <= 3.0 * end.std_error;
  return {ok32 && ok2, fmt("N=32: F=%.4f +- %.4f vs 0.18; N=2 beta=1: F=%.5f +- %.5f vs quadrature %.5f", top.free_energy,
                           top.std_error, end.free_energy, end.std_error, exact)};
}

Outcome overlap_probe_soft() {
  const Table t = cli::compute(
      cli::parse_config({"probe", "--p", "3", "--n", "48", "--k", "4", "--sweeps", "400", "--burn-in", "200", "--seed", "1"}));
  const std::size_t last = t.rows.size() - 1;
  const double modal = cell(t, last, "modal_abs_overlap"), q = cell(t, last, "q_beta_theory");
  const double peak = cell(t, last, "high_overlap_peak"), near = cell(t, last, "mass_near_target");
  const bool flagged = cell(t, last, "unequilibrated") != 0.0;
  std::string acc;
  for (std::size_t r = 0; r < last; ++r)
    if (std::isfinite(cell(t, r, "acceptance"))) acc += fmt("%.2f ", cell(t, r, "acceptance"));
  const bool close = std::abs(modal - q) <= 0.15;
  return {close || flagged,
          fmt("modal |R|=%.3f q_beta=%.4f high-overlap peak=%.3f mass within 0.15=%.3f unequilibrated=%s acceptance: ",
              modal, q, peak, near, flagged ? "yes" : "no") +
              acc};
}

Outcome reproducibility() {
  const fs::path dir = fs::temp_directory_path() / "pspin_acceptance";
  fs::create_directories(dir);
  bool same = true;
  std::size_t bytes = 0;
  const std::vector<std::vector<std::string>> runs = {
      {"thermo", "--n", "12", "--beta", "0:1:0.1", "--sweeps", "100", "--burn-in", "20", "--seed", "5"},
      {"gstate", "--n", "16", "--restarts", "4", "--seed", "5", "--format", "json"},
      {"mc-verify", "--n", "8", "--draws", "2000", "--seed", "5"}};
  for (std::size_t i = 0; i < runs.size(); ++i) {
    std::string out[2];
    for (int k = 0; k < 2; ++k) {
      const fs::path path = dir / ("run" + std::to_string(i) + "_" + std::to_string(k));
      std::vector<std::string> args = runs[i];
      args.insert(args.end(), {"--output", path.string()});
      if (cli::main(args) != 0) return {false, "run failed: " + runs[i][0]};
      out[k] = slurp(path);
    }
    same = same && !out[0].empty() && out[0] == out[1];
    bytes += out[0].size();
  }
  fs::remove_all(dir);
  return {same, fmt("3 commands x 2 runs, %zu bytes each side, identical=%s", bytes, same ? "yes" : "no")};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "p=2 closed forms", p2_closed_forms},
      {2, "critical triple consistency p=3..16", critical_consistency},
      {3, "branch continuity at beta_c", branch_continuity},
      {4, "root and quadratic identities", root_identities},
      {5, "ground-state limit F(beta)/beta", ground_state_limit},
      {6, "covariance identity", covariance_identity},
      {7, "gradient correctness", gradient_correctness},
      {8, "p=2 spectral cross-check", spectral_cross_check},
      {9, "p=3 ground-state band", p3_ground_state_band},
      {10, "high-temperature thermodynamic integration", high_temperature_integration},
      {11, "overlap probe (soft)", overlap_probe_soft},
      {12, "reproducibility", reproducibility},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !o.pass;
    std::printf("%s %2d %s [%.1f s] %s\n", o.pass ? "PASS" : "FAIL", c.id, c.title, secs, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
