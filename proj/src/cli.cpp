#include "pspin/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>

#include <CLI11.hpp>
#include <json.hpp>

#include "pspin/covariance.hpp"
#include "pspin/critical.hpp"
#include "pspin/free_energy.hpp"
#include "pspin/ground_state.hpp"
#include "pspin/tempering.hpp"

namespace pspin::cli {

namespace {

using Json = nlohmann::ordered_json;

constexpr const char* kCommands[] = {"critical", "sweep", "gstate", "mc-verify", "probe", "thermo"};

struct FlagSpec {
  const char* name;
  const char* help;
};

// Every subcommand accepts the same flag set; unused flags are ignored.
constexpr FlagSpec kFlags[] = {
    {"p", "interaction degree p (2..64), default 3"},
    {"n", "dimension N for simulations, default 32"},
    {"seed", "master seed, default $PSPIN_SEED or 1"},
    {"beta", "beta grid min:max:step (inclusive) or comma list; probe takes one value"},
    {"output", "output path, '-' for stdout (default)"},
    {"format", "csv (default) or json"},
    {"restarts", "ground-state restarts, default 20"},
    {"max-iters", "ground-state iterations per restart, default 2000"},
    {"draws", "disorder draws for the covariance check, default 100000"},
    {"sweeps", "recorded MCMC sweeps, default 2000"},
    {"burn-in", "MCMC burn-in sweeps, default 500"},
    {"k", "replicas for the overlap probe, default 4"},
    {"rungs", "tempering ladder size, default 16"},
    {"bins", "overlap histogram bins, default 40"},
    {"threads", "worker threads, default 1"},
    {"disorder-file", "binary disorder tensor; read if present, else written"},
};

const std::map<std::string, double> kDefaultTolerances = {
    {"qc", 1e-12},      // |a(q_c)|
    {"gstate", 1e-9},   // relative tangential gradient at convergence
    {"grad", 1e-6},     // finite-difference agreement in mc-verify
    {"z", 4.0},         // covariance z-score bound in mc-verify
};

Command command_from(const std::string& s) {
  if (s == "critical") return Command::critical;
  if (s == "sweep") return Command::sweep;
  if (s == "gstate") return Command::gstate;
  if (s == "mc-verify") return Command::mc_verify;
  if (s == "probe") return Command::probe;
  if (s == "thermo") return Command::thermo;
  throw UsageError("unknown command '" + s + "'");
}

double parse_real(const std::string& flag, const std::string& s) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw UsageError("--" + flag + ": expected a real number, got '" + s + "'");
  }
}

long long parse_integer(const std::string& flag, const std::string& s) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw UsageError("--" + flag + ": expected an integer, got '" + s + "'");
  }
}

long long parse_at_least(const std::string& flag, const std::string& s, long long lo) {
  const long long v = parse_integer(flag, s);
  if (v < lo) throw UsageError("--" + flag + ": must be >= " + std::to_string(lo) + ", got " + s);
  return v;
}

std::string json_scalar_to_string(const std::string& key, const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer() || v.is_number_unsigned()) return std::to_string(v.get<long long>());
  if (v.is_number_float()) return format_double(v.get<double>());
  throw UsageError("config key '" + key + "' must be a string or number");
}

void apply_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "p") {
    const long long p = parse_integer(key, value);
    if (p < 2 || p > 64) throw UsageError("--p: must lie in [2, 64], got " + value);
    cfg.p = static_cast<int>(p);
  } else if (key == "n") {
    cfg.n = static_cast<int>(parse_at_least(key, value, 2));
  } else if (key == "seed") {
    cfg.seed = static_cast<std::uint64_t>(parse_at_least(key, value, 0));
  } else if (key == "beta") {
    try {
      cfg.beta_grid = parse_beta_grid(value);
    } catch (const UsageError& e) {
      throw UsageError(std::string("--beta: ") + e.what());
    }
  } else if (key == "output") {
    if (value.empty()) throw UsageError("--output: empty path");
    cfg.output_path = value;
  } else if (key == "format") {
    if (value == "csv")
      cfg.format = Format::csv;
    else if (value == "json")
      cfg.format = Format::json;
    else
      throw UsageError("--format: expected csv or json, got '" + value + "'");
  } else if (key == "restarts") {
    cfg.restarts = static_cast<int>(parse_at_least(key, value, 1));
  } else if (key == "max-iters") {
    cfg.max_iters = static_cast<int>(parse_at_least(key, value, 1));
  } else if (key == "draws") {
    cfg.draws = static_cast<std::size_t>(parse_at_least(key, value, 1000));
  } else if (key == "sweeps") {
    cfg.sweeps = static_cast<std::size_t>(parse_at_least(key, value, 1));
  } else if (key == "burn-in") {
    cfg.burn_in = static_cast<std::size_t>(parse_at_least(key, value, 0));
  } else if (key == "k") {
    cfg.k = static_cast<std::size_t>(parse_at_least(key, value, 2));
  } else if (key == "rungs") {
    cfg.rungs = static_cast<std::size_t>(parse_at_least(key, value, 2));
  } else if (key == "bins") {
    cfg.bins = static_cast<std::size_t>(parse_at_least(key, value, 1));
  } else if (key == "threads") {
    cfg.threads = static_cast<unsigned>(parse_at_least(key, value, 1));
  } else if (key == "disorder-file") {
    cfg.disorder_file = value;
  } else {
    throw UsageError("unknown key '" + key + "'");
  }
}

void apply_tolerance(RunConfig& cfg, const std::string& key, double value) {
  if (!kDefaultTolerances.contains(key)) throw UsageError("--tol: unknown tolerance '" + key + "'");
  if (!(value > 0.0)) throw UsageError("--tol: tolerance '" + key + "' must be positive");
  cfg.tolerances[key] = value;
}

void apply_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream is(path);
  if (!is) throw UsageError("--config: cannot open '" + path + "'");
  Json doc;
  try {
    doc = Json::parse(is);
  } catch (const std::exception& e) {
    throw UsageError("--config: '" + path + "' is not valid JSON: " + e.what());
  }
  if (!doc.is_object()) throw UsageError("--config: top level must be an object");
  for (const auto& [key, value] : doc.items()) {
    if (key == "tol") {
      if (!value.is_object()) throw UsageError("--config: 'tol' must be an object");
      for (const auto& [tk, tv] : value.items()) {
        if (!tv.is_number()) throw UsageError("--config: tolerance '" + tk + "' must be a number");
        apply_tolerance(cfg, tk, tv.get<double>());
      }
      continue;
    }
    const bool known = std::any_of(std::begin(kFlags), std::end(kFlags), [&](const FlagSpec& f) { return key == f.name; });
    if (!known) throw UsageError("--config: unknown key '" + key + "'");
    if (key == "beta" && value.is_array()) {
      std::string list;
      for (const auto& x : value) list += (list.empty() ? "" : ",") + json_scalar_to_string(key, x);
      apply_value(cfg, key, list);
    } else {
      apply_value(cfg, key, json_scalar_to_string(key, value));
    }
  }
}

std::int64_t as_int(std::size_t v) { return static_cast<std::int64_t>(v); }

Cell opt(double v) { return std::isnan(v) ? Cell{} : Cell{v}; }

// --- commands -------------------------------------------------------------

Table run_critical(const RunConfig& cfg) {
  const CriticalPoint cp = solve_critical(cfg.p);
  Table t;
  t.columns = {"p", "q_c", "beta_c", "e_star", "e_inf", "r_I", "r_IIa", "r_IIb", "a_qc"};
  if (cfg.p == 2) {
    t.add({std::int64_t{2}, cp.q_c, cp.beta_c, cp.e_star, cp.e_inf, Cell{}, Cell{}, Cell{}, p2_betac_residual(cp.beta_c)});
    return t;
  }
  if (std::abs(aux_a(cfg.p, cp.q_c)) > cfg.tolerance("qc"))
    throw NumericalError("critical: |a(q_c)| above the 'qc' tolerance");
  const ResidualTriple r = residuals_prop(cfg.p, cp.beta_c, cp.q_c, cp.e_star);
  t.add({std::int64_t{cfg.p}, cp.q_c, cp.beta_c, cp.e_star, cp.e_inf, r.r_I, r.r_IIa, r.r_IIb, aux_a(cfg.p, cp.q_c)});
  return t;
}

// Inserts beta_c into a grid that straddles it.
std::vector<double> with_seam(std::vector<double> grid, double beta_c) {
  if (grid.size() >= 2 && grid.front() < beta_c && grid.back() > beta_c &&
      std::find(grid.begin(), grid.end(), beta_c) == grid.end()) {
    grid.insert(std::upper_bound(grid.begin(), grid.end(), beta_c), beta_c);
  }
  return grid;
}

Table run_sweep(const RunConfig& cfg) {
  const CriticalPoint cp = solve_critical(cfg.p);
  const std::vector<double> grid =
      with_seam(cfg.beta_grid ? cfg.beta_grid->values : parse_beta_grid("0:5:0.01").values, cp.beta_c);
  const auto sols = sweep(cfg.p, grid, cfg.threads);
  Table t;
  t.columns = {"beta", "q_beta", "t_minus", "t_plus", "F", "branch"};
  for (const auto& s : sols) t.add({s.beta, s.q_beta, s.t_minus, s.t_plus, s.free_energy, std::string(to_string(s.branch))});
  return t;
}

DisorderTensor load_or_sample(const RunConfig& cfg) {
  if (!cfg.disorder_file.empty() && std::filesystem::exists(cfg.disorder_file)) {
    DisorderTensor j = read_disorder(cfg.disorder_file);
    if (j.n() != cfg.n || j.p() != cfg.p)
      throw UsageError("--disorder-file: file holds N=" + std::to_string(j.n()) + ", p=" + std::to_string(j.p()) +
                       " but the run asks for N=" + std::to_string(cfg.n) + ", p=" + std::to_string(cfg.p));
    return j;
  }
  DisorderTensor j = sample_disorder(cfg.n, cfg.p, cfg.seed);
  if (!cfg.disorder_file.empty()) write_disorder(cfg.disorder_file, j);
  return j;
}

Table run_gstate(const RunConfig& cfg) {
  const DisorderTensor j = load_or_sample(cfg);
  GroundStateOptions opts;
  opts.restarts = cfg.restarts;
  opts.max_iters = cfg.max_iters;
  opts.tol = cfg.tolerance("gstate");
  opts.seed = split_seed(cfg.seed, 1);
  const GroundStateResult res = ground_state_search(j, opts);
  const double e_star = solve_critical(cfg.p).e_star;
  Table t;
  t.columns = {"kind", "restart", "energy_per_spin", "iterations", "converged", "e_star_theory"};
  for (std::size_t r = 0; r < res.restarts.size(); ++r) {
    const auto& rr = res.restarts[r];
    t.add({std::string("restart"), as_int(r), rr.energy_per_spin, std::int64_t{rr.iterations}, rr.converged, Cell{}});
  }
  t.add({std::string("best"), Cell{}, res.energy_per_spin, Cell{}, res.converged, e_star});
  return t;
}

Eigen::VectorXd central_difference(const DisorderTensor& j, const Eigen::VectorXd& x, double h) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Eigen::VectorXd a = x, b = x;
    a[i] += h;
    b[i] -= h;
    g[i] = (hamiltonian(j, a) - hamiltonian(j, b)) / (2.0 * h);
  }
  return g;
}

Table run_mc_verify(const RunConfig& cfg) {
  Table t;
  t.columns = {"kind", "label", "overlap", "target", "value", "std_error", "z", "rel_error", "pass"};
  const int n = cfg.n;
  const double rn = std::sqrt(static_cast<double>(n));
  Eigen::VectorXd e0 = Eigen::VectorXd::Zero(n), e1 = Eigen::VectorXd::Zero(n);
  e0[0] = rn;
  e1[1] = rn;
  const SpinConfiguration a(e0), orth(e1);
  const SpinConfiguration half(Eigen::VectorXd(0.5 * e0 + std::sqrt(0.75) * e1));
  std::vector<std::pair<SpinConfiguration, SpinConfiguration>> pairs = {{a, orth}, {a, half}, {a, a}};
  const char* labels[] = {"R=0", "R=0.5", "R=1"};
  const auto rows = covariance_check(n, cfg.p, pairs, cfg.draws, split_seed(cfg.seed, 2));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    t.add({std::string("covariance"), std::string(labels[i]), r.overlap, r.target, r.mean, r.std_error, r.z, Cell{},
           std::abs(r.z) <= cfg.tolerance("z")});
  }
  const int ng = std::min(n, 12);
  for (int inst = 0; inst < 20; ++inst) {
    const int p = 2 + inst % 3;
    const DisorderTensor j = sample_disorder(ng, p, split_seed(cfg.seed, 100 + static_cast<std::uint64_t>(inst)));
    Engine rng = make_stream(cfg.seed, 200 + static_cast<std::uint64_t>(inst));
    const SpinConfiguration s = SpinConfiguration::uniform(ng, rng);
    const Eigen::VectorXd g = gradient(j, s);
    const double rel = (g - central_difference(j, s.coords(), 1e-5)).norm() / g.norm();
    t.add({std::string("gradient"), "p=" + std::to_string(p) + ",N=" + std::to_string(ng), Cell{}, Cell{}, Cell{}, Cell{},
           Cell{}, rel, rel <= cfg.tolerance("grad")});
  }
  return t;
}

Table run_thermo(const RunConfig& cfg) {
  const CriticalPoint cp = solve_critical(cfg.p);
  std::vector<double> ladder = cfg.beta_grid ? cfg.beta_grid->values : parse_beta_grid("0:2:0.05").values;
  if (ladder.front() != 0.0) throw UsageError("--beta: the thermodynamic-integration ladder must start at 0");
  ladder = with_seam(std::move(ladder), cp.beta_c);
  auto j = std::make_shared<const DisorderTensor>(load_or_sample(cfg));
  TemperingOptions topts;
  topts.threads = cfg.threads;
  TemperingEnsemble ens(j, ladder, split_seed(cfg.seed, 3), topts);
  ens.burn_in(cfg.burn_in);
  const auto stats = ens.tempering_sweep(cfg.sweeps);
  const auto ti = thermo_integration(ens);
  Table t;
  t.columns = {"beta", "F_N", "std_error", "F_theory", "mean_energy", "acceptance", "swap_acceptance", "unequilibrated"};
  for (std::size_t i = 0; i < ti.size(); ++i) {
    t.add({ti[i].beta, ti[i].free_energy, ti[i].std_error, free_energy(cp, ti[i].beta).free_energy,
           stats[i].mean_energy_per_spin, opt(stats[i].acceptance_rate), opt(stats[i].swap_acceptance_rate),
           ti[i].unequilibrated});
  }
  return t;
}

Table run_probe(const RunConfig& cfg) {
  const CriticalPoint cp = solve_critical(cfg.p);
  double beta = 2.0 * cp.beta_c;
  if (cfg.beta_grid) {
    if (cfg.beta_grid->values.size() != 1) throw UsageError("--beta: probe takes a single inverse temperature");
    beta = cfg.beta_grid->values.front();
  }
  if (!(beta > 0.0)) throw UsageError("--beta: probe temperature must be positive");
  auto j = std::make_shared<const DisorderTensor>(load_or_sample(cfg));
  const std::vector<double> ladder = make_ladder(beta, cfg.rungs, cp.beta_c);
  TemperingEnsemble ens(j, ladder, split_seed(cfg.seed, 4));
  const TapSolution theory = free_energy(cp, beta);
  ProbeOptions popts;
  popts.burn_in = cfg.burn_in;
  popts.bins = cfg.bins;
  popts.threads = cfg.threads;
  popts.target_q = theory.q_beta;
  const OverlapHistogram h = overlap_probe(ens, cfg.k, ladder.size() - 1, cfg.sweeps, popts);

  Table t;
  t.columns = {"kind",          "index",             "lo",                "hi",
               "count",         "acceptance",        "mean_energy",       "modal_overlap",
               "modal_abs_overlap", "high_overlap_peak", "q_beta_theory", "mass_near_target",
               "degenerate",    "unequilibrated"};
  const Cell none{};
  for (std::size_t b = 0; b < h.counts.size(); ++b)
    t.add({std::string("bin"), as_int(b), h.bin_edges[b], h.bin_edges[b + 1], static_cast<std::int64_t>(h.counts[b]),
           none, none, none, none, none, none, none, none, none});
  for (std::size_t r = 0; r < h.k; ++r)
    t.add({std::string("replica"), as_int(r), none, none, none, opt(h.replica_acceptance[r]),
           opt(h.replica_mean_energy[r]), none, none, none, none, none, none, none});
  t.add({std::string("summary"), Cell{beta}, none, none, static_cast<std::int64_t>(h.pair_count), none, none,
         h.modal_overlap, h.modal_abs_overlap, opt(h.high_overlap_peak), theory.q_beta,
         h.mass_near_target ? Cell{*h.mass_near_target} : none, h.degenerate, h.unequilibrated});
  return t;
}

}  // namespace

const char* to_string(Command c) {
  switch (c) {
    case Command::critical: return "critical";
    case Command::sweep: return "sweep";
    case Command::gstate: return "gstate";
    case Command::mc_verify: return "mc-verify";
    case Command::probe: return "probe";
    case Command::thermo: return "thermo";
  }
  return "?";
}

const std::map<std::string, double>& default_tolerances() { return kDefaultTolerances; }

double RunConfig::tolerance(const std::string& key) const {
  if (auto it = tolerances.find(key); it != tolerances.end()) return it->second;
  return kDefaultTolerances.at(key);
}

BetaGrid parse_beta_grid(const std::string& text) {
  BetaGrid grid{text, {}};
  if (text.empty()) throw UsageError("empty beta grid");
  if (text.find(':') != std::string::npos) {
    std::vector<double> parts;
    std::size_t start = 0;
    while (true) {
      const std::size_t colon = text.find(':', start);
      parts.push_back(parse_real("beta", text.substr(start, colon - start)));
      if (colon == std::string::npos) break;
      start = colon + 1;
    }
    if (parts.size() != 3) throw UsageError("expected min:max:step, got '" + text + "'");
    const double lo = parts[0], hi = parts[1], step = parts[2];
    if (!(step > 0.0) || !(hi >= lo)) throw UsageError("need step > 0 and max >= min in '" + text + "'");
    const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    for (std::size_t i = 0; i < count; ++i) grid.values.push_back(lo + static_cast<double>(i) * step);
    if (hi - grid.values.back() > 1e-9 * step) grid.values.push_back(hi);
    grid.values.back() = std::min(grid.values.back(), hi);
  } else {
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = text.find(',', start);
      grid.values.push_back(parse_real("beta", text.substr(start, comma - start)));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  }
  for (std::size_t i = 0; i < grid.values.size(); ++i) {
    if (grid.values[i] < 0.0) throw UsageError("beta values must be nonnegative");
    if (i > 0 && !(grid.values[i] > grid.values[i - 1])) throw UsageError("beta grid must be strictly increasing");
  }
  return grid;
}

RunConfig parse_config(const std::vector<std::string>& args) {
  CLI::App app{"Thermodynamics of spherical pure p-spin glasses", "pspin"};
  app.require_subcommand(1, 1);
  std::map<std::string, std::map<std::string, std::string>> values;
  std::map<std::string, std::vector<std::string>> tols;
  std::map<std::string, std::string> config_paths;
  std::map<std::string, CLI::App*> subs;
  for (const char* name : kCommands) {
    CLI::App* sub = app.add_subcommand(name);
    subs[name] = sub;
    for (const FlagSpec& f : kFlags) sub->add_option(std::string("--") + f.name, values[name][f.name], f.help);
    sub->add_option("--tol", tols[name], "tolerance override key=value (qc, gstate, grad, z)");
    sub->add_option("--config", config_paths[name], "JSON file of flag values; flags override it");
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested(app.help());
  } catch (const CLI::CallForAllHelp&) {
    throw HelpRequested(app.help("", CLI::AppFormatMode::All));
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }
  for (const auto& [name, sub] : subs) {
    if (!sub->parsed()) continue;
    RunConfig cfg;
    cfg.command = command_from(name);
    if (const char* env = std::getenv("PSPIN_SEED"); env && *env) {
      try {
        apply_value(cfg, "seed", env);
      } catch (const UsageError& e) {
        throw UsageError(std::string("PSPIN_SEED: ") + e.what());
      }
    }
    if (sub->count("--config")) apply_config_file(cfg, config_paths[name]);
    for (const FlagSpec& f : kFlags)
      if (sub->count(std::string("--") + f.name)) apply_value(cfg, f.name, values[name][f.name]);
    for (const std::string& kv : tols[name]) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw UsageError("--tol: expected key=value, got '" + kv + "'");
      apply_tolerance(cfg, kv.substr(0, eq), parse_real("tol", kv.substr(eq + 1)));
    }
    return cfg;
  }
  throw UsageError("a command is required: critical, sweep, gstate, mc-verify, probe or thermo");
}

std::string config_json(const RunConfig& cfg) {
  Json j;
  j["command"] = to_string(cfg.command);
  j["p"] = cfg.p;
  j["n"] = cfg.n;
  j["seed"] = cfg.seed;
  j["beta"] = cfg.beta_grid ? Json(cfg.beta_grid->text) : Json(nullptr);
  Json tol = Json::object();
  for (const auto& [k, v] : kDefaultTolerances) tol[k] = cfg.tolerance(k);
  j["tol"] = tol;
  j["format"] = cfg.format == Format::csv ? "csv" : "json";
  j["restarts"] = cfg.restarts;
  j["max-iters"] = cfg.max_iters;
  j["draws"] = cfg.draws;
  j["sweeps"] = cfg.sweeps;
  j["burn-in"] = cfg.burn_in;
  j["k"] = cfg.k;
  j["rungs"] = cfg.rungs;
  j["bins"] = cfg.bins;
  j["threads"] = cfg.threads;
  j["disorder-file"] = cfg.disorder_file;
  return j.dump();
}

Table compute(const RunConfig& cfg) {
  switch (cfg.command) {
    case Command::critical: return run_critical(cfg);
    case Command::sweep: return run_sweep(cfg);
    case Command::gstate: return run_gstate(cfg);
    case Command::mc_verify: return run_mc_verify(cfg);
    case Command::probe: return run_probe(cfg);
    case Command::thermo: return run_thermo(cfg);
  }
  throw UsageError("unknown command");
}

int run(const RunConfig& cfg) {
  try {
    const Table table = compute(cfg);
    emit(table, cfg.format, cfg.output_path, RunMeta{kVersion, cfg.seed, config_json(cfg)});
    return 0;
  } catch (const UsageError& e) {
    std::cerr << "pspin: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "pspin: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "pspin: " << to_string(cfg.command) << " failed: " << e.what() << '\n';
    return 1;
  }
}

int main(const std::vector<std::string>& args) {
  RunConfig cfg;
  try {
    cfg = parse_config(args);
  } catch (const HelpRequested& h) {
    std::cout << h.what();
    return 0;
  } catch (const UsageError& e) {
    std::cerr << "pspin: " << e.what() << "\nRun 'pspin --help' for usage.\n";
    return 2;
  }
  return run(cfg);
}

}  // namespace pspin::cli
