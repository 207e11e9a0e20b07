// perqwalk: coined quantum walks on dynamically percolated 2D lattices.
//
// Subcommands:
//   evolve      time evolution (exact channel, Monte Carlo, or fixed unitary)
//   asymptotic  stationary position marginal from the attractor decomposition
//   attractors  attractor-space dimension report
//   validate    named property suites on fixed small instances
//
// Exit codes: 0 ok, 1 validation failure, 2 parse error, 3 guard violation,
// 4 certification failure.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "perqwalk/attractors.hpp"
#include "perqwalk/io.hpp"
#include "perqwalk/validation.hpp"

namespace {

constexpr const char* kVersion = "1.0.0";

struct RunConfig {
  std::string size = "3x3";
  std::string boundary_s = "periodic";
  std::string boundary_t = "periodic";
  std::string coin = "hadamard2d";
  std::string coin_file;
  double p = 0.5;
  int steps = 0;
  std::string mode = "exact";
  std::string method = "auto";
  int trials = 10000;
  std::uint64_t seed = 0;
  std::string initial;
  std::string out;
  std::string format = "json";
};

void add_lattice_flags(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--size", cfg.size, "Lattice extents as MxN");
  cmd->add_option("--boundary-s", cfg.boundary_s, "s-axis boundary")
      ->check(CLI::IsMember({"periodic", "open"}));
  cmd->add_option("--boundary-t", cfg.boundary_t, "t-axis boundary")
      ->check(CLI::IsMember({"periodic", "open"}));
}

void add_coin_flags(CLI::App* cmd, RunConfig& cfg) {
  auto* coin = cmd->add_option(
      "--coin", cfg.coin, "Coin operator: hadamard2d | grover | fourier");
  cmd->add_option("--coin-file", cfg.coin_file,
                  "JSON file with a custom 4x4 unitary coin")
      ->excludes(coin);
}

void add_output_flags(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--out", cfg.out, "Output path (stdout when omitted)");
  cmd->add_option("--format", cfg.format, "Output format")
      ->check(CLI::IsMember({"json", "csv"}));
}

perqwalk::LatticeSpec make_spec(const RunConfig& cfg) {
  return perqwalk::LatticeSpec::parse(cfg.size + ":" + cfg.boundary_s + "," +
                                      cfg.boundary_t);
}

perqwalk::CoinOperator make_coin_from(const RunConfig& cfg) {
  if (!cfg.coin_file.empty()) return perqwalk::load_coin_file(cfg.coin_file);
  return perqwalk::make_coin(perqwalk::coin_kind_from_string(cfg.coin));
}

std::string coin_name(const RunConfig& cfg) {
  return cfg.coin_file.empty() ? cfg.coin : "custom:" + cfg.coin_file;
}

void guard_dense(const perqwalk::LatticeSpec& spec) {
  if (spec.dim() > perqwalk::kDenseGuard)
    throw perqwalk::guard_error(
        "dense evolution guard: d=" + std::to_string(spec.dim()) + " > " +
        std::to_string(perqwalk::kDenseGuard));
}

void emit(const RunConfig& cfg, const perqwalk::PositionDistribution& dist,
          const nlohmann::json& meta) {
  std::ostringstream body;
  if (cfg.format == "csv")
    perqwalk::write_distribution_csv(body, dist);
  else
    perqwalk::write_distribution_json(body, dist, meta);
  if (cfg.out.empty()) {
    std::cout << body.str();
  } else {
    std::ofstream f(cfg.out, std::ios::binary);
    if (!f) throw perqwalk::parse_error("cannot open output file: " + cfg.out);
    f << body.str();
  }
}

nlohmann::json base_meta(const RunConfig& cfg,
                         const perqwalk::LatticeSpec& spec) {
  nlohmann::json meta;
  meta["version"] = kVersion;
  meta["lattice"] = spec.to_string();
  meta["coin"] = coin_name(cfg);
  meta["p"] = cfg.p;
  meta["steps"] = cfg.steps;
  meta["mode"] = cfg.mode;
  return meta;
}

int cmd_evolve(const RunConfig& cfg) {
  using namespace perqwalk;
  LatticeSpec spec = make_spec(cfg);
  CoinOperator coin = make_coin_from(cfg);
  auto [site, amps] = parse_initial_state(cfg.initial, spec);
  Vector psi0 = product_initial_state(site, amps, spec);

  nlohmann::json meta = base_meta(cfg, spec);
  PositionDistribution dist;
  if (cfg.mode == "exact") {
    guard_dense(spec);
    PercolationChannel ch(spec, coin, PercolationModel(cfg.p));
    Matrix rho = evolve_exact(ch, psi0 * psi0.adjoint(), cfg.steps);
    dist = position_marginal(rho, spec);
  } else if (cfg.mode == "unitary") {
    Vector psi = evolve_unitary(spec, coin, full_config(spec), psi0, cfg.steps);
    dist = position_marginal(psi, spec);
  } else if (cfg.mode == "mc") {
    PercolationChannel ch(spec, coin, PercolationModel(cfg.p));
    dist = evolve_mc(ch, psi0, cfg.steps, cfg.trials, cfg.seed);
    meta["trials"] = cfg.trials;
    meta["seed"] = cfg.seed;
  } else {
    throw parse_error("evolve mode must be exact, mc, or unitary");
  }
  emit(cfg, dist, meta);
  return 0;
}

int cmd_asymptotic(const RunConfig& cfg) {
  using namespace perqwalk;
  LatticeSpec spec = make_spec(cfg);
  CoinOperator coin = make_coin_from(cfg);
  if (!(cfg.p > 0.0 && cfg.p < 1.0))
    throw parse_error("asymptotic mode requires 0 < p < 1");
  guard_dense(spec);
  auto [site, amps] = parse_initial_state(cfg.initial, spec);
  Vector psi0 = product_initial_state(site, amps, spec);

  PercolationChannel ch(spec, coin, PercolationModel(cfg.p));
  CommonEigenstates ces = has_analytic_states(coin.kind)
                              ? analytic_states(coin.kind, spec)
                              : find_common_eigenstates_numeric(ch);
  AttractorBasis basis =
      complete_basis(ces, ch, spec.dim() <= kGeneralSolverGuard);

  std::string method = cfg.method;
  if (method == "auto") method = basis.certified_complete ? "fastpath" : "eq5";

  PositionDistribution dist;
  if (method == "fastpath") {
    AsymptoticDecomposition dec = decomposition(basis);
    Matrix rho = asymptotic_fastpath(dec, ch, psi0 * psi0.adjoint());
    dist = position_marginal(rho, spec);
  } else if (method == "eq5") {
    dist = asymptotic_marginal(basis, psi0);
  } else {
    throw parse_error("method must be eq5, fastpath, or auto");
  }

  nlohmann::json meta = base_meta(cfg, spec);
  meta["mode"] = "asymptotic";
  meta["method"] = method;
  meta["attractor_dimension"] = basis.dimension();
  meta["certified_complete"] = basis.certified_complete;
  emit(cfg, dist, meta);
  return 0;
}

int cmd_attractors(const RunConfig& cfg) {
  using namespace perqwalk;
  LatticeSpec spec = make_spec(cfg);
  CoinOperator coin = make_coin_from(cfg);
  double p = (cfg.p > 0.0 && cfg.p < 1.0) ? cfg.p : 0.5;

  nlohmann::json report;
  report["schema"] = 1;
  report["lattice"] = spec.to_string();
  report["coin"] = coin_name(cfg);

  PercolationChannel ch(spec, coin, PercolationModel(p));
  CommonEigenstates ces = find_common_eigenstates_numeric(ch);
  AttractorBasis basis = complete_basis(ces, ch, false);
  report["numeric_count"] = basis.dimension();
  if (coin.kind != CoinKind::custom) {
    report["analytic_count"] = analytic_dimension(spec, coin.kind);
    report["match"] = report["analytic_count"] == report["numeric_count"];
  }

  nlohmann::json eigs = nlohmann::json::array();
  for (const auto& entry : basis.entries)
    eigs.push_back({entry.lambda.real(), entry.lambda.imag()});
  report["eigenvalues"] = eigs;

  std::string body = report.dump(2) + "\n";
  if (cfg.out.empty()) {
    std::cout << body;
  } else {
    std::ofstream f(cfg.out, std::ios::binary);
    if (!f) throw parse_error("cannot open output file: " + cfg.out);
    f << body;
  }
  if (coin.kind != CoinKind::custom && !report["match"].get<bool>()) return 1;
  return 0;
}

int cmd_validate(const std::string& suite, const RunConfig& cfg) {
  auto results = perqwalk::run_validation_suite(suite);
  nlohmann::json report;
  report["schema"] = 1;
  report["suite"] = suite;
  nlohmann::json checks = nlohmann::json::array();
  bool all_ok = true;
  for (const auto& r : results) {
    checks.push_back(
        {{"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
    all_ok = all_ok && r.passed;
  }
  report["checks"] = checks;
  report["passed"] = all_ok;

  std::string body = report.dump(2) + "\n";
  if (cfg.out.empty()) {
    std::cout << body;
  } else {
    std::ofstream f(cfg.out, std::ios::binary);
    if (!f) throw perqwalk::parse_error("cannot open output file: " + cfg.out);
    f << body;
  }
  return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coined quantum walks on dynamically percolated 2D lattices"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  RunConfig cfg;
  std::string suite = "all";

  auto* evolve = app.add_subcommand("evolve", "Time evolution");
  add_lattice_flags(evolve, cfg);
  add_coin_flags(evolve, cfg);
  evolve->add_option("--p", cfg.p, "Edge presence probability");
  evolve->add_option("--steps", cfg.steps, "Number of steps")
      ->check(CLI::NonNegativeNumber);
  evolve->add_option("--mode", cfg.mode, "exact | mc | unitary")
      ->check(CLI::IsMember({"exact", "mc", "unitary"}));
  evolve->add_option("--trials", cfg.trials, "Monte Carlo trajectories")
      ->check(CLI::PositiveNumber);
  evolve->add_option("--seed", cfg.seed, "Monte Carlo master seed");
  evolve->add_option("--initial", cfg.initial, "Initial state s,t:L=...,D=...")
      ->required();
  add_output_flags(evolve, cfg);

  auto* asympt = app.add_subcommand("asymptotic", "Stationary marginal");
  add_lattice_flags(asympt, cfg);
  add_coin_flags(asympt, cfg);
  asympt->add_option("--p", cfg.p, "Edge presence probability, 0 < p < 1");
  asympt->add_option("--method", cfg.method, "eq5 | fastpath | auto")
      ->check(CLI::IsMember({"eq5", "fastpath", "auto"}));
  asympt->add_option("--initial", cfg.initial, "Initial state s,t:L=...,D=...")
      ->required();
  add_output_flags(asympt, cfg);

  auto* attract = app.add_subcommand("attractors", "Dimension report");
  add_lattice_flags(attract, cfg);
  add_coin_flags(attract, cfg);
  attract->add_option("--p", cfg.p, "Edge presence probability");
  add_output_flags(attract, cfg);

  auto* validate = app.add_subcommand("validate", "Property suites");
  validate->add_option(
      "suite", suite, "cptp | oracle | eigenstates | stationarity | pindep | all");
  add_output_flags(validate, cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (evolve->parsed()) return cmd_evolve(cfg);
    if (asympt->parsed()) return cmd_asymptotic(cfg);
    if (attract->parsed()) return cmd_attractors(cfg);
    if (validate->parsed()) return cmd_validate(suite, cfg);
  } catch (const perqwalk::guard_error& e) {
    std::cerr << "guard violation: " << e.what() << "\n";
    return 3;
  } catch (const perqwalk::certification_error& e) {
    std::cerr << "certification failure: " << e.what() << "\n";
    return 4;
  } catch (const perqwalk::parse_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
