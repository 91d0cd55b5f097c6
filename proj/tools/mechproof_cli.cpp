// Command-line front end: single solves, mechanism verification, parameter
// sweeps, and named reproduction suites.
//
// Exit codes: 0 success, 1 bad configuration or input, 2 no feasible
// mechanism, 3 verification or trend-assertion failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mechproof/config.hpp"
#include "mechproof/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitBadInput = 1;
constexpr int kExitNoMechanism = 2;
constexpr int kExitFail = 3;

mechproof::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw mechproof::ConfigError("cannot open file: " + path);
  try {
    return mechproof::json::parse(in);
  } catch (const mechproof::json::parse_error& e) {
    throw mechproof::ConfigError("parse error in " + path + ": " + e.what());
  }
}

int cmd_solve(const std::string& config_path) {
  const auto cfg = mechproof::load_config(config_path);
  if (cfg.sweep) {
    throw mechproof::ConfigError("sweep: axes are not allowed for solve; use the sweep command");
  }
  auto search = cfg.search_config();
  long n_max_used = search.n_max;
  const auto report = mechproof::solve_with_escalation(
      cfg.profile(), cfg.cost_model(), cfg.revenue_model(), search, cfg.search.auto_escalate,
      &n_max_used);
  auto used = search;
  used.n_max = n_max_used;
  std::cout << mechproof::mechanism_to_json(report, used).dump(2) << "\n";
  return report.status == mechproof::SolveReport<double>::Status::ok ? kExitOk
                                                                     : kExitNoMechanism;
}

int cmd_verify(const std::string& config_path, const std::string& mechanism_path) {
  const auto cfg = mechproof::load_config(config_path);
  const auto mech = mechproof::mechanism_from_json(read_json_file(mechanism_path), cfg);
  const auto report =
      mechproof::verify(cfg.profile(), cfg.cost_model(), mech, cfg.verify_options());
  std::cout << mechproof::report_to_json(report).dump(2) << "\n";
  return report.pass ? kExitOk : kExitFail;
}

int cmd_sweep(const std::string& config_path, const std::string& out_path) {
  const auto cfg = mechproof::load_config(config_path);
  const auto result = mechproof::run_sweep(cfg);
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw mechproof::ConfigError("cannot open output file: " + out_path);
  out << result.csv;
  std::cerr << "wrote " << result.rows.size() << " rows to " << out_path << "\n";
  return kExitOk;
}

int cmd_repro(const std::string& suite, const std::string& out_dir) {
  const auto result = mechproof::run_repro(suite);
  std::filesystem::create_directories(out_dir);
  for (const auto& [name, contents] : result.files) {
    const auto path = std::filesystem::path(out_dir) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw mechproof::ConfigError("cannot open output file: " + path.string());
    out << contents;
  }
  std::string summary;
  bool all_pass = true;
  for (const auto& check : result.checks) {
    all_pass &= check.pass;
    summary += std::string(check.pass ? "PASS" : "FAIL") + "  " + check.name;
    if (!check.detail.empty()) summary += "  (" + check.detail + ")";
    summary += '\n';
  }
  {
    const auto path = std::filesystem::path(out_dir) / (result.suite + "_summary.txt");
    std::ofstream out(path, std::ios::binary);
    out << summary;
  }
  std::cout << summary;
  return all_pass ? kExitOk : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"requestor-optimal crowdsourcing mechanism designer and verifier"};
  app.require_subcommand(1);

  std::string config_path, mechanism_path, out_path, suite;

  auto* solve = app.add_subcommand("solve", "compute the optimal mechanism for a config");
  solve->add_option("--config", config_path, "config JSON file")->required();

  auto* verify = app.add_subcommand("verify", "stress a mechanism against all deviations");
  verify->add_option("--config", config_path, "config JSON file")->required();
  verify->add_option("--mechanism", mechanism_path, "mechanism JSON file")->required();

  auto* sweep = app.add_subcommand("sweep", "solve a parameter grid and emit CSV");
  sweep->add_option("--config", config_path, "config JSON file with sweep axes")->required();
  sweep->add_option("--out", out_path, "output CSV path")->required();

  auto* repro = app.add_subcommand("repro", "run a named reproduction suite");
  repro->add_option("--suite", suite, "one of fig2a, fig2b, footnote_lying, fig3a, fig3b, ntable")
      ->required();
  repro->add_option("--out", out_path, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return cmd_solve(config_path);
    if (verify->parsed()) return cmd_verify(config_path, mechanism_path);
    if (sweep->parsed()) return cmd_sweep(config_path, out_path);
    if (repro->parsed()) return cmd_repro(suite, out_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  }
  return kExitBadInput;
}
