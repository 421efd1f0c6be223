// mfbai: command line front end for the mediated best-arm identification simulator.
//
//   mfbai run <config> [--out results.csv] [--workers N] [--runs N]
//   mfbai ctime <config> [--out ctime.csv]
//   mfbai validate <config>
//
// Exit codes: 0 success, 2 config or validation error, 3 solver non-convergence,
// 4 I/O error.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <iostream>
#include <string>
#include <system_error>
#include <thread>

#include "mfbai/config.hpp"
#include "mfbai/experiment.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;
constexpr int kExitIo = 4;

mfbai::ExperimentConfig load(const std::string& path) {
  auto cfg = mfbai::parse_config(path);
  if (const auto seed = mfbai::apply_seed_override(cfg)) {
    std::cerr << "mfbai: base seed overridden by MFBAI_BASE_SEED = " << *seed << '\n';
  }
  return cfg;
}

int cmd_run(const std::string& path, const std::string& out, std::size_t workers,
            std::size_t runs) {
  auto cfg = load(path);
  if (runs > 0) cfg.runs = runs;
  const auto start = std::chrono::steady_clock::now();
  const auto rows = mfbai::run_experiment(cfg, workers);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::cerr << "mfbai: " << cfg.runs << " runs x " << cfg.algorithms.size() << " algorithms x "
            << cfg.deltas.size() << " deltas in " << secs << " s (seed " << cfg.base_seed
            << ", workers " << workers << ")\n";
  if (out.empty()) {
    std::cout << mfbai::format_csv(rows);
  } else {
    mfbai::write_csv(rows, out);
  }
  return 0;
}

int cmd_ctime(const std::string& path, const std::string& out) {
  const auto cfg = load(path);
  const auto report = mfbai::characteristic_time_report(cfg);
  std::cout << mfbai::format_ctime_summary(cfg, report);
  const auto csv = mfbai::format_ctime_csv(report);
  if (out.empty()) {
    std::cout << '\n' << csv;
  } else {
    mfbai::write_text_file(out, csv);
  }
  if (!report.mediators.converged || !report.classical.converged) {
    std::cerr << "mfbai: solver did not reach the requested tolerance (gaps "
              << report.mediators.solver_gap << ", " << report.classical.solver_gap << ")\n";
    return kExitSolver;
  }
  return 0;
}

int cmd_validate(const std::string& path) {
  const auto cfg = load(path);
  std::cout << "ok: " << path << " (K = " << cfg.means.size() << ", E = " << cfg.policies.rows()
            << ", " << cfg.algorithms.size() << " algorithms, " << cfg.deltas.size()
            << " deltas, " << cfg.runs << " runs)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Best-arm identification under mediators' feedback"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  std::size_t runs = 0;

  auto* run = app.add_subcommand("run", "Run the Monte-Carlo experiment and write aggregate CSV");
  run->add_option("config", config_path, "Experiment config file")->required();
  run->add_option("--out", out_path, "Output CSV (stdout when omitted)");
  run->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
  run->add_option("--runs", runs, "Override the number of trials per algorithm");

  auto* ctime = app.add_subcommand("ctime", "Characteristic times, oracle weights and lower bounds");
  ctime->add_option("config", config_path, "Experiment config file")->required();
  ctime->add_option("--out", out_path, "Output CSV (stdout when omitted)");

  auto* validate = app.add_subcommand("validate", "Parse and validate a config");
  validate->add_option("config", config_path, "Experiment config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return cmd_run(config_path, out_path, workers, runs);
    if (*ctime) return cmd_ctime(config_path, out_path);
    if (*validate) return cmd_validate(config_path);
  } catch (const mfbai::ConfigError& e) {
    std::cerr << "mfbai: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::system_error& e) {
    std::cerr << "mfbai: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "mfbai: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
