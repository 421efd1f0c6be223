#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mfbai/config.hpp"
#include "mfbai/engine.hpp"

namespace mfbai {

struct AggregateRow {
  std::string algorithm;
  double delta = 0.0;
  double mean_tau = 0.0;
  double ci95 = 0.0;  ///< 1.96 s / sqrt(n) over completed trials
  double err_rate = 0.0;
  std::size_t completed = 0;
  std::size_t aborted = 0;
};

/// records[d][i] is trial i at config.deltas[d].
struct TrialBatch {
  Algorithm algorithm;
  std::vector<std::vector<RunRecord>> records;
};

/// Runs config.runs trials of one algorithm; trial i draws from stream i of
/// config.base_seed, so the result does not depend on `workers`.
TrialBatch run_algorithm(const ExperimentConfig& config, Algorithm algorithm, std::size_t workers);

AggregateRow aggregate(std::string algorithm, double delta, std::span<const RunRecord> records);

/// One row per (algorithm, delta), sorted by algorithm tag then descending delta.
std::vector<AggregateRow> run_experiment(const ExperimentConfig& config, std::size_t workers);

void sort_rows(std::vector<AggregateRow>& rows);

/// CSV with header algorithm,delta,mean_tau,ci95,err_rate,completed,aborted and
/// six significant digits.
std::string format_csv(std::vector<AggregateRow> rows);
/// Writes format_csv(rows); throws std::system_error on I/O failure.
void write_csv(const std::vector<AggregateRow>& rows, const std::filesystem::path& path);

struct CharacteristicTimeReport {
  OracleSolution mediators;
  OracleSolution classical;
  bool strictly_harder = false;
  struct Row {
    double delta;
    double kl;
    double lower_bound_mediators;
    double lower_bound_classical;
  };
  std::vector<Row> rows;
};

CharacteristicTimeReport characteristic_time_report(const ExperimentConfig& config);

std::string format_ctime_csv(const CharacteristicTimeReport& report);
std::string format_ctime_summary(const ExperimentConfig& config,
                                 const CharacteristicTimeReport& report);

/// Writes text to a file; throws std::system_error on failure.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace mfbai
