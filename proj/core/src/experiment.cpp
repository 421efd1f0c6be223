#include "mfbai/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <system_error>
#include <thread>

namespace mfbai {

namespace {

std::string sig6(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Runs body(i) for i in [0, count) on `workers` threads. Each index writes only its own slot.
template <typename Body>
void parallel_for(std::size_t count, std::size_t workers, Body&& body) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

TrialBatch run_algorithm(const ExperimentConfig& config, Algorithm algorithm, std::size_t workers) {
  const BanditModel model = config.model();
  const MediatorSet mediators =
      algorithm == Algorithm::TaS ? dirac_mediators(model.arms()) : config.mediators();
  const EngineConfig engine = config.engine_config(algorithm);
  const double beta_c = config.effective_beta_c();

  std::vector<std::vector<RunRecord>> per_trial(config.runs);
  parallel_for(config.runs, workers, [&](std::size_t i) {
    RngStream rng(config.base_seed, i);
    per_trial[i] =
        run_trial_multi(model, mediators, engine, config.deltas, config.beta_alpha, beta_c, rng);
  });

  TrialBatch batch{algorithm, std::vector<std::vector<RunRecord>>(config.deltas.size())};
  for (std::size_t d = 0; d < config.deltas.size(); ++d) {
    batch.records[d].reserve(config.runs);
    for (std::size_t i = 0; i < config.runs; ++i) batch.records[d].push_back(per_trial[i][d]);
  }
  return batch;
}

AggregateRow aggregate(std::string algorithm, double delta, std::span<const RunRecord> records) {
  AggregateRow row;
  row.algorithm = std::move(algorithm);
  row.delta = delta;
  double sum = 0.0;
  std::size_t wrong = 0;
  for (const auto& r : records) {
    if (r.outcome != TrialOutcome::Stopped) {
      ++row.aborted;
      continue;
    }
    ++row.completed;
    sum += static_cast<double>(r.stopping_time);
    if (!r.correct) ++wrong;
  }
  if (row.completed == 0) {
    row.mean_tau = row.ci95 = row.err_rate = std::numeric_limits<double>::quiet_NaN();
    return row;
  }
  const double n = static_cast<double>(row.completed);
  row.mean_tau = sum / n;
  row.err_rate = static_cast<double>(wrong) / n;
  if (row.completed > 1) {
    double ss = 0.0;
    for (const auto& r : records) {
      if (r.outcome != TrialOutcome::Stopped) continue;
      const double dev = static_cast<double>(r.stopping_time) - row.mean_tau;
      ss += dev * dev;
    }
    row.ci95 = 1.96 * std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  return row;
}

void sort_rows(std::vector<AggregateRow>& rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const AggregateRow& a, const AggregateRow& b) {
    if (a.algorithm != b.algorithm) return a.algorithm < b.algorithm;
    return a.delta > b.delta;
  });
}

std::vector<AggregateRow> run_experiment(const ExperimentConfig& config, std::size_t workers) {
  std::vector<AggregateRow> rows;
  for (Algorithm alg : config.algorithms) {
    const TrialBatch batch = run_algorithm(config, alg, workers);
    for (std::size_t d = 0; d < config.deltas.size(); ++d) {
      rows.push_back(aggregate(std::string(to_string(alg)), config.deltas[d], batch.records[d]));
    }
  }
  sort_rows(rows);
  return rows;
}

std::string format_csv(std::vector<AggregateRow> rows) {
  sort_rows(rows);
  std::string out = "algorithm,delta,mean_tau,ci95,err_rate,completed,aborted\n";
  for (const auto& r : rows) {
    out += r.algorithm;
    out += ',' + sig6(r.delta) + ',' + sig6(r.mean_tau) + ',' + sig6(r.ci95) + ',' +
           sig6(r.err_rate) + ',' + std::to_string(r.completed) + ',' + std::to_string(r.aborted) +
           '\n';
  }
  return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::system_error(errno ? errno : EIO, std::generic_category(),
                            "cannot open " + path.string() + " for writing");
  }
  out << text;
  out.flush();
  if (!out) {
    throw std::system_error(errno ? errno : EIO, std::generic_category(),
                            "failed writing " + path.string());
  }
}

void write_csv(const std::vector<AggregateRow>& rows, const std::filesystem::path& path) {
  write_text_file(path, format_csv(rows));
}

CharacteristicTimeReport characteristic_time_report(const ExperimentConfig& config) {
  const BanditModel model = config.model();
  const MediatorSet mediators = config.mediators();
  SolverOptions options = config.solver;
  options.refine = true;

  CharacteristicTimeReport report;
  report.mediators = solve_characteristic_time(model, mediators, options);
  report.classical = solve_characteristic_time(model, dirac_mediators(model.arms()), options);
  report.strictly_harder =
      report.classical.value - report.mediators.value > 10.0 * options.tol;
  for (double delta : config.deltas) {
    const double kl = binary_kl(delta, 1.0 - delta);
    report.rows.push_back({delta, kl, kl / report.mediators.value, kl / report.classical.value});
  }
  return report;
}

std::string format_ctime_csv(const CharacteristicTimeReport& report) {
  std::string out =
      "delta,kl,t_star_mediators,t_star_classical,lower_bound_mediators,lower_bound_classical,"
      "strictly_harder\n";
  for (const auto& r : report.rows) {
    out += sig6(r.delta) + ',' + sig6(r.kl) + ',' +
           sig6(report.mediators.characteristic_time()) + ',' +
           sig6(report.classical.characteristic_time()) + ',' + sig6(r.lower_bound_mediators) +
           ',' + sig6(r.lower_bound_classical) + ',' + (report.strictly_harder ? "1" : "0") + '\n';
  }
  return out;
}

std::string format_ctime_summary(const ExperimentConfig& config,
                                 const CharacteristicTimeReport& report) {
  std::ostringstream out;
  out.precision(6);
  auto vec = [&](const std::vector<double>& v) {
    out << '(';
    for (std::size_t i = 0; i < v.size(); ++i) out << (i ? ", " : "") << v[i];
    out << ')';
  };
  out << "instance: " << (config.name.empty() ? "<unnamed>" : config.name) << ", "
      << to_string(config.family) << ", K = " << config.means.size()
      << ", E = " << config.policies.rows() << '\n';
  out << "mediators: T* = " << report.mediators.characteristic_time()
      << "  (1/T* = " << report.mediators.value << ", gap " << report.mediators.solver_gap << ")\n";
  out << "  oracle weights         ";
  vec(report.mediators.weights);
  out << "\n  induced arm proportions ";
  vec(report.mediators.induced_arm_proportions);
  out << "\nclassical: T* = " << report.classical.characteristic_time()
      << "  (1/T* = " << report.classical.value << ", gap " << report.classical.solver_gap << ")\n";
  out << "  oracle weights         ";
  vec(report.classical.weights);
  out << "\nstrictly harder than classical: " << (report.strictly_harder ? "yes" : "no") << '\n';
  return out.str();
}

}  // namespace mfbai
