#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mfbai/bandit.hpp"
#include "mfbai/characteristic_time.hpp"
#include "mfbai/engine.hpp"

namespace mfbai {

enum class Algorithm { TaS, TaSMediatorsKnown, TaSMediatorsUnknown, Uniform };

/// Tags used in configs and CSV output: TaS, TaS-MF-k, TaS-MF-u, Uniform.
std::string_view to_string(Algorithm algorithm) noexcept;
std::optional<Algorithm> algorithm_from_string(std::string_view tag) noexcept;

/// Raised for malformed or invalid experiment configs. `line` is 0 when the
/// problem is not tied to a single line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string source, std::size_t line, const std::string& message);
  const std::string& source() const noexcept { return source_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string source_;
  std::size_t line_;
};

struct ExperimentConfig {
  std::string name;
  Family family = Family::GaussianUnitVariance;
  std::vector<double> means;
  Matrix policies;
  std::vector<Algorithm> algorithms;
  std::vector<double> deltas;
  std::size_t runs = 100;
  std::uint64_t base_seed = 0;
  double beta_alpha = kDefaultBetaAlpha;
  std::optional<double> beta_c;  ///< defaults to K - 1
  SolverOptions solver{.budget = 5000, .tol = 1e-6, .refine = false};
  std::size_t warm_budget = 50;
  bool prune_duplicates = false;
  std::uint64_t max_steps = 10'000'000;

  BanditModel model() const { return BanditModel(family, means); }
  MediatorSet mediators() const { return MediatorSet(policies); }
  double effective_beta_c() const;
  EngineConfig engine_config(Algorithm algorithm) const;
};

/// Parses the flat `key = value` format. Comments start with '#'; each `policy`
/// line adds one mediator row. Throws ConfigError with the offending line.
ExperimentConfig parse_config_text(std::string_view text, std::string_view source = "<config>");
/// Throws std::system_error when the file cannot be read.
ExperimentConfig parse_config(const std::filesystem::path& path);

/// Checks every cross-field invariant; throws ConfigError naming the violation.
void validate_config(const ExperimentConfig& config, std::string_view source = "<config>");

/// Applies MFBAI_BASE_SEED from the environment, if set. Returns the overriding seed.
std::optional<std::uint64_t> apply_seed_override(ExperimentConfig& config);

}  // namespace mfbai
