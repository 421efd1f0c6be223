#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mfbai/bandit.hpp"
#include "mfbai/characteristic_time.hpp"
#include "mfbai/rng.hpp"
#include "mfbai/tracking.hpp"

namespace mfbai {

enum class SamplingMode { KnownPolicies, UnknownPolicies, UniformBaseline };

std::string_view to_string(SamplingMode mode) noexcept;

struct EngineConfig {
  SamplingMode mode = SamplingMode::KnownPolicies;
  /// First oracle solve of a trial. Later solves warm-start with `warm_budget` iterations.
  SolverOptions solver{.budget = 5000, .tol = 1e-6, .refine = false};
  std::size_t warm_budget = 50;
  /// Drop repeated policy rows before tracking. Known-policy mode only.
  bool prune_duplicates = false;
  std::uint64_t max_steps = 10'000'000;
  /// Unknown-policy mode: feed these policies to the oracle instead of the
  /// empirical estimates. Diagnostic hook for comparing the two modes.
  std::optional<Matrix> pinned_policies;
};

/// Distinct policy rows (first occurrence kept) and, for each kept row, its index
/// in the original set.
struct PrunedMediators {
  MediatorSet mediators;
  std::vector<std::size_t> original_index;
};

PrunedMediators prune_duplicate_policies(const MediatorSet& mediators);

/// One Track-and-Stop agent interacting with a simulated environment. The agent
/// side reads only the observations; the model is used to draw rewards.
class TrackAndStop {
 public:
  TrackAndStop(const BanditModel& model, const MediatorSet& mediators, EngineConfig config);

  /// One interaction round. Returns the observation with the mediator index in the
  /// (possibly pruned) set the agent tracks.
  MediatorSample step(RngStream& rng);

  const TrackingState& state() const noexcept { return state_; }
  const MediatorSet& tracked_mediators() const noexcept { return tracked_.mediators; }
  std::span<const std::size_t> original_index() const noexcept { return tracked_.original_index; }

  /// Oracle weights used at the last step, before projection.
  std::span<const double> target_weights() const noexcept { return target_; }
  /// Sum of the unprojected oracle weights over all steps so far.
  std::span<const double> cumulative_target_weights() const noexcept { return cumulative_target_; }

  double glr() const;

 private:
  void update_target();

  const BanditModel* model_;
  EngineConfig config_;
  PrunedMediators tracked_;
  TrackingState state_;
  std::vector<double> target_;
  std::vector<double> cumulative_target_;
  bool solved_once_ = false;
};

enum class TrialOutcome { Stopped, BudgetExceeded };

struct RunRecord {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
  double delta = 0.0;
  TrialOutcome outcome = TrialOutcome::BudgetExceeded;
  std::uint64_t stopping_time = 0;
  std::size_t recommended_arm = 0;
  bool correct = false;

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

/// Runs one trial until Z(t) >= beta(t, delta) with every arm observed.
RunRecord run_trial(const BanditModel& model, const MediatorSet& mediators,
                    const EngineConfig& engine, const StoppingConfig& stopping, RngStream& rng);

/// Runs one trajectory and records the stopping time of every risk level in `deltas`.
/// The sampling rule does not depend on delta, so each record equals what run_trial
/// returns for that delta on the same stream. Records come back in the order of `deltas`.
std::vector<RunRecord> run_trial_multi(const BanditModel& model, const MediatorSet& mediators,
                                       const EngineConfig& engine, std::span<const double> deltas,
                                       double beta_alpha, double beta_c, RngStream& rng);

}  // namespace mfbai
