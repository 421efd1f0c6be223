#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mfbai/bandit.hpp"
#include "mfbai/matrix.hpp"

namespace mfbai {

/// Forced-exploration floor (E^2 + t)^{-1/2} / 2.
double epsilon_t(std::size_t mediators, std::uint64_t t);

/// L-infinity projection of a simplex point onto {w in simplex : w_i >= eps}.
/// Deficient coordinates are raised to eps and the added mass is removed by
/// water-filling from the coordinates above eps, which keeps the largest
/// removal as small as possible. Throws std::invalid_argument if eps > 1/E.
std::vector<double> project_weights(std::span<const double> omega, double eps);

/// Largest threshold exponent covered by the asymptotic optimality guarantees.
inline constexpr double kDefaultBetaAlpha = 1.3591409142295225;  // e / 2

/// Threshold parameters for beta(t, delta) = log(C t^alpha / delta).
struct StoppingConfig {
  double delta = 0.1;
  double beta_alpha = kDefaultBetaAlpha;
  double beta_c = 1.0;

  /// Defaults alpha = e/2 and C = K - 1.
  static StoppingConfig with_defaults(double delta, std::size_t arms);
  void validate() const;
};

double beta_threshold(const StoppingConfig& cfg, std::uint64_t t);

/// Counts and running estimates of one trial.
class TrackingState {
 public:
  TrackingState(std::size_t mediators, std::size_t arms);

  std::size_t mediators() const noexcept { return mediator_counts_.size(); }
  std::size_t arms() const noexcept { return arm_counts_.size(); }
  std::uint64_t t() const noexcept { return t_; }

  std::span<const std::uint64_t> mediator_counts() const noexcept { return mediator_counts_; }
  std::span<const std::uint64_t> arm_counts() const noexcept { return arm_counts_; }
  std::uint64_t joint_count(std::size_t e, std::size_t a) const { return joint_counts_[e * arms() + a]; }
  std::span<const double> reward_sums() const noexcept { return reward_sums_; }
  std::span<const double> cumulative_weights() const noexcept { return cumulative_weights_; }
  /// Empirical means; zero for arms without observations.
  std::span<const double> mean_estimates() const noexcept { return mean_estimates_; }

  bool all_arms_observed() const noexcept { return unobserved_arms_ == 0; }
  /// Unique argmax of the empirical means, or nothing on a tie at the top.
  std::optional<std::size_t> empirical_best() const;
  /// argmax of the empirical means, lowest index on ties.
  std::size_t recommendation() const;

  void add_weights(std::span<const double> projected);
  void record(const MediatorSample& sample);

  /// Throws std::logic_error when a count identity or estimate is inconsistent.
  void check_invariants() const;

 private:
  std::uint64_t t_ = 0;
  std::vector<std::uint64_t> mediator_counts_;
  std::vector<std::uint64_t> arm_counts_;
  std::vector<std::uint64_t> joint_counts_;
  std::vector<double> reward_sums_;
  std::vector<double> cumulative_weights_;
  std::vector<double> mean_estimates_;
  std::size_t unobserved_arms_;
};

/// C-tracking: adds `projected_omega` to the cumulative weights and returns
/// argmax_e (cumulative_e - N_e), lowest index on ties.
std::size_t select_mediator(TrackingState& state, std::span<const double> projected_omega);

/// GLR statistic Z(t) = t g(mu_hat, N^A / t) in pairwise form. Zero on a tie for the
/// empirical best arm. Throws std::logic_error if some arm has no observation.
double glr_statistic(const TrackingState& state, Family family);

/// Empirical policies N_{e,a} / N_e; rows of unqueried mediators are uniform.
Matrix update_policy_estimates(const TrackingState& state);

}  // namespace mfbai
