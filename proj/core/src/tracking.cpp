#include "mfbai/tracking.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "mfbai/characteristic_time.hpp"

namespace mfbai {

double epsilon_t(std::size_t mediators, std::uint64_t t) {
  const double e = static_cast<double>(mediators);
  return 0.5 / std::sqrt(e * e + static_cast<double>(t));
}

std::vector<double> project_weights(std::span<const double> omega, double eps) {
  const std::size_t n = omega.size();
  if (n == 0) throw std::invalid_argument("project_weights: empty weight vector");
  if (eps * static_cast<double>(n) > 1.0 + 1e-12) {
    throw std::invalid_argument("project_weights: eps exceeds 1/E, the floored simplex is empty");
  }
  std::vector<double> out(omega.begin(), omega.end());
  double missing = 0.0;
  std::vector<double> slack;
  for (std::size_t i = 0; i < n; ++i) {
    if (out[i] < eps) {
      missing += eps - out[i];
      out[i] = eps;
    } else {
      slack.push_back(out[i] - eps);
    }
  }
  if (missing == 0.0) return out;

  // Water level theta with sum_i min(slack_i, theta) = missing.
  std::sort(slack.begin(), slack.end());
  double remaining = missing;
  double theta = 0.0;
  for (std::size_t k = 0; k < slack.size(); ++k) {
    const double count = static_cast<double>(slack.size() - k);
    const double level = remaining / count;
    if (level <= slack[k]) {
      theta = level;
      break;
    }
    remaining -= slack[k];
    theta = slack[k];
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (omega[i] >= eps) out[i] = eps + std::max(0.0, (omega[i] - eps) - theta);
  }
  return out;
}

StoppingConfig StoppingConfig::with_defaults(double delta, std::size_t arms) {
  return StoppingConfig{delta, kDefaultBetaAlpha, static_cast<double>(arms) - 1.0};
}

void StoppingConfig::validate() const {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("stopping: delta outside (0, 1)");
  if (!(beta_alpha > 1.0)) throw std::invalid_argument("stopping: beta_alpha must exceed 1");
  if (!(beta_c > 0.0)) throw std::invalid_argument("stopping: beta_c must be positive");
}

double beta_threshold(const StoppingConfig& cfg, std::uint64_t t) {
  return std::log(cfg.beta_c) + cfg.beta_alpha * std::log(static_cast<double>(t)) -
         std::log(cfg.delta);
}

TrackingState::TrackingState(std::size_t mediators, std::size_t arms)
    : mediator_counts_(mediators, 0),
      arm_counts_(arms, 0),
      joint_counts_(mediators * arms, 0),
      reward_sums_(arms, 0.0),
      cumulative_weights_(mediators, 0.0),
      mean_estimates_(arms, 0.0),
      unobserved_arms_(arms) {}

std::optional<std::size_t> TrackingState::empirical_best() const {
  const std::size_t best = recommendation();
  for (std::size_t a = 0; a < arms(); ++a) {
    if (a != best && mean_estimates_[a] == mean_estimates_[best]) return std::nullopt;
  }
  return best;
}

std::size_t TrackingState::recommendation() const {
  return static_cast<std::size_t>(
      std::max_element(mean_estimates_.begin(), mean_estimates_.end()) - mean_estimates_.begin());
}

void TrackingState::add_weights(std::span<const double> projected) {
  for (std::size_t e = 0; e < mediators(); ++e) cumulative_weights_[e] += projected[e];
}

void TrackingState::record(const MediatorSample& sample) {
  if (sample.mediator >= mediators() || sample.arm >= arms()) {
    throw std::out_of_range("TrackingState::record: index out of range");
  }
  ++t_;
  ++mediator_counts_[sample.mediator];
  ++joint_counts_[sample.mediator * arms() + sample.arm];
  if (arm_counts_[sample.arm]++ == 0) --unobserved_arms_;
  reward_sums_[sample.arm] += sample.reward;
  mean_estimates_[sample.arm] =
      reward_sums_[sample.arm] / static_cast<double>(arm_counts_[sample.arm]);
}

void TrackingState::check_invariants() const {
  auto fail = [](const std::string& what) { throw std::logic_error("TrackingState: " + what); };
  if (std::accumulate(mediator_counts_.begin(), mediator_counts_.end(), std::uint64_t{0}) != t_) {
    fail("mediator counts do not sum to t");
  }
  if (std::accumulate(arm_counts_.begin(), arm_counts_.end(), std::uint64_t{0}) != t_) {
    fail("arm counts do not sum to t");
  }
  for (std::size_t e = 0; e < mediators(); ++e) {
    std::uint64_t row = 0;
    for (std::size_t a = 0; a < arms(); ++a) row += joint_count(e, a);
    if (row != mediator_counts_[e]) fail("joint count row sum mismatch");
  }
  for (std::size_t a = 0; a < arms(); ++a) {
    std::uint64_t col = 0;
    for (std::size_t e = 0; e < mediators(); ++e) col += joint_count(e, a);
    if (col != arm_counts_[a]) fail("joint count column sum mismatch");
    if (arm_counts_[a] > 0 &&
        mean_estimates_[a] != reward_sums_[a] / static_cast<double>(arm_counts_[a])) {
      fail("mean estimate out of sync");
    }
  }
  const double weight_total =
      std::accumulate(cumulative_weights_.begin(), cumulative_weights_.end(), 0.0);
  if (std::abs(weight_total - static_cast<double>(t_)) > 1e-6) {
    std::ostringstream msg;
    msg << "cumulative weights sum to " << weight_total << " at t = " << t_;
    fail(msg.str());
  }
}

std::size_t select_mediator(TrackingState& state, std::span<const double> projected_omega) {
  if (projected_omega.size() != state.mediators()) {
    throw std::invalid_argument("select_mediator: weight vector has wrong length");
  }
  state.add_weights(projected_omega);
  const auto cum = state.cumulative_weights();
  const auto counts = state.mediator_counts();
  std::size_t best = 0;
  double best_deficit = -std::numeric_limits<double>::infinity();
  for (std::size_t e = 0; e < state.mediators(); ++e) {
    const double deficit = cum[e] - static_cast<double>(counts[e]);
    if (deficit > best_deficit) {
      best_deficit = deficit;
      best = e;
    }
  }
  return best;
}

double glr_statistic(const TrackingState& state, Family family) {
  if (!state.all_arms_observed()) {
    throw std::logic_error("glr_statistic: some arm has no observation yet");
  }
  const auto best = state.empirical_best();
  if (!best) return 0.0;
  const auto mu = state.mean_estimates();
  const auto counts = state.arm_counts();
  const std::size_t b = *best;
  double z = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < state.arms(); ++a) {
    if (a == b) continue;
    z = std::min(z, pairwise_alt_value(family, mu[b], mu[a], static_cast<double>(counts[b]),
                                       static_cast<double>(counts[a])));
  }
  return z;
}

Matrix update_policy_estimates(const TrackingState& state) {
  const std::size_t k = state.arms();
  Matrix out(state.mediators(), k);
  for (std::size_t e = 0; e < state.mediators(); ++e) {
    const auto n = state.mediator_counts()[e];
    for (std::size_t a = 0; a < k; ++a) {
      out(e, a) = n == 0 ? 1.0 / static_cast<double>(k)
                         : static_cast<double>(state.joint_count(e, a)) / static_cast<double>(n);
    }
  }
  return out;
}

}  // namespace mfbai
