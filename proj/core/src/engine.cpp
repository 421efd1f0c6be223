#include "mfbai/engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mfbai {

std::string_view to_string(SamplingMode mode) noexcept {
  switch (mode) {
    case SamplingMode::KnownPolicies:
      return "known";
    case SamplingMode::UnknownPolicies:
      return "unknown";
    case SamplingMode::UniformBaseline:
      return "uniform";
  }
  return "unknown-mode";
}

PrunedMediators prune_duplicate_policies(const MediatorSet& mediators) {
  constexpr double kSameRow = 1e-12;
  const std::size_t k = mediators.arms();
  std::vector<std::size_t> kept;
  for (std::size_t e = 0; e < mediators.mediators(); ++e) {
    const auto row = mediators.policy(e);
    const bool duplicate = std::any_of(kept.begin(), kept.end(), [&](std::size_t f) {
      const auto other = mediators.policy(f);
      for (std::size_t a = 0; a < k; ++a) {
        if (std::abs(row[a] - other[a]) > kSameRow) return false;
      }
      return true;
    });
    if (!duplicate) kept.push_back(e);
  }
  Matrix m(kept.size(), k);
  for (std::size_t i = 0; i < kept.size(); ++i) {
    std::copy(mediators.policy(kept[i]).begin(), mediators.policy(kept[i]).end(), m.row(i).begin());
  }
  return PrunedMediators{MediatorSet(std::move(m)), std::move(kept)};
}

namespace {

PrunedMediators tracked_set(const MediatorSet& mediators, const EngineConfig& config) {
  if (config.prune_duplicates && config.mode == SamplingMode::KnownPolicies) {
    return prune_duplicate_policies(mediators);
  }
  std::vector<std::size_t> identity(mediators.mediators());
  std::iota(identity.begin(), identity.end(), std::size_t{0});
  return PrunedMediators{mediators, std::move(identity)};
}

}  // namespace

TrackAndStop::TrackAndStop(const BanditModel& model, const MediatorSet& mediators,
                           EngineConfig config)
    : model_(&model),
      config_(std::move(config)),
      tracked_(tracked_set(mediators, config_)),
      state_(tracked_.mediators.mediators(), model.arms()),
      target_(tracked_.mediators.mediators(), 1.0 / static_cast<double>(tracked_.mediators.mediators())),
      cumulative_target_(tracked_.mediators.mediators(), 0.0) {
  if (mediators.arms() != model.arms()) {
    throw std::invalid_argument("TrackAndStop: model and mediators disagree on the arm count");
  }
  if (config_.pinned_policies) {
    const auto& p = *config_.pinned_policies;
    if (p.rows() != tracked_.mediators.mediators() || p.cols() != model.arms()) {
      throw std::invalid_argument("TrackAndStop: pinned policies have the wrong shape");
    }
  }
}

void TrackAndStop::update_target() {
  const std::size_t n = tracked_.mediators.mediators();
  const auto best = state_.empirical_best();
  // Until every arm has been seen, and on ties for the top, keep the previous target
  // (uniform at the start): the oracle problem is undefined there.
  if (!state_.all_arms_observed() || !best) return;

  Matrix estimated;
  const Matrix* policies = &tracked_.mediators.policies();
  if (config_.mode == SamplingMode::UnknownPolicies) {
    if (config_.pinned_policies) {
      policies = &*config_.pinned_policies;
    } else {
      estimated = update_policy_estimates(state_);
      policies = &estimated;
    }
  }
  if (n == 1) return;

  MaxMinObjective objective(model_->family(), state_.mean_estimates(), *best, *policies);
  if (!solved_once_) {
    const std::vector<double> uniform(n, 1.0 / static_cast<double>(n));
    target_ = mirror_ascent(objective, uniform, config_.solver.budget);
    solved_once_ = true;
  } else {
    target_ = mirror_ascent(objective, target_, config_.warm_budget);
  }
}

MediatorSample TrackAndStop::step(RngStream& rng) {
  const std::size_t n = tracked_.mediators.mediators();
  std::size_t e = 0;
  if (config_.mode == SamplingMode::UniformBaseline) {
    const std::vector<double> uniform(n, 1.0 / static_cast<double>(n));
    state_.add_weights(uniform);
    for (std::size_t i = 0; i < n; ++i) cumulative_target_[i] += uniform[i];
    e = rng.uniform_index(n);
  } else {
    update_target();
    for (std::size_t i = 0; i < n; ++i) cumulative_target_[i] += target_[i];
    const auto projected = project_weights(target_, epsilon_t(n, state_.t()));
    e = select_mediator(state_, projected);
  }
  MediatorSample sample = sample_step(*model_, tracked_.mediators, e, rng);
  state_.record(sample);
  return sample;
}

double TrackAndStop::glr() const {
  return state_.all_arms_observed() ? glr_statistic(state_, model_->family()) : 0.0;
}

RunRecord run_trial(const BanditModel& model, const MediatorSet& mediators,
                    const EngineConfig& engine, const StoppingConfig& stopping, RngStream& rng) {
  stopping.validate();
  const double deltas[] = {stopping.delta};
  return run_trial_multi(model, mediators, engine, deltas, stopping.beta_alpha, stopping.beta_c,
                         rng)
      .front();
}

std::vector<RunRecord> run_trial_multi(const BanditModel& model, const MediatorSet& mediators,
                                       const EngineConfig& engine, std::span<const double> deltas,
                                       double beta_alpha, double beta_c, RngStream& rng) {
  std::vector<RunRecord> records(deltas.size());
  std::vector<StoppingConfig> stops(deltas.size());
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    stops[i] = StoppingConfig{deltas[i], beta_alpha, beta_c};
    stops[i].validate();
    records[i].seed = rng.seed();
    records[i].stream_id = rng.stream_id();
    records[i].delta = deltas[i];
  }
  // Larger delta means a lower threshold, so pending levels stop in this order.
  std::vector<std::size_t> pending(deltas.size());
  std::iota(pending.begin(), pending.end(), std::size_t{0});
  std::stable_sort(pending.begin(), pending.end(),
                   [&](std::size_t a, std::size_t b) { return deltas[a] > deltas[b]; });

  TrackAndStop agent(model, mediators, engine);
  std::size_t next = 0;
  while (next < pending.size() && agent.state().t() < engine.max_steps) {
    agent.step(rng);
    const auto& state = agent.state();
    if (!state.all_arms_observed()) continue;
    const double z = glr_statistic(state, model.family());
    while (next < pending.size() && z >= beta_threshold(stops[pending[next]], state.t())) {
      RunRecord& r = records[pending[next]];
      r.outcome = TrialOutcome::Stopped;
      r.stopping_time = state.t();
      r.recommended_arm = state.recommendation();
      r.correct = r.recommended_arm == model.best_arm();
      ++next;
    }
  }
  for (std::size_t i = next; i < pending.size(); ++i) {
    RunRecord& r = records[pending[i]];
    r.outcome = TrialOutcome::BudgetExceeded;
    r.stopping_time = agent.state().t();
    r.recommended_arm = agent.state().recommendation();
    r.correct = false;
  }
  return records;
}

}  // namespace mfbai
