#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string_view>
#include <vector>

#include "mfbai/matrix.hpp"
#include "mfbai/rng.hpp"

namespace mfbai {

/// One-parameter exponential families parameterized by their mean.
enum class Family { GaussianUnitVariance, Bernoulli };

std::string_view to_string(Family family) noexcept;

/// KL divergence d(p, q) between two members of `family` with means p and q.
/// Throws std::domain_error for non-finite inputs or Bernoulli means outside (0, 1).
double kl_divergence(Family family, double p, double q);

/// Bernoulli relative entropy kl(x, y), with x and y strictly inside (0, 1).
double binary_kl(double x, double y);

/// Generalized Jensen-Shannon divergence
///   I_alpha(mu1, mu2) = alpha d(mu1, m) + (1 - alpha) d(mu2, m),  m = alpha mu1 + (1 - alpha) mu2.
double generalized_js(Family family, double alpha, double mu1, double mu2);

namespace detail {

// Same formulas without domain checks. Bernoulli means may sit on {0, 1}, where
// 0 log 0 = 0; empirical means reach the boundary even though models may not.
double kl_unchecked(Family family, double p, double q) noexcept;
double generalized_js_unchecked(Family family, double alpha, double mu1, double mu2) noexcept;

}  // namespace detail

/// A K-armed bandit with a unique optimal arm.
class BanditModel {
 public:
  BanditModel(Family family, std::vector<double> means);

  Family family() const noexcept { return family_; }
  std::size_t arms() const noexcept { return means_.size(); }
  std::span<const double> means() const noexcept { return means_; }
  double mean(std::size_t arm) const { return means_.at(arm); }

  std::size_t best_arm() const noexcept { return best_; }
  /// mu_{a*} - mu_a.
  double gap(std::size_t arm) const { return means_[best_] - means_.at(arm); }
  std::vector<double> gaps() const;

 private:
  Family family_;
  std::vector<double> means_;
  std::size_t best_ = 0;
};

/// E x K row-stochastic matrix of mediator policies satisfying action covering
/// (every arm has positive probability under some mediator).
class MediatorSet {
 public:
  static constexpr double kRowSumTolerance = 1e-9;

  explicit MediatorSet(Matrix policies);
  MediatorSet(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t mediators() const noexcept { return policies_.rows(); }
  std::size_t arms() const noexcept { return policies_.cols(); }
  const Matrix& policies() const noexcept { return policies_; }
  std::span<const double> policy(std::size_t e) const { return policies_.row(e); }
  double operator()(std::size_t e, std::size_t a) const { return policies_(e, a); }

  /// Arm proportions induced by querying mediators with weights `omega`.
  std::vector<double> induced_arm_proportions(std::span<const double> omega) const;

 private:
  Matrix policies_;
};

/// The identity policy set: mediator a always pulls arm a.
MediatorSet dirac_mediators(std::size_t arms);

/// What a queried mediator reports back.
struct MediatorSample {
  std::size_t mediator = 0;
  std::size_t arm = 0;
  double reward = 0.0;
};

/// Draw a reward from arm `arm` of `model`.
double sample_reward(const BanditModel& model, std::size_t arm, RngStream& rng);

/// Draw an index from the categorical distribution `probabilities`.
std::size_t sample_categorical(std::span<const double> probabilities, RngStream& rng);

/// One interaction round: mediator e pulls A ~ pi_e and observes X ~ nu_A.
MediatorSample sample_step(const BanditModel& model, const MediatorSet& mediators, std::size_t e,
                           RngStream& rng);

}  // namespace mfbai
