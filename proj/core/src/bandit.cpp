#include "mfbai/bandit.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

namespace mfbai {

std::string_view to_string(Family family) noexcept {
  switch (family) {
    case Family::GaussianUnitVariance:
      return "gaussian";
    case Family::Bernoulli:
      return "bernoulli";
  }
  return "unknown";
}

namespace {

void require_valid_mean(Family family, double mean, const char* what) {
  if (!std::isfinite(mean)) {
    throw std::domain_error(std::string(what) + ": non-finite mean");
  }
  if (family == Family::Bernoulli && !(mean > 0.0 && mean < 1.0)) {
    throw std::domain_error(std::string(what) + ": Bernoulli mean " + std::to_string(mean) +
                            " outside (0, 1)");
  }
}

double xlogx_ratio(double x, double y) {
  // x log(x / y) with the 0 log 0 = 0 convention.
  return x == 0.0 ? 0.0 : x * std::log(x / y);
}

}  // namespace

namespace detail {

double kl_unchecked(Family family, double p, double q) noexcept {
  if (p == q) return 0.0;
  switch (family) {
    case Family::GaussianUnitVariance:
      return 0.5 * (p - q) * (p - q);
    case Family::Bernoulli:
      return std::max(0.0, xlogx_ratio(p, q) + xlogx_ratio(1.0 - p, 1.0 - q));
  }
  return 0.0;
}

double generalized_js_unchecked(Family family, double alpha, double mu1, double mu2) noexcept {
  if (alpha <= 0.0 || alpha >= 1.0 || mu1 == mu2) return 0.0;
  if (family == Family::GaussianUnitVariance) {
    const double diff = mu1 - mu2;
    return 0.5 * alpha * (1.0 - alpha) * diff * diff;
  }
  const double m = alpha * mu1 + (1.0 - alpha) * mu2;
  return alpha * kl_unchecked(family, mu1, m) + (1.0 - alpha) * kl_unchecked(family, mu2, m);
}

}  // namespace detail

double kl_divergence(Family family, double p, double q) {
  require_valid_mean(family, p, "kl_divergence");
  require_valid_mean(family, q, "kl_divergence");
  return detail::kl_unchecked(family, p, q);
}

double binary_kl(double x, double y) {
  if (!(x > 0.0 && x < 1.0) || !(y > 0.0 && y < 1.0)) {
    throw std::domain_error("binary_kl: arguments must lie in (0, 1)");
  }
  return detail::kl_unchecked(Family::Bernoulli, x, y);
}

double generalized_js(Family family, double alpha, double mu1, double mu2) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::domain_error("generalized_js: alpha must lie in [0, 1]");
  }
  require_valid_mean(family, mu1, "generalized_js");
  require_valid_mean(family, mu2, "generalized_js");
  return detail::generalized_js_unchecked(family, alpha, mu1, mu2);
}

BanditModel::BanditModel(Family family, std::vector<double> means)
    : family_(family), means_(std::move(means)) {
  if (means_.size() < 2) throw std::invalid_argument("BanditModel: need at least 2 arms");
  for (double m : means_) require_valid_mean(family_, m, "BanditModel");
  best_ = static_cast<std::size_t>(std::max_element(means_.begin(), means_.end()) - means_.begin());
  for (std::size_t a = 0; a < means_.size(); ++a) {
    if (a != best_ && means_[a] == means_[best_]) {
      throw std::invalid_argument("BanditModel: optimal arm is not unique (arms " +
                                  std::to_string(best_) + " and " + std::to_string(a) + ")");
    }
  }
}

std::vector<double> BanditModel::gaps() const {
  std::vector<double> out(means_.size());
  for (std::size_t a = 0; a < means_.size(); ++a) out[a] = means_[best_] - means_[a];
  return out;
}

namespace {

Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t cols = rows.size() == 0 ? 0 : rows.begin()->size();
  Matrix m(rows.size(), cols);
  std::size_t r = 0;
  for (const auto& row : rows) {
    if (row.size() != cols) throw std::invalid_argument("MediatorSet: ragged policy rows");
    std::copy(row.begin(), row.end(), m.row(r).begin());
    ++r;
  }
  return m;
}

}  // namespace

MediatorSet::MediatorSet(Matrix policies) : policies_(std::move(policies)) {
  const std::size_t rows = policies_.rows();
  const std::size_t cols = policies_.cols();
  if (rows == 0) throw std::invalid_argument("MediatorSet: no mediators");
  if (cols < 2) throw std::invalid_argument("MediatorSet: need at least 2 arms");
  for (std::size_t e = 0; e < rows; ++e) {
    double sum = 0.0;
    for (std::size_t a = 0; a < cols; ++a) {
      const double p = policies_(e, a);
      if (!(p >= 0.0 && p <= 1.0)) {
        std::ostringstream msg;
        msg << "MediatorSet: policy " << e << " has entry " << p << " outside [0, 1] at arm " << a;
        throw std::invalid_argument(msg.str());
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "MediatorSet: policy " << e << " sums to " << sum << ", not 1";
      throw std::invalid_argument(msg.str());
    }
  }
  for (std::size_t a = 0; a < cols; ++a) {
    bool covered = false;
    for (std::size_t e = 0; e < rows && !covered; ++e) covered = policies_(e, a) > 0.0;
    if (!covered) {
      throw std::invalid_argument("MediatorSet: action covering violated, arm " +
                                  std::to_string(a) + " is never played by any mediator");
    }
  }
}

MediatorSet::MediatorSet(std::initializer_list<std::initializer_list<double>> rows)
    : MediatorSet(from_rows(rows)) {}

std::vector<double> MediatorSet::induced_arm_proportions(std::span<const double> omega) const {
  if (omega.size() != mediators()) {
    throw std::invalid_argument("induced_arm_proportions: weight vector has wrong length");
  }
  std::vector<double> out(arms(), 0.0);
  for (std::size_t e = 0; e < mediators(); ++e) {
    if (omega[e] == 0.0) continue;
    const auto row = policies_.row(e);
    for (std::size_t a = 0; a < arms(); ++a) out[a] += omega[e] * row[a];
  }
  return out;
}

MediatorSet dirac_mediators(std::size_t arms) {
  if (arms < 2) throw std::invalid_argument("dirac_mediators: need at least 2 arms");
  Matrix m(arms, arms);
  for (std::size_t a = 0; a < arms; ++a) m(a, a) = 1.0;
  return MediatorSet(std::move(m));
}

double sample_reward(const BanditModel& model, std::size_t arm, RngStream& rng) {
  const double mean = model.mean(arm);
  switch (model.family()) {
    case Family::GaussianUnitVariance:
      return mean + rng.normal();
    case Family::Bernoulli:
      return rng.uniform() < mean ? 1.0 : 0.0;
  }
  return mean;
}

std::size_t sample_categorical(std::span<const double> probabilities, RngStream& rng) {
  const double u = rng.uniform();
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    if (probabilities[i] <= 0.0) continue;
    cumulative += probabilities[i];
    last_positive = i;
    if (u < cumulative) return i;
  }
  // Rounding left u above the accumulated mass.
  return last_positive;
}

MediatorSample sample_step(const BanditModel& model, const MediatorSet& mediators, std::size_t e,
                           RngStream& rng) {
  if (mediators.arms() != model.arms()) {
    throw std::invalid_argument("sample_step: model and mediators disagree on the arm count");
  }
  if (e >= mediators.mediators()) throw std::out_of_range("sample_step: mediator index out of range");
  MediatorSample s;
  s.mediator = e;
  s.arm = sample_categorical(mediators.policy(e), rng);
  s.reward = sample_reward(model, s.arm, rng);
  return s;
}

}  // namespace mfbai
