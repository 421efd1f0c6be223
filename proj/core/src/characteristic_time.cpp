#include "mfbai/characteristic_time.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "matrix_game.hpp"

namespace mfbai {

namespace {

constexpr double kTieTolerance = 1e-12;

void require_simplex(std::span<const double> w, std::size_t expected, const char* what) {
  if (w.size() != expected) throw std::invalid_argument(std::string(what) + ": wrong length");
  double sum = 0.0;
  for (double v : w) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument(std::string(what) + ": negative or non-finite weight");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument(std::string(what) + ": weights do not sum to 1");
  }
}

}  // namespace

double pairwise_alt_value(Family family, double mu_best, double mu_challenger, double w_best,
                          double w_challenger) noexcept {
  const double total = w_best + w_challenger;
  if (!(total > 0.0)) return 0.0;
  return total * detail::generalized_js_unchecked(family, w_best / total, mu_best, mu_challenger);
}

AltInfimumBreakdown alt_infimum(const BanditModel& model, std::span<const double> arm_weights) {
  require_simplex(arm_weights, model.arms(), "alt_infimum");
  AltInfimumBreakdown out;
  const std::size_t best = model.best_arm();
  out.value = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < model.arms(); ++a) {
    if (a == best) continue;
    const double v = pairwise_alt_value(model.family(), model.mean(best), model.mean(a),
                                        arm_weights[best], arm_weights[a]);
    out.candidates.push_back({a, v});
    if (v < out.value) {
      out.value = v;
      out.argmin_arm = a;
    }
  }
  return out;
}

double g_value(const BanditModel& model, std::span<const double> arm_proportions) {
  return alt_infimum(model, arm_proportions).value;
}

double g_value(Family family, std::span<const double> means, std::size_t best,
               std::span<const double> arm_proportions) noexcept {
  double value = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < means.size(); ++a) {
    if (a == best) continue;
    value = std::min(value, pairwise_alt_value(family, means[best], means[a],
                                               arm_proportions[best], arm_proportions[a]));
  }
  return value;
}

// ---------------------------------------------------------------------------------------
// MaxMinObjective

MaxMinObjective::MaxMinObjective(Family family, std::span<const double> means, std::size_t best,
                                 const Matrix& policies)
    : family_(family), means_(means.begin(), means.end()), best_(best), policies_(&policies) {
  if (policies.cols() != means_.size()) {
    throw std::invalid_argument("MaxMinObjective: policy matrix and means disagree on K");
  }
  if (best_ >= means_.size()) throw std::out_of_range("MaxMinObjective: reference arm");
}

void MaxMinObjective::arm_masses(std::span<const double> omega, std::span<double> mass) const {
  std::fill(mass.begin(), mass.end(), 0.0);
  for (std::size_t e = 0; e < policies_->rows(); ++e) {
    if (omega[e] == 0.0) continue;
    const auto row = policies_->row(e);
    for (std::size_t a = 0; a < mass.size(); ++a) mass[a] += omega[e] * row[a];
  }
}

// Gradient of (x_b, x_a) -> (x_b + x_a) I(mu_b, mu_a) is (d(mu_b, m), d(mu_a, m)) with
// m the weighted mean (envelope theorem). Chained through x = pi^T omega.
void MaxMinObjective::term_coefficients(std::size_t challenger, double x_best, double x_chal,
                                        std::span<double> coeffs) const {
  const double mu_b = means_[best_];
  const double mu_a = means_[challenger];
  const double total = x_best + x_chal;
  const double m = total > 0.0 ? (x_best * mu_b + x_chal * mu_a) / total : 0.5 * (mu_b + mu_a);
  const double d_best = detail::kl_unchecked(family_, mu_b, m);
  const double d_chal = detail::kl_unchecked(family_, mu_a, m);
  for (std::size_t e = 0; e < policies_->rows(); ++e) {
    coeffs[e] = (*policies_)(e, best_) * d_best + (*policies_)(e, challenger) * d_chal;
  }
}

double MaxMinObjective::value(std::span<const double> omega) const {
  std::vector<double> mass(means_.size());
  arm_masses(omega, mass);
  return g_value(family_, means_, best_, mass);
}

double MaxMinObjective::value_and_supergradient(std::span<const double> omega,
                                                std::span<double> grad) const {
  const std::size_t k = means_.size();
  std::vector<double> mass(k);
  arm_masses(omega, mass);
  std::vector<double> terms(k, std::numeric_limits<double>::infinity());
  double fmin = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < k; ++a) {
    if (a == best_) continue;
    terms[a] = pairwise_alt_value(family_, means_[best_], means_[a], mass[best_], mass[a]);
    fmin = std::min(fmin, terms[a]);
  }
  std::fill(grad.begin(), grad.end(), 0.0);
  std::vector<double> coeffs(policies_->rows());
  std::size_t active = 0;
  for (std::size_t a = 0; a < k; ++a) {
    if (a == best_ || terms[a] > fmin + kTieTolerance) continue;
    term_coefficients(a, mass[best_], mass[a], coeffs);
    for (std::size_t e = 0; e < grad.size(); ++e) grad[e] += coeffs[e];
    ++active;
  }
  for (double& g : grad) g /= static_cast<double>(active);
  return fmin;
}

double MaxMinObjective::best_response(std::span<const double> omega,
                                      std::span<double> coeffs) const {
  const std::size_t k = means_.size();
  std::vector<double> mass(k);
  arm_masses(omega, mass);
  std::size_t arg = k;
  double fmin = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < k; ++a) {
    if (a == best_) continue;
    const double v = pairwise_alt_value(family_, means_[best_], means_[a], mass[best_], mass[a]);
    if (v < fmin) {
      fmin = v;
      arg = a;
    }
  }
  term_coefficients(arg, mass[best_], mass[arg], coeffs);
  return fmin;
}

// ---------------------------------------------------------------------------------------
// Solvers

std::vector<double> mirror_ascent(const MaxMinObjective& objective, std::span<const double> start,
                                  std::size_t budget, double* best_value) {
  const std::size_t n = objective.mediators();
  if (start.size() != n) throw std::invalid_argument("mirror_ascent: start has wrong length");

  std::vector<double> omega(start.begin(), start.end());
  constexpr double kFloor = 1e-9;
  double total = 0.0;
  for (double& w : omega) {
    w = std::max(w, kFloor);
    total += w;
  }
  for (double& w : omega) w /= total;

  std::vector<double> grad(n);
  double f = objective.value_and_supergradient(omega, grad);
  std::vector<double> best = omega;
  double best_f = f;

  const double gmax = std::abs(*std::max_element(grad.begin(), grad.end(),
                                                 [](double a, double b) { return std::abs(a) < std::abs(b); }));
  const double scale = gmax > 0.0 ? 1.0 / gmax : 1.0;

  for (std::size_t k = 1; k <= budget; ++k) {
    const double eta = scale / std::sqrt(static_cast<double>(k));
    const double gtop = *std::max_element(grad.begin(), grad.end());
    double sum = 0.0;
    for (std::size_t e = 0; e < n; ++e) {
      omega[e] *= std::exp(eta * (grad[e] - gtop));
      sum += omega[e];
    }
    for (double& w : omega) w /= sum;
    f = objective.value_and_supergradient(omega, grad);
    if (f > best_f) {
      best_f = f;
      best = omega;
    }
  }
  if (best_value != nullptr) *best_value = best_f;
  return best;
}

namespace {

// Largest gain from moving `step` mass between any ordered pair of coordinates.
double local_perturbation_gain(const MaxMinObjective& objective, std::span<const double> omega,
                               double value, double step) {
  const std::size_t n = omega.size();
  std::vector<double> trial(omega.begin(), omega.end());
  double gain = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j || omega[j] <= 0.0) continue;
      const double moved = std::min(step, omega[j]);
      trial[i] += moved;
      trial[j] -= moved;
      gain = std::max(gain, objective.value(trial) - value);
      trial[i] = omega[i];
      trial[j] = omega[j];
    }
  }
  return gain;
}

struct Refined {
  std::vector<double> omega;
  double value;
  double upper;
  std::size_t planes;
};

// Cutting planes: every best response is a linear majorant of F, so the restricted
// game over collected majorants bounds the optimum from above while best responses
// at its solutions bound it from below.
Refined refine_by_cutting_planes(const MaxMinObjective& objective, std::vector<double> omega,
                                 double value, const SolverOptions& options) {
  const std::size_t n = objective.mediators();
  detail::MatrixGame game(n);
  std::vector<double> coeffs(n);

  auto add_response_at = [&](std::span<const double> point) {
    const double v = objective.best_response(point, coeffs);
    game.add_column(coeffs);
    return v;
  };

  add_response_at(omega);
  std::vector<double> uniform(n, 1.0 / static_cast<double>(n));
  add_response_at(uniform);
  std::vector<double> vertex(n, 0.0);
  for (std::size_t e = 0; e < n; ++e) {
    vertex[e] = 1.0;
    add_response_at(vertex);
    vertex[e] = 0.0;
  }

  Refined out{std::move(omega), value, std::numeric_limits<double>::infinity(), 0};
  for (std::size_t it = 0; it < options.refine_budget; ++it) {
    const auto sol = game.solve();
    if (!sol.ok) break;
    out.upper = std::min(out.upper, sol.value);
    out.planes = it + 1;
    const double v = add_response_at(sol.row_strategy);
    if (v > out.value) {
      out.value = v;
      out.omega = sol.row_strategy;
    }
    if (out.upper - out.value <= options.tol) break;
  }
  return out;
}

}  // namespace

OracleSolution solve_characteristic_time(const BanditModel& model, const MediatorSet& mediators,
                                         const SolverOptions& options) {
  if (model.arms() != mediators.arms()) {
    throw std::invalid_argument("solve_characteristic_time: model and mediators disagree on K");
  }
  const std::size_t n = mediators.mediators();
  MaxMinObjective objective(model.family(), model.means(), model.best_arm(), mediators.policies());

  OracleSolution out;
  std::vector<double> omega(n, 1.0 / static_cast<double>(n));
  double value = objective.value(omega);

  if (n == 1) {
    out.converged = true;
  } else {
    omega = mirror_ascent(objective, omega, options.budget, &value);
    out.iterations = options.budget;
    if (options.refine) {
      auto refined = refine_by_cutting_planes(objective, std::move(omega), value, options);
      omega = std::move(refined.omega);
      value = refined.value;
      out.solver_gap = std::max(0.0, refined.upper - refined.value);
      out.iterations += refined.planes;
      out.converged = out.solver_gap <= options.tol;
    } else {
      out.solver_gap = local_perturbation_gain(objective, omega, value, options.tol);
      out.converged = out.solver_gap <= options.tol;
    }
  }

  out.weights = std::move(omega);
  out.induced_arm_proportions = mediators.induced_arm_proportions(out.weights);
  out.value = g_value(model, out.induced_arm_proportions);
  return out;
}

double lower_bound(const BanditModel& model, const MediatorSet& mediators, double delta,
                   const SolverOptions& options) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::domain_error("lower_bound: delta outside (0, 1)");
  const double kl = binary_kl(delta, 1.0 - delta);
  if (kl == 0.0) return 0.0;
  const auto sol = solve_characteristic_time(model, mediators, options);
  return kl / sol.value;
}

ClassicalComparison compare_with_classical(const BanditModel& model, const MediatorSet& mediators,
                                           const SolverOptions& options) {
  ClassicalComparison out;
  out.t_star_inv_mediators = solve_characteristic_time(model, mediators, options).value;
  out.t_star_inv_classical =
      solve_characteristic_time(model, dirac_mediators(model.arms()), options).value;
  out.strictly_harder = out.t_star_inv_classical - out.t_star_inv_mediators > 10.0 * options.tol;
  return out;
}

double single_mediator_closed_form(const BanditModel& model, std::span<const double> policy) {
  if (model.family() != Family::GaussianUnitVariance) {
    throw std::invalid_argument("single_mediator_closed_form: Gaussian models only");
  }
  require_simplex(policy, model.arms(), "single_mediator_closed_form");
  const std::size_t best = model.best_arm();
  double value = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < model.arms(); ++a) {
    if (a == best) continue;
    const double denom = policy[best] + policy[a];
    const double gap = model.gap(a);
    const double v = denom > 0.0 ? 0.5 * policy[best] * policy[a] / denom * gap * gap : 0.0;
    value = std::min(value, v);
  }
  return value;
}

}  // namespace mfbai
