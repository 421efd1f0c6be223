#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mfbai/bandit.hpp"

namespace mfbai {

/// Closed-form infimum over the alternative set for arm weights w:
///   min_{a != a*} (w_{a*} + w_a) I_{w_{a*} / (w_{a*} + w_a)}(mu_{a*}, mu_a).
struct AltInfimumBreakdown {
  struct Candidate {
    std::size_t arm;
    double value;
  };
  std::vector<Candidate> candidates;  ///< one per suboptimal arm, ascending arm index
  std::size_t argmin_arm = 0;         ///< lowest index on ties
  double value = 0.0;
};

/// Value of the pairwise term for challenger weights (w_best, w_challenger);
/// zero when both weights vanish.
double pairwise_alt_value(Family family, double mu_best, double mu_challenger, double w_best,
                          double w_challenger) noexcept;

AltInfimumBreakdown alt_infimum(const BanditModel& model, std::span<const double> arm_weights);

/// g(mu, pi~): the alternative infimum as a plain number.
double g_value(const BanditModel& model, std::span<const double> arm_proportions);

/// g for raw means with an explicitly chosen reference arm (used on empirical means).
double g_value(Family family, std::span<const double> means, std::size_t best,
               std::span<const double> arm_proportions) noexcept;

/// F(omega) = g(mu, pi~(omega)) over the mediator simplex, with the means, reference
/// arm and policy matrix fixed. F is concave: a minimum of concave 1-homogeneous terms
/// composed with a linear map.
class MaxMinObjective {
 public:
  MaxMinObjective(Family family, std::span<const double> means, std::size_t best,
                  const Matrix& policies);

  std::size_t mediators() const noexcept { return policies_->rows(); }

  double value(std::span<const double> omega) const;

  /// Returns F(omega) and writes a supergradient: the average of the gradients of all
  /// terms within 1e-12 of the minimum.
  double value_and_supergradient(std::span<const double> omega, std::span<double> grad) const;

  /// Adversary best response at omega: the linear function omega' -> <omega', coeffs>
  /// that touches F at omega and dominates it everywhere on the simplex.
  double best_response(std::span<const double> omega, std::span<double> coeffs) const;

 private:
  void term_coefficients(std::size_t challenger, double x_best, double x_chal,
                         std::span<double> coeffs) const;
  void arm_masses(std::span<const double> omega, std::span<double> mass) const;

  Family family_;
  std::vector<double> means_;
  std::size_t best_;
  const Matrix* policies_;
};

struct SolverOptions {
  std::size_t budget = 5000;          ///< mirror-ascent iterations
  double tol = 1e-6;                  ///< target certified gap on the value
  bool refine = true;                 ///< run the cutting-plane refinement after mirror ascent
  std::size_t refine_budget = 400;    ///< maximum cutting planes
};

struct OracleSolution {
  std::vector<double> weights;                  ///< omega in the mediator simplex
  std::vector<double> induced_arm_proportions;  ///< pi~(omega)
  double value = 0.0;                           ///< F(omega), i.e. 1 / T*
  /// Upper bound minus attained value. Certified when refinement ran; otherwise the
  /// improvement a final tol-sized local perturbation finds.
  double solver_gap = 0.0;
  bool converged = false;
  std::size_t iterations = 0;

  double characteristic_time() const { return 1.0 / value; }
};

/// Entropic mirror ascent with step c / sqrt(k); returns the best iterate and its value.
/// `start` must be a point of the simplex; zero coordinates are lifted to a small floor.
std::vector<double> mirror_ascent(const MaxMinObjective& objective, std::span<const double> start,
                                  std::size_t budget, double* best_value = nullptr);

/// sup over omega of g(mu, pi~(omega)).
OracleSolution solve_characteristic_time(const BanditModel& model, const MediatorSet& mediators,
                                         const SolverOptions& options = {});

/// kl(delta, 1 - delta) * T*(mu, pi).
double lower_bound(const BanditModel& model, const MediatorSet& mediators, double delta,
                   const SolverOptions& options = {});

struct ClassicalComparison {
  double t_star_inv_mediators = 0.0;
  double t_star_inv_classical = 0.0;
  bool strictly_harder = false;
};

/// T*(mu, pi)^-1 against the Dirac policy set; strictly harder when the classical
/// value exceeds the mediated one by more than 10 tol.
ClassicalComparison compare_with_classical(const BanditModel& model, const MediatorSet& mediators,
                                           const SolverOptions& options = {});

/// Single-mediator Gaussian closed form min_a (1/2) p_1 p_a / (p_1 + p_a) Delta_a^2.
double single_mediator_closed_form(const BanditModel& model, std::span<const double> policy);

}  // namespace mfbai
