#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "matrix_game.hpp"
#include "mfbai/characteristic_time.hpp"
#include "support/oracles.hpp"

using namespace mfbai;

namespace {

MediatorSet table1_mediators() {
  return MediatorSet{{0.1, 0.8, 0.1, 0.0},
                     {0.0, 0.1, 0.8, 0.1},
                     {0.0, 0.1, 0.1, 0.8},
                     {0.2, 0.0, 0.4, 0.4}};
}

std::vector<std::vector<double>> to_rows(const MediatorSet& m) {
  std::vector<std::vector<double>> rows(m.mediators(), std::vector<double>(m.arms()));
  for (std::size_t e = 0; e < m.mediators(); ++e) {
    for (std::size_t a = 0; a < m.arms(); ++a) rows[e][a] = m(e, a);
  }
  return rows;
}

// Random policy matrix with action covering; some rows are made sparse.
Matrix random_policies(std::size_t e, std::size_t k, std::mt19937_64& gen) {
  Matrix p(e, k);
  std::bernoulli_distribution sparse(0.3);
  for (;;) {
    for (std::size_t r = 0; r < e; ++r) {
      auto w = oracle::random_simplex(k, gen);
      if (sparse(gen)) {
        w[std::uniform_int_distribution<std::size_t>(0, k - 1)(gen)] = 0.0;
        double s = 0.0;
        for (double v : w) s += v;
        for (double& v : w) v /= s;
      }
      for (std::size_t a = 0; a < k; ++a) p(r, a) = w[a];
    }
    bool covered = true;
    for (std::size_t a = 0; a < k; ++a) {
      double col = 0.0;
      for (std::size_t r = 0; r < e; ++r) col += p(r, a);
      covered = covered && col > 0.0;
    }
    if (covered) return p;
  }
}

std::vector<double> random_means(std::size_t k, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<double> mu(k);
  for (auto& m : mu) m = u(gen);
  return mu;
}

}  // namespace

TEST(AltInfimum, Examples) {
  const BanditModel two(Family::GaussianUnitVariance, {5.0, 1.0});
  const std::vector<double> half{0.5, 0.5};
  EXPECT_NEAR(alt_infimum(two, half).value, 2.0, 1e-12);
  const std::vector<double> starved{0.0, 1.0};
  EXPECT_EQ(alt_infimum(two, starved).value, 0.0);

  const BanditModel three(Family::GaussianUnitVariance, {1.0, 0.5, 0.0});
  const std::vector<double> w{0.25, 0.25, 0.5};
  const auto b = alt_infimum(three, w);
  EXPECT_NEAR(b.value, 0.015625, 1e-12);
  EXPECT_EQ(b.argmin_arm, 1u);
  ASSERT_EQ(b.candidates.size(), 2u);
  EXPECT_EQ(b.candidates[0].arm, 1u);
  EXPECT_EQ(b.candidates[1].arm, 2u);
}

TEST(AltInfimum, TwoArmAgreesWithConstrainedGrid) {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 50; ++i) {
    double a = u(gen), b = u(gen);
    if (std::abs(a - b) < 1e-3) continue;
    const std::vector<double> mu{a, b};
    const auto w = oracle::random_simplex(2, gen);
    const BanditModel model(Family::GaussianUnitVariance, mu);
    EXPECT_NEAR(alt_infimum(model, w).value, oracle::alt_infimum_grid(mu, w), 1e-4);
  }
}

TEST(AltInfimum, BernoulliUsesGeneralizedJs) {
  const BanditModel model(Family::Bernoulli, {0.7, 0.4, 0.2});
  const std::vector<double> w{0.3, 0.5, 0.2};
  // brute force over the common value lambda for each challenger
  double best = INFINITY;
  for (std::size_t a : {1u, 2u}) {
    double lo = INFINITY;
    for (int i = 1; i < 200000; ++i) {
      const double l = model.mean(a) + (model.mean(0) - model.mean(a)) * i / 200000.0;
      lo = std::min(lo, w[0] * oracle::bernoulli_kl(0.7, l) + w[a] * oracle::bernoulli_kl(model.mean(a), l));
    }
    best = std::min(best, lo);
  }
  EXPECT_NEAR(alt_infimum(model, w).value, best, 1e-9);
}

TEST(GValue, Examples) {
  const BanditModel model(Family::GaussianUnitVariance, {5.0, 1.0});
  for (double p : {0.01, 0.3, 0.5, 0.9}) {
    const std::vector<double> x{p, 1.0 - p};
    EXPECT_NEAR(g_value(model, x), 0.5 * p * (1.0 - p) * 16.0, 1e-12);
  }
  const std::vector<double> dirac_best{1.0, 0.0};
  EXPECT_EQ(g_value(model, dirac_best), 0.0);
}

TEST(GValue, MonotoneInEveryCoordinate) {
  std::mt19937_64 gen(23);
  std::uniform_real_distribution<double> bump(0.0, 0.5);
  for (int i = 0; i < 300; ++i) {
    const std::size_t k = 2 + i % 4;
    const auto mu = random_means(k, gen);
    const BanditModel model(Family::GaussianUnitVariance, mu);
    auto x = oracle::random_simplex(k, gen);
    const double base = g_value(model.family(), model.means(), model.best_arm(), x);
    EXPECT_NEAR(base, oracle::gaussian_g(mu, x), 1e-12);
    x[i % k] += bump(gen);
    EXPECT_GE(g_value(model.family(), model.means(), model.best_arm(), x), base - 1e-15);
  }
}

TEST(MaxMinObjective, ConcaveAlongSegments) {
  std::mt19937_64 gen(29);
  std::uniform_real_distribution<double> lam(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const std::size_t k = 2 + i % 4, e = 1 + i % 5;
    const BanditModel model(i % 2 ? Family::GaussianUnitVariance : Family::Bernoulli,
                            i % 2 ? random_means(k, gen) : [&] {
                              std::vector<double> m(k);
                              std::uniform_real_distribution<double> u(0.05, 0.95);
                              for (auto& v : m) v = u(gen);
                              return m;
                            }());
    const Matrix p = random_policies(e, k, gen);
    const MaxMinObjective f(model.family(), model.means(), model.best_arm(), p);
    const auto x = oracle::random_simplex(e, gen), y = oracle::random_simplex(e, gen);
    const double l = lam(gen);
    std::vector<double> z(e);
    for (std::size_t j = 0; j < e; ++j) z[j] = l * x[j] + (1 - l) * y[j];
    EXPECT_GE(f.value(z), l * f.value(x) + (1 - l) * f.value(y) - 1e-12);
  }
}

TEST(MaxMinObjective, SupergradientAndBestResponseDominate) {
  std::mt19937_64 gen(31);
  for (int i = 0; i < 200; ++i) {
    const std::size_t k = 2 + i % 4, e = 2 + i % 3;
    const BanditModel model(Family::GaussianUnitVariance, random_means(k, gen));
    const Matrix p = random_policies(e, k, gen);
    const MaxMinObjective f(model.family(), model.means(), model.best_arm(), p);
    const auto x = oracle::random_simplex(e, gen);
    std::vector<double> g(e), c(e);
    const double fx = f.value_and_supergradient(x, g);
    const double br = f.best_response(x, c);
    EXPECT_NEAR(fx, br, 1e-12);
    double cx = 0.0;
    for (std::size_t j = 0; j < e; ++j) cx += c[j] * x[j];
    EXPECT_NEAR(cx, fx, 1e-12);
    for (int r = 0; r < 20; ++r) {
      const auto y = oracle::random_simplex(e, gen);
      double lin = fx, cy = 0.0;
      for (std::size_t j = 0; j < e; ++j) {
        lin += g[j] * (y[j] - x[j]);
        cy += c[j] * y[j];
      }
      EXPECT_GE(lin, f.value(y) - 1e-10);
      EXPECT_GE(cy, f.value(y) - 1e-10);
    }
  }
}

TEST(Solve, DiracTwoArms) {
  const BanditModel model(Family::GaussianUnitVariance, {5.0, 1.0});
  const auto sol = solve_characteristic_time(model, dirac_mediators(2));
  EXPECT_NEAR(sol.value, 2.0, 1e-6);
  EXPECT_NEAR(sol.weights[0], 0.5, 1e-3);
  EXPECT_NEAR(sol.weights[1], 0.5, 1e-3);
  EXPECT_NEAR(sol.characteristic_time(), 0.5, 1e-6);
  EXPECT_TRUE(sol.converged);
}

TEST(Solve, SingleMediatorIsTrivial) {
  const BanditModel model(Family::GaussianUnitVariance, {1.0, 0.5, 0.0});
  const MediatorSet one{{0.25, 0.25, 0.5}};
  const auto sol = solve_characteristic_time(model, one);
  ASSERT_EQ(sol.weights.size(), 1u);
  EXPECT_EQ(sol.weights[0], 1.0);
  EXPECT_NEAR(sol.value, 0.015625, 1e-12);
  EXPECT_NEAR(sol.value, single_mediator_closed_form(model, one.policy(0)), 1e-12);
  EXPECT_TRUE(sol.converged);
}

TEST(Solve, SmallInstancesMatchSimplexGrid) {
  std::mt19937_64 gen(37);
  for (int i = 0; i < 30; ++i) {
    const std::size_t k = 2 + i % 2, e = 2 + (i / 2) % 2;
    const auto mu = random_means(k, gen);
    const BanditModel model(Family::GaussianUnitVariance, mu);
    const MediatorSet m(random_policies(e, k, gen));
    const auto rows = to_rows(m);
    const double grid = oracle::simplex_grid_max(
        e, [&](const std::vector<double>& w) { return oracle::gaussian_objective(mu, rows, w); });
    const auto sol = solve_characteristic_time(model, m);
    EXPECT_NEAR(sol.value, grid, 1e-3 * grid) << "instance " << i;
    EXPECT_LE(grid, sol.value + sol.solver_gap + 1e-12);
  }
}

TEST(Solve, SolutionInvariants) {
  std::mt19937_64 gen(41);
  for (int i = 0; i < 100; ++i) {
    const std::size_t k = 2 + i % 4, e = 1 + i % 5;
    const BanditModel model(Family::GaussianUnitVariance, random_means(k, gen));
    const MediatorSet m(random_policies(e, k, gen));
    const auto sol = solve_characteristic_time(model, m);
    double s = 0.0;
    for (double w : sol.weights) {
      EXPECT_GE(w, 0.0);
      s += w;
    }
    EXPECT_NEAR(s, 1.0, 1e-12);
    const auto x = m.induced_arm_proportions(sol.weights);
    ASSERT_EQ(x.size(), sol.induced_arm_proportions.size());
    for (std::size_t a = 0; a < k; ++a) EXPECT_NEAR(x[a], sol.induced_arm_proportions[a], 1e-14);
    EXPECT_NEAR(sol.value, g_value(model, x), 1e-14);
    EXPECT_GT(sol.value, 0.0);
    EXPECT_GE(sol.solver_gap, 0.0);
    if (sol.converged) EXPECT_LE(sol.solver_gap, 1e-6);
  }
}

TEST(Solve, MediatedNeverBeatsClassical) {
  std::mt19937_64 gen(43);
  for (int i = 0; i < 200; ++i) {
    const std::size_t k = 2 + i % 4, e = 1 + i % 5;
    const BanditModel model(Family::GaussianUnitVariance, random_means(k, gen));
    const MediatorSet m(random_policies(e, k, gen));
    const auto cmp = compare_with_classical(model, m);
    EXPECT_LE(cmp.t_star_inv_mediators, cmp.t_star_inv_classical + 1e-6) << "instance " << i;
  }
}

TEST(CompareWithClassical, DiracRowsGiveEquality) {
  const BanditModel model(Family::GaussianUnitVariance, {1.5, 1.0, 0.7, 0.5});
  const auto plain = compare_with_classical(model, dirac_mediators(4));
  EXPECT_NEAR(plain.t_star_inv_mediators, plain.t_star_inv_classical, 1e-6);
  EXPECT_FALSE(plain.strictly_harder);

  Matrix p(6, 4);
  for (std::size_t a = 0; a < 4; ++a) p(a, a) = 1.0;
  for (std::size_t a = 0; a < 4; ++a) {
    p(4, a) = 0.25;
    p(5, a) = a == 1 ? 0.7 : 0.1;
  }
  const auto extended = compare_with_classical(model, MediatorSet(p));
  EXPECT_NEAR(extended.t_star_inv_mediators, extended.t_star_inv_classical, 1e-6);
  EXPECT_FALSE(extended.strictly_harder);
}

TEST(CompareWithClassical, RestrictedPoliciesAreStrictlyHarder) {
  const BanditModel model(Family::GaussianUnitVariance, {1.5, 1.0, 0.7, 0.5});
  const auto cmp = compare_with_classical(model, table1_mediators());
  EXPECT_TRUE(cmp.strictly_harder);
  EXPECT_LT(cmp.t_star_inv_mediators, cmp.t_star_inv_classical);
}

TEST(SingleMediatorClosedForm, Examples) {
  const BanditModel three(Family::GaussianUnitVariance, {1.0, 0.5, 0.0});
  const std::vector<double> p{0.25, 0.25, 0.5};
  EXPECT_NEAR(single_mediator_closed_form(three, p), 0.015625, 1e-15);
  const BanditModel two(Family::GaussianUnitVariance, {2.0, 0.0});
  const std::vector<double> half{0.5, 0.5};
  EXPECT_NEAR(single_mediator_closed_form(two, half), 0.5, 1e-15);
  const std::vector<double> almost{1.0 - 1e-12, 1e-12};
  EXPECT_LT(single_mediator_closed_form(two, almost), 1e-11);
  const BanditModel bern(Family::Bernoulli, {0.6, 0.3});
  EXPECT_THROW(single_mediator_closed_form(bern, half), std::invalid_argument);
}

TEST(LowerBound, Examples) {
  const BanditModel model(Family::GaussianUnitVariance, {5.0, 1.0});
  const auto d = dirac_mediators(2);
  EXPECT_EQ(lower_bound(model, d, 0.5), 0.0);
  EXPECT_NEAR(lower_bound(model, d, 0.1), 0.878890, 1e-6);
  const double t_star = solve_characteristic_time(model, d).characteristic_time();
  const double ratio = lower_bound(model, d, 1e-12) / (t_star * std::log(1e12));
  EXPECT_NEAR(ratio, 1.0, 0.05);
  EXPECT_THROW(lower_bound(model, d, 0.0), std::domain_error);
  EXPECT_THROW(lower_bound(model, d, 1.0), std::domain_error);
}

TEST(MatrixGame, RockPaperScissors) {
  detail::MatrixGame game(3);
  game.add_column({0.0, 1.0, -1.0});
  game.add_column({-1.0, 0.0, 1.0});
  game.add_column({1.0, -1.0, 0.0});
  const auto s = game.solve();
  ASSERT_TRUE(s.ok);
  EXPECT_NEAR(s.value, 0.0, 1e-12);
  for (double w : s.row_strategy) EXPECT_NEAR(w, 1.0 / 3.0, 1e-12);
}

TEST(MatrixGame, DominatedRowGetsNoWeight) {
  detail::MatrixGame game(3);
  game.add_column({3.0, 1.0, 0.5});
  game.add_column({1.0, 3.0, 0.5});
  const auto s = game.solve();
  ASSERT_TRUE(s.ok);
  EXPECT_NEAR(s.value, 2.0, 1e-12);
  EXPECT_NEAR(s.row_strategy[0], 0.5, 1e-12);
  EXPECT_NEAR(s.row_strategy[2], 0.0, 1e-12);
}
