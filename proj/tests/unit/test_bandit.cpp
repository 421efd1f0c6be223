#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "mfbai/bandit.hpp"
#include "support/oracles.hpp"

using namespace mfbai;

TEST(KlDivergence, GaussianExamples) {
  EXPECT_EQ(kl_divergence(Family::GaussianUnitVariance, 1.5, 1.5), 0.0);
  EXPECT_DOUBLE_EQ(kl_divergence(Family::GaussianUnitVariance, 5.0, 1.0), 8.0);
}

TEST(KlDivergence, BernoulliExamples) {
  EXPECT_EQ(kl_divergence(Family::Bernoulli, 0.5, 0.5), 0.0);
  EXPECT_NEAR(kl_divergence(Family::Bernoulli, 0.1, 0.9), 1.757780, 1e-6);
  EXPECT_NEAR(kl_divergence(Family::Bernoulli, 0.1, 0.9), oracle::bernoulli_kl(0.1, 0.9), 1e-15);
}

TEST(KlDivergence, RejectsInvalidMeans) {
  EXPECT_THROW(kl_divergence(Family::Bernoulli, 0.0, 0.5), std::domain_error);
  EXPECT_THROW(kl_divergence(Family::Bernoulli, 0.5, 1.0), std::domain_error);
  EXPECT_THROW(kl_divergence(Family::GaussianUnitVariance, NAN, 0.5), std::domain_error);
  EXPECT_THROW(kl_divergence(Family::GaussianUnitVariance, 0.0, INFINITY), std::domain_error);
}

TEST(KlDivergence, NonNegativeWithEqualityOnlyOnDiagonal) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> unit(0.001, 0.999), real(-5.0, 5.0);
  for (int i = 0; i < 2000; ++i) {
    const double p = unit(gen), q = unit(gen);
    const double kb = kl_divergence(Family::Bernoulli, p, q);
    EXPECT_GT(kb, 0.0);
    EXPECT_NEAR(kb, oracle::bernoulli_kl(p, q), 1e-12);
    const double x = real(gen), y = real(gen);
    EXPECT_GT(kl_divergence(Family::GaussianUnitVariance, x, y), 0.0);
    EXPECT_EQ(kl_divergence(Family::Bernoulli, p, p), 0.0);
    EXPECT_EQ(kl_divergence(Family::GaussianUnitVariance, x, x), 0.0);
  }
}

TEST(BinaryKl, Examples) {
  EXPECT_EQ(binary_kl(0.5, 0.5), 0.0);
  EXPECT_NEAR(binary_kl(0.1, 0.9), 1.757780, 1e-6);
  EXPECT_NEAR(binary_kl(0.4, 0.6), 0.081093, 1e-6);
  EXPECT_THROW(binary_kl(0.0, 0.5), std::domain_error);
  EXPECT_THROW(binary_kl(0.5, 1.0), std::domain_error);
}

TEST(GeneralizedJs, Examples) {
  EXPECT_DOUBLE_EQ(generalized_js(Family::GaussianUnitVariance, 0.5, 2.0, 0.0), 0.5);
  EXPECT_EQ(generalized_js(Family::GaussianUnitVariance, 0.0, 3.0, 1.0), 0.0);
  EXPECT_EQ(generalized_js(Family::Bernoulli, 0.0, 0.3, 0.1), 0.0);
  EXPECT_DOUBLE_EQ(generalized_js(Family::GaussianUnitVariance, 0.25, 1.0, 0.0), 0.09375);
  // two-term definition, evaluated by hand
  const double m = 0.25 * 1.0;
  EXPECT_NEAR(0.25 * oracle::gaussian_kl(1.0, m) + 0.75 * oracle::gaussian_kl(0.0, m), 0.09375,
              1e-15);
  EXPECT_THROW(generalized_js(Family::GaussianUnitVariance, 1.5, 1.0, 0.0), std::domain_error);
}

TEST(GeneralizedJs, SymmetryAndGaussianClosedForm) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> unit(0.01, 0.99), real(-3.0, 3.0), alpha(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const double a = alpha(gen);
    const double p = unit(gen), q = unit(gen);
    EXPECT_NEAR(generalized_js(Family::Bernoulli, a, p, q),
                generalized_js(Family::Bernoulli, 1.0 - a, q, p), 1e-12);
    const double x = real(gen), y = real(gen);
    const double closed = a * (1.0 - a) * (x - y) * (x - y) / 2.0;
    const double m = a * x + (1.0 - a) * y;
    const double two_term = a * oracle::gaussian_kl(x, m) + (1.0 - a) * oracle::gaussian_kl(y, m);
    EXPECT_NEAR(generalized_js(Family::GaussianUnitVariance, a, x, y), closed, 1e-12);
    EXPECT_NEAR(closed, two_term, 1e-12);
    EXPECT_NEAR(generalized_js(Family::GaussianUnitVariance, a, x, y),
                generalized_js(Family::GaussianUnitVariance, 1.0 - a, y, x), 1e-12);
  }
}

TEST(BanditModel, ValidatesInstances) {
  const BanditModel m(Family::GaussianUnitVariance, {1.5, 1.0, 0.7, 0.5});
  EXPECT_EQ(m.arms(), 4u);
  EXPECT_EQ(m.best_arm(), 0u);
  EXPECT_DOUBLE_EQ(m.gap(3), 1.0);
  EXPECT_EQ(BanditModel(Family::Bernoulli, {0.2, 0.7}).best_arm(), 1u);
  EXPECT_THROW(BanditModel(Family::GaussianUnitVariance, {1.0}), std::invalid_argument);
  EXPECT_THROW(BanditModel(Family::GaussianUnitVariance, {1.0, 1.0, 0.0}), std::invalid_argument);
  EXPECT_THROW(BanditModel(Family::Bernoulli, {1.0, 0.5}), std::domain_error);
  EXPECT_THROW(BanditModel(Family::Bernoulli, {0.0, 0.5}), std::domain_error);
}

TEST(MediatorSet, RejectsInvalidPolicies) {
  EXPECT_NO_THROW((MediatorSet{{0.5, 0.5}, {0.0, 1.0}}));
  EXPECT_THROW((MediatorSet{{0.6, 0.5}}), std::invalid_argument);
  EXPECT_THROW((MediatorSet{{1.2, -0.2}}), std::invalid_argument);
  EXPECT_THROW((MediatorSet{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}}), std::invalid_argument);
  try {
    MediatorSet{{1.0, 0.0, 0.0}, {0.5, 0.5, 0.0}};
    FAIL() << "expected action covering failure";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("action covering violated, arm 2"), std::string::npos);
  }
  // within tolerance vs. outside it
  EXPECT_NO_THROW((MediatorSet{{0.5 + 1e-10, 0.5}, {0.0, 1.0}}));
  EXPECT_THROW((MediatorSet{{0.5 + 1e-8, 0.5}, {0.0, 1.0}}), std::invalid_argument);
}

TEST(MediatorSet, InducedProportionsMixRows) {
  const MediatorSet m{{0.1, 0.8, 0.1, 0.0}, {0.2, 0.0, 0.4, 0.4}};
  const std::vector<double> w{0.25, 0.75};
  const auto x = m.induced_arm_proportions(w);
  EXPECT_NEAR(x[0], 0.175, 1e-15);
  EXPECT_NEAR(x[1], 0.2, 1e-15);
  EXPECT_NEAR(x[2], 0.325, 1e-15);
  EXPECT_NEAR(x[3], 0.3, 1e-15);
}

TEST(DiracMediators, IdentityRows) {
  for (std::size_t k : {2u, 4u, 7u}) {
    const auto d = dirac_mediators(k);
    ASSERT_EQ(d.mediators(), k);
    for (std::size_t e = 0; e < k; ++e) {
      for (std::size_t a = 0; a < k; ++a) EXPECT_EQ(d(e, a), e == a ? 1.0 : 0.0);
    }
  }
  EXPECT_THROW(dirac_mediators(1), std::invalid_argument);
}

TEST(SampleStep, DiracRowAlwaysPullsItsArm) {
  const BanditModel model(Family::GaussianUnitVariance, {0.0, 1.0, 0.5, 0.2});
  const MediatorSet mediators{{0.0, 1.0, 0.0, 0.0}, {0.25, 0.25, 0.25, 0.25}};
  RngStream rng(3, 0);
  for (int i = 0; i < 1000; ++i) {
    const auto s = sample_step(model, mediators, 0, rng);
    EXPECT_EQ(s.arm, 1u);
    EXPECT_EQ(s.mediator, 0u);
  }
  EXPECT_THROW(sample_step(model, mediators, 2, rng), std::out_of_range);
}

TEST(SampleStep, BernoulliLawOfLargeNumbers) {
  const double p = 1.0 - 1e-3;
  const BanditModel model(Family::Bernoulli, {p, 0.5});
  const MediatorSet mediators{{1.0, 0.0}, {0.0, 1.0}};
  RngStream rng(99, 5);
  constexpr int n = 1'000'000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += sample_step(model, mediators, 0, rng).reward;
  const double sigma = std::sqrt(p * (1.0 - p) / n);
  EXPECT_NEAR(sum / n, p, 3.0 * sigma);
}

TEST(SampleStep, ArmFrequenciesFollowPolicy) {
  const BanditModel model(Family::GaussianUnitVariance, {1.0, 0.0, 0.5});
  const MediatorSet mediators{{0.2, 0.5, 0.3}};
  RngStream rng(1, 1);
  std::vector<int> counts(3, 0);
  constexpr int n = 200'000;
  for (int i = 0; i < n; ++i) ++counts[sample_step(model, mediators, 0, rng).arm];
  for (std::size_t a = 0; a < 3; ++a) {
    const double p = mediators(0, a);
    EXPECT_NEAR(counts[a] / double(n), p, 4.0 * std::sqrt(p * (1 - p) / n));
  }
}

TEST(SampleStep, GaussianRewardMoments) {
  const BanditModel model(Family::GaussianUnitVariance, {2.0, 0.0});
  RngStream rng(5, 0);
  constexpr int n = 200'000;
  double s = 0.0, ss = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = sample_reward(model, 0, rng);
    s += x;
    ss += x * x;
  }
  const double mean = s / n;
  EXPECT_NEAR(mean, 2.0, 4.0 / std::sqrt(n));
  EXPECT_NEAR(ss / n - mean * mean, 1.0, 0.02);
}

TEST(RngStream, DeterministicPerSeedAndStream) {
  const BanditModel model(Family::GaussianUnitVariance, {1.5, 1.0, 0.7, 0.5});
  const MediatorSet mediators{{0.1, 0.8, 0.1, 0.0}, {0.2, 0.0, 0.4, 0.4}};
  RngStream a(42, 7), b(42, 7), c(42, 8);
  bool differs = false;
  for (int i = 0; i < 500; ++i) {
    const auto sa = sample_step(model, mediators, i % 2, a);
    const auto sb = sample_step(model, mediators, i % 2, b);
    const auto sc = sample_step(model, mediators, i % 2, c);
    EXPECT_EQ(sa.arm, sb.arm);
    EXPECT_EQ(sa.reward, sb.reward);
    differs = differs || sa.reward != sc.reward;
  }
  EXPECT_TRUE(differs);
}

TEST(RngStream, UniformIndexCoversRange) {
  RngStream rng(0, 0);
  std::vector<int> hits(5, 0);
  for (int i = 0; i < 50'000; ++i) ++hits[rng.uniform_index(5)];
  for (int h : hits) EXPECT_NEAR(h / 50'000.0, 0.2, 0.01);
  EXPECT_THROW(rng.uniform_index(0), std::invalid_argument);
}
