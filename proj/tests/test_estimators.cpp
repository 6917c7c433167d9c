#include <cmath>
#include <vector>

#include "doctest.h"
#include "giniseq/estimators.hpp"
#include "test_support.hpp"

using namespace giniseq;
using giniseq::testing::equal_weight_sample;

TEST_CASE("weighted mean and empirical CDF on a tiny fixture") {
  auto s = equal_weight_sample({1.0, 2.0, 3.0});
  CHECK(weighted_mean(s) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(empirical_cdf(s, 0.5) == doctest::Approx(0.0));
  CHECK(empirical_cdf(s, 1.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(empirical_cdf(s, 2.5) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(empirical_cdf(s, 3.0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("sample quantile uses the infimum rule") {
  auto s = equal_weight_sample({10.0, 20.0, 30.0, 40.0});
  CHECK(sample_quantile(s, 0.0) == 10.0);
  CHECK(sample_quantile(s, 0.25) == 10.0);
  CHECK(sample_quantile(s, 0.2500001) == 20.0);
  CHECK(sample_quantile(s, 0.5) == 20.0);
  CHECK(sample_quantile(s, 1.0) == 40.0);
  CHECK_THROWS_AS(sample_quantile(s, 1.5), std::invalid_argument);
}

TEST_CASE("plug-in Gini on worked fixtures") {
  // x = {1,2,3}, equal weights: 1 - (2/2)[ (1/3)(1)(2/3) + (1/3)(2)(1/3) ]
  // = 1 - 4/9 = 5/9.
  auto s = equal_weight_sample({1.0, 2.0, 3.0});
  CHECK(gini_hat(s) == doctest::Approx(5.0 / 9.0).epsilon(1e-14));
  // Pairwise mean difference: D = 8/9, D/(2 mu) = 2/9.
  CHECK(gini_pairwise_oracle(s) == doctest::Approx(2.0 / 9.0).epsilon(1e-14));
  // Tie-free identity: plug-in = D/(2 mu) + sum w^2 x / mu.
  CHECK(gini_hat(s) ==
        doctest::Approx(gini_pairwise_oracle(s) + (6.0 / 9.0) / 2.0)
            .epsilon(1e-13));
  // One household owns everything: pairwise form gives 1 - 1/n, the
  // plug-in form carries the usual +sum(w^2 x)/mu finite-sample offset.
  auto top = equal_weight_sample({0.0, 0.0, 0.0, 100.0});
  CHECK(gini_pairwise_oracle(top) == doctest::Approx(0.75).epsilon(1e-13));
  CHECK(gini_hat(top) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("Gini handles ties via grouped CDF steps") {
  auto tied = equal_weight_sample({2.0, 2.0, 2.0, 6.0});
  // F(2) = 3/4 for the whole tie group; mu = 3.
  // 1 - (2/3)[3*(1/4)(2)(1/4) + 0] = 1 - 1/4 = 3/4? worked by hand:
  // sum w x (1-F) = 3*(0.25*2*0.25) = 0.375; 1 - (2/3)*0.375 = 0.75.
  CHECK(gini_hat(tied) == doctest::Approx(0.75).epsilon(1e-13));
  CHECK(gini_hat(tied) == doctest::Approx(giniseq::testing::naive_gini(tied))
                              .epsilon(1e-13));
}

TEST_CASE("degenerate samples are rejected") {
  WeightedSample empty;
  CHECK_THROWS_AS(gini_hat(empty), DegenerateSampleError);
  CHECK_THROWS_AS(weighted_mean(empty), DegenerateSampleError);
  auto zero = equal_weight_sample({0.0, 0.0});
  CHECK_THROWS_AS(gini_hat(zero), DegenerateSampleError);
}

TEST_CASE("linearized scores match a direct evaluation") {
  Rng rng(2718);
  for (int rep = 0; rep < 20; ++rep) {
    auto s = giniseq::testing::random_sample(rng, true);
    double mu = weighted_mean(s);
    double g = gini_hat(s);
    auto table = linearized_scores(s, g, mu);
    auto naive = giniseq::testing::naive_scores(s, g, mu);
    REQUIRE(table.scores.size() == naive.size());
    for (std::size_t st = 0; st < naive.size(); ++st) {
      REQUIRE(table.scores[st].size() == naive[st].size());
      for (std::size_t d = 0; d < naive[st].size(); ++d) {
        CHECK(table.scores[st][d] ==
              doctest::Approx(naive[st][d]).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("variance estimator on a frozen score table") {
  // One stratum, two draws with scores {0.1, 0.3}:
  // V^2 = n * [2/1] * ((0.1-0.2)^2 + (0.3-0.2)^2) = 2 * 2 * 0.02 = 0.08.
  ScoreTable t;
  t.scores = {{0.1, 0.3}};
  t.stratum_means = {0.2};
  t.stratum_counts = {2};
  CHECK(variance_hat(t, 2) == doctest::Approx(0.08).epsilon(1e-13));

  // Two strata contribute additively.
  ScoreTable t2;
  t2.scores = {{0.1, 0.3}, {1.0, 2.0, 3.0}};
  t2.stratum_means = {0.2, 2.0};
  t2.stratum_counts = {2, 3};
  // 5 * (2*0.02 + 1.5*2.0) = 5 * 3.04 = 15.2.
  CHECK(variance_hat(t2, 5) == doctest::Approx(15.2).epsilon(1e-13));
}

TEST_CASE("single-draw strata make the variance undefined") {
  ScoreTable t;
  t.scores = {{0.1, 0.3}, {0.7}};
  t.stratum_means = {0.2, 0.7};
  t.stratum_counts = {2, 1};
  CHECK_THROWS_AS(variance_hat(t, 3), InsufficientReplicatesError);
}

TEST_CASE("optimal cluster count formula") {
  // 4 z^2 / omega^2 = 68292.601 at alpha = 0.05, omega = 0.015.
  CHECK(optimal_C(0.01307985, 0.05, 0.015) == 894);
  CHECK(optimal_C(1.0, 0.05, 0.015) == 68293);
  // Quadruples when the width target halves.
  CHECK(optimal_C(0.01, 0.05, 0.0075) >= 4 * optimal_C(0.01, 0.05, 0.015) - 4);
  CHECK_THROWS_AS(optimal_C(0.0, 0.05, 0.015), std::invalid_argument);
  CHECK_THROWS_AS(optimal_C(0.01, 1.5, 0.015), std::invalid_argument);
  CHECK_THROWS_AS(optimal_C(0.01, 0.05, 0.0), std::invalid_argument);
}

TEST_CASE("confidence interval geometry") {
  auto ci = confidence_interval(0.3, 0.09, 100, 0.05);
  double half = 1.959963984540054 * 0.03;
  CHECK(ci.low == doctest::Approx(0.3 - half).epsilon(1e-12));
  CHECK(ci.high == doctest::Approx(0.3 + half).epsilon(1e-12));
  CHECK(ci.width == doctest::Approx(2 * half).epsilon(1e-12));
  CHECK_THROWS_AS(confidence_interval(0.3, -1.0, 100, 0.05),
                  std::invalid_argument);
  CHECK_THROWS_AS(confidence_interval(0.3, 0.1, 0, 0.05),
                  std::invalid_argument);
}

TEST_CASE("full estimate composes the pieces consistently") {
  Rng rng(555);
  auto s = giniseq::testing::random_sample(rng, true, 2, 6, 4);
  auto est = estimate(s, 0.05);
  CHECK(est.g_hat == doctest::Approx(gini_hat(s)).epsilon(1e-14));
  CHECK(est.mu_hat == doctest::Approx(weighted_mean(s)).epsilon(1e-14));
  CHECK(est.v_n2 >= 0.0);
  CHECK(est.n == s.n);
  auto ci = confidence_interval(est.g_hat, est.v_n2, est.n, 0.05);
  CHECK(est.ci.width == doctest::Approx(ci.width).epsilon(1e-14));
}

TEST_CASE("equal-weight convenience wrapper") {
  CHECK(gini_of_values({1.0, 2.0, 3.0}) ==
        doctest::Approx(5.0 / 9.0).epsilon(1e-14));
}

TEST_CASE("fixed-size experiment reports coherent widths") {
  auto spec = PopulationSpec::defaults(
      IncomeDistribution::parse("gamma:2.649,0.84"));
  spec.strata = {{20, 10, 20}, {20, 25, 50}};
  auto frame = generate_pseudo_population(spec, 17);
  auto res = fixed_n_experiment(frame, 30, 0.05, 2, 20, 9, {0.0, 1.0});
  CHECK(res.n == 30);
  CHECK(res.mean_width > 0.0);
  CHECK(res.sd_width >= 0.0);
  // Every width exceeds 0, none exceeds 1.
  CHECK(res.exceed_rates[0] == doctest::Approx(1.0));
  CHECK(res.exceed_rates[1] == doctest::Approx(0.0));
  // Drawing more clusters than the frame holds is legal under PPSWR.
  auto big = fixed_n_experiment(frame, 50, 0.05, 2, 3, 9, {0.015});
  CHECK(big.n == 50);
  CHECK_THROWS_AS(fixed_n_experiment(frame, 30, 0.05, 2, 0, 9, {}),
                  std::invalid_argument);
}
