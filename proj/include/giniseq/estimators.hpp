#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "giniseq/design.hpp"

namespace giniseq {

class DegenerateSampleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when some stratum has a single cluster draw: the n_s/(n_s-1)
// factor in the variance estimator is undefined.
class InsufficientReplicatesError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Weighted mean: sum of w*x over all observations.
double weighted_mean(const WeightedSample& sample);

// Weighted empirical CDF at x, with the <= convention.
double empirical_cdf(const WeightedSample& sample, double x);

// Smallest observed income whose empirical CDF reaches p; p = 0 gives the
// minimum observation.
double sample_quantile(const WeightedSample& sample, double p);

// Plug-in Gini estimator: 1 - (2/mu) sum w*x*(1 - F(x)), evaluated by sort
// and prefix sums; exactly equal to the naive double-sum form.
double gini_hat(const WeightedSample& sample);

// Independent pairwise form D/(2*mu) with D = sum_i sum_j w_i w_j |x_i - x_j|;
// naive O(n^2), used as a cross-check oracle.
double gini_pairwise_oracle(const WeightedSample& sample);

// Linearization scores u_{sc} per cluster draw plus per-stratum means.
struct ScoreTable {
  // scores[s] holds u values indexed by draw order within stratum s.
  std::vector<std::vector<double>> scores;
  std::vector<double> stratum_means;
  std::vector<std::int64_t> stratum_counts;
};

ScoreTable linearized_scores(const WeightedSample& sample, double g_hat,
                             double mu_hat);

// V_n^2 = n * sum_s [n_s/(n_s-1)] * sum_c (u_sc - ubar_s)^2.
double variance_hat(const ScoreTable& scores, std::int64_t n);

// C = ceil(4 z_{alpha/2}^2 xi2 / omega^2), the optimal total cluster count.
std::int64_t optimal_C(double xi2, double alpha, double omega);

struct ConfidenceInterval {
  double low = 0.0;
  double high = 0.0;
  double width = 0.0;
};

// G +/- z_{alpha/2} * sqrt(v2 / n).
ConfidenceInterval confidence_interval(double g_hat, double v2,
                                       std::int64_t n, double alpha);

struct GiniEstimate {
  double g_hat = 0.0;
  double mu_hat = 0.0;
  double v_n2 = 0.0;
  std::int64_t n = 0;
  ConfidenceInterval ci;
};

// Full pipeline on one sample: mean, Gini, scores, variance, CI.
GiniEstimate estimate(const WeightedSample& sample, double alpha);

// Equal-weight convenience wrapper for frame-level Gini checks.
double gini_of_values(const std::vector<double>& values);

struct FixedNResult {
  std::int64_t n = 0;
  double mean_width = 0.0;
  double sd_width = 0.0;
  double mean_g_hat = 0.0;
  double mean_v2 = 0.0;
  // Exceedance of the width over each requested threshold.
  std::vector<double> exceed_rates;
};

// Repeated fixed-cluster-count draws from a frame; reports width statistics
// and P(width > threshold) for each threshold.
FixedNResult fixed_n_experiment(const PopulationFrame& frame, std::int64_t n,
                                double alpha, std::int64_t k,
                                std::int64_t reps, std::uint64_t seed,
                                const std::vector<double>& thresholds,
                                bool merge_substrata = false);

}  // namespace giniseq
