#pragma once

#include <cstdint>
#include <vector>

#include "giniseq/design.hpp"
#include "giniseq/sequential.hpp"

namespace giniseq {

// Closed-form population Gini of a supported income law.
double analytic_gini(const IncomeDistribution& dist);

struct OracleSet {
  double analytic_gini = 0.0;
  double xi2_hat = 0.0;
  double xi2_se = 0.0;  // Monte Carlo standard error of xi2_hat
  std::int64_t c = 0;   // optimal_C(xi2_hat, alpha, omega)
};

// Estimates the asymptotic variance xi^2 by averaging V^2 computed at
// n_large cluster draws over `reps` fresh pseudo-populations.
OracleSet estimate_xi2(const PopulationSpec& spec, std::int64_t n_large,
                       std::int64_t reps, std::uint64_t seed, double alpha,
                       double omega);

struct ReplicationRecord {
  std::int64_t index = 0;
  std::int64_t final_n = 0;
  std::int64_t pilot = 0;
  double g_hat = 0.0;
  double v2 = 0.0;
  double width = 0.0;
  bool covered = false;
  bool exceeded = false;
  bool hit_cap = false;
};

struct MonteCarloReport {
  std::int64_t reps = 0;
  double mean_final_size = 0.0;
  double sd_final_size = 0.0;
  double mean_g_hat = 0.0;
  double ratio_size_to_c = 0.0;     // mean(N) / C
  double mean_v2_over_xi2 = 0.0;
  double coverage = 0.0;
  double coverage_se = 0.0;
  double mean_width = 0.0;
  double sd_width = 0.0;
  double exceed_rate = 0.0;         // P(width > omega)
  double exceed_se = 0.0;
  std::int64_t cap_hits = 0;
  std::vector<ReplicationRecord> records;  // audit stream, by index
};

// Builds the stopping configuration implied by a population spec.
StoppingConfig make_stopping_config(const PopulationSpec& spec, double alpha,
                                    double omega, double delta,
                                    std::int64_t m_prime);

struct SimulationPlan {
  Procedure procedure = Procedure::PurelySequential;
  PopulationSpec spec;
  StoppingConfig config;
  std::int64_t reps = 500;
  std::uint64_t seed = 1;
  int workers = 1;
  bool merge_substrata = false;  // no-sub-strata comparator design
};

// R independent seeded replications; a fresh pseudo-population per
// replication; deterministic for any worker count.
MonteCarloReport run_replications(const SimulationPlan& plan,
                                  const OracleSet& oracle);

// Recomputes the aggregate columns from the audit stream; used to verify
// aggregation exactness.
MonteCarloReport aggregate_records(std::vector<ReplicationRecord> records,
                                   const OracleSet& oracle, double omega);

struct DesignComparison {
  FixedNResult fixed_proposed;
  FixedNResult fixed_comparator;
  double seq_mean_n_proposed = 0.0;
  double seq_mean_n_comparator = 0.0;
  double two_stage_mean_n_proposed = 0.0;
  double two_stage_mean_n_comparator = 0.0;
};

// Sub-stratification effect study: fixed-n estimate/variance comparison
// plus final sizes under both engines, proposed design vs the merged
// (no sub-strata, 2k-household SRS) comparator, on matched seeds.
DesignComparison compare_designs(const PopulationSpec& spec,
                                 const StoppingConfig& config,
                                 std::int64_t n_fixed, std::int64_t reps,
                                 std::uint64_t seed, int workers);

}  // namespace giniseq
