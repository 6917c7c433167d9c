#pragma once

#include <cstdint>
#include <vector>

#include "giniseq/design.hpp"
#include "giniseq/estimators.hpp"

namespace giniseq {

// Parameters shared by both adaptive procedures.
struct StoppingConfig {
  double alpha = 0.05;
  double omega = 0.015;   // target CI width, Gini units
  double delta = 2.0;     // penalty exponent in the stopping rule
  std::int64_t m_prime = 1;  // clusters added per deficient stratum per step
  std::int64_t k = 2;        // households per sub-stratum
  std::vector<double> allocations;       // {a_s}, sums to 1
  std::vector<std::int64_t> stratum_caps;  // {H_s}

  std::int64_t total_cap() const;  // H
  void validate() const;
};

struct PilotSizes {
  // The closed-form total: min{H, max{2, ceil((2z/omega)^(2/(delta+1)))}}.
  std::int64_t total_formula = 0;
  // Per-stratum sizes; their sum is the pilot the engines actually use.
  std::vector<std::int64_t> per_stratum;

  std::int64_t realized() const;
};

PilotSizes pilot_sizes(double alpha, double omega, double delta,
                       const std::vector<double>& allocations,
                       const std::vector<std::int64_t>& stratum_caps);

struct StoppingDecision {
  bool stop = false;
  double c_hat = 0.0;               // (4z^2/omega^2)(v2 + n^-delta)
  std::vector<double> c_s;          // c_hat * a_s
  std::vector<std::size_t> deficient;  // strata with n_s < c_hat * a_s
};

StoppingDecision stopping_check(std::int64_t n,
                                const std::vector<std::int64_t>& n_s,
                                double v2, const StoppingConfig& config);

enum class Procedure { PurelySequential, TwoStage };

struct TrajectoryPoint {
  std::int64_t n = 0;
  double v2 = 0.0;
  double c_hat = 0.0;
};

struct SequentialOutcome {
  Procedure procedure = Procedure::PurelySequential;
  std::int64_t final_n = 0;
  std::vector<std::int64_t> final_n_s;
  PilotSizes pilot;
  double g_hat = 0.0;
  double mu_hat = 0.0;
  double v2 = 0.0;
  ConfidenceInterval ci;
  std::vector<TrajectoryPoint> trajectory;
  bool hit_cap = false;
};

// Purely sequential engine: pilot, then m' extra clusters per deficient
// stratum per step until the stopping rule holds or every deficient
// stratum is capped.
SequentialOutcome run_purely_sequential(ClusterSource& source,
                                        const StoppingConfig& config);

struct TwoStageSize {
  std::int64_t q = 0;
  std::vector<std::int64_t> q_s;
  bool capped = false;
};

// Q = min{H, max{t, ceil(4 z^2 V_t^2 / omega^2)}}; Q_s = min{H_s, ceil(Q a_s)}.
TwoStageSize two_stage_final_size(std::int64_t t, double v2_t,
                                  const StoppingConfig& config);

// Two-stage engine: pilot, one variance estimate, one batch top-up.
SequentialOutcome run_two_stage(ClusterSource& source,
                                const StoppingConfig& config);

}  // namespace giniseq
