#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

#include "giniseq/distributions.hpp"
#include "giniseq/rng.hpp"

namespace giniseq {

class FrameError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Sub-stratum of one cluster: household count, and the incomes themselves
// when the frame is a generated pseudo-population. Real frames ingested
// from survey files carry only the count; incomes arrive with the sample.
struct SubStratumFrame {
  std::int64_t household_count = 0;
  std::vector<double> incomes;  // empty for real frames
};

struct ClusterFrame {
  std::int64_t cluster_id = 0;
  std::array<SubStratumFrame, 2> substrata;  // [0]=affluent, [1]=non-affluent

  std::int64_t total_households() const {
    return substrata[0].household_count + substrata[1].household_count;
  }
};

struct StratumFrame {
  std::int64_t stratum_id = 0;
  std::vector<ClusterFrame> clusters;

  std::int64_t total_households() const;
};

// Full sampling frame: strata -> clusters -> two sub-strata -> households.
struct PopulationFrame {
  std::vector<StratumFrame> strata;

  std::size_t stratum_count() const { return strata.size(); }
  std::int64_t cluster_count() const;                 // H
  std::int64_t cluster_count(std::size_t s) const;    // H_s
  double allocation(std::size_t s) const;             // a_s = H_s / H
  std::vector<double> allocations() const;

  // Throws FrameError on violated frame invariants.
  void validate() const;
};

struct StratumSpec {
  std::int64_t clusters = 600;         // H_s
  std::int64_t min_households = 50;    // per sub-stratum nominal count range
  std::int64_t max_households = 150;
};

// Pseudo-population recipe. Per cluster, each sub-stratum's nominal count
// is drawn uniformly on [min_households, max_households]; the cluster's
// households are then drawn i.i.d. from the income law and assigned to the
// affluent sub-stratum when income >= the law's q_aff quantile. Each
// sub-stratum is padded to >= k households from the matching truncated law.
// The default strata differ in cluster size (small rural-like clusters,
// larger urban-like ones), which sets the design effect of the household
// weights.
struct PopulationSpec {
  IncomeDistribution distribution;
  std::vector<StratumSpec> strata;
  double affluence_quantile = 0.55;
  std::int64_t households_per_substratum = 2;  // k

  std::vector<std::int64_t> clusters_per_stratum() const {
    std::vector<std::int64_t> out;
    for (const auto& s : strata) out.push_back(s.clusters);
    return out;
  }

  static PopulationSpec defaults(IncomeDistribution dist) {
    return PopulationSpec{
        std::move(dist), {{600, 50, 150}, {600, 125, 375}}, 0.55, 2};
  }
};

PopulationFrame generate_pseudo_population(const PopulationSpec& spec,
                                           std::uint64_t seed);

struct PpsDraw {
  std::size_t cluster_index = 0;
  double pps_probability = 0.0;  // n_s * M_sc / sum_c M_sc (raw formula)
};

// n_s independent PPSWR draws from one stratum, probability proportional
// to cluster household count.
std::vector<PpsDraw> pps_sample_clusters(const PopulationFrame& frame,
                                         std::size_t stratum_index,
                                         std::int64_t n_s, Rng& rng);

struct SrsResult {
  std::vector<std::size_t> indices;
  bool take_all = false;
};

// Uniform without-replacement sample of k household indices from one
// sub-stratum; take-all fallback when fewer than k households exist.
SrsResult srs_households(const PopulationFrame& frame,
                         std::size_t stratum_index, std::size_t cluster_index,
                         std::size_t substratum_index, std::int64_t k,
                         Rng& rng);

// One realized sub-stratum sample within a cluster draw. selected_count is
// the household-stage sample size actually used in the weight formula (k,
// or the full count under take-all, or whatever a survey file delivered).
struct SubStratumDraw {
  std::int64_t substratum_id = 0;  // 1 = affluent, 2 = non-affluent, 0 = merged
  std::int64_t frame_count = 0;    // M_{scb}
  std::int64_t selected_count = 0;
  bool take_all = false;
  std::vector<double> incomes;
};

// One PPSWR cluster draw. Duplicate selections of the same cluster are
// distinct draws with their own draw_index and household samples.
struct ClusterDraw {
  std::size_t stratum_index = 0;
  std::int64_t stratum_id = 0;
  std::int64_t cluster_id = 0;
  std::int64_t draw_index = 0;
  std::int64_t cluster_households = 0;  // M_{sc}
  double pps_probability = 0.0;
  std::vector<SubStratumDraw> substrata;
};

struct Observation {
  std::size_t stratum_index = 0;
  std::int64_t draw_index = 0;
  std::int64_t substratum_id = 0;
  double income = 0.0;
  double raw_weight = 0.0;
  double weight = 0.0;  // normalized, sums to 1
};

struct WeightedSample {
  std::vector<Observation> observations;
  std::int64_t n = 0;              // total cluster draws
  std::vector<std::int64_t> n_s;   // per-stratum draw counts
  double raw_weight_total = 0.0;   // W
};

// Per-stratum frame totals needed by the weight formula; decoupled from
// PopulationFrame so ingested survey files can supply them too.
struct DesignTotals {
  std::vector<std::int64_t> stratum_households;  // sum_c M_{sc} per stratum
  std::vector<std::int64_t> stratum_clusters;    // H_s
  std::vector<double> allocations;               // a_s

  static DesignTotals from_frame(const PopulationFrame& frame);
};

// Splits an integer cluster total across strata proportionally to the
// allocation fractions (largest-remainder rounding; sums exactly to total).
std::vector<std::int64_t> apportion_clusters(
    std::int64_t total, const std::vector<double>& allocations);

// Raw weight W = (sum_c M_sc) * M_scb / (n_s * M_sc * selected_count) per
// household, then normalized so the weights sum to one.
WeightedSample compute_weights(const DesignTotals& totals,
                               const std::vector<ClusterDraw>& draws);

// Yields additional cluster draws on demand; implemented by the synthetic
// frame sampler below and by the survey-file replay source.
class ClusterSource {
 public:
  virtual ~ClusterSource() = default;
  virtual std::vector<ClusterDraw> draw(std::size_t stratum_index,
                                        std::int64_t count) = 0;
  virtual const DesignTotals& totals() const = 0;
};

// PPSWR + per-sub-stratum SRS over a synthetic frame. With merge_substrata
// set, the two sub-strata are pooled and 2k households drawn by SRS from
// the whole cluster (the no-sub-stratification comparator design).
class FrameSampler : public ClusterSource {
 public:
  FrameSampler(const PopulationFrame& frame, std::int64_t k, Rng rng,
               bool merge_substrata = false);

  std::vector<ClusterDraw> draw(std::size_t stratum_index,
                                std::int64_t count) override;
  const DesignTotals& totals() const override { return totals_; }

 private:
  const PopulationFrame& frame_;
  std::int64_t k_;
  Rng rng_;
  bool merge_substrata_;
  DesignTotals totals_;
  std::vector<std::int64_t> next_draw_index_;
};

}  // namespace giniseq
