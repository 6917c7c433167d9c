#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "giniseq/design.hpp"
#include "giniseq/rng.hpp"

namespace giniseq {

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Ingested survey microdata: the frame (cluster counts only) plus the
// surveyed household incomes per [stratum][cluster][sub-stratum].
struct SurveyDataset {
  PopulationFrame frame;
  std::vector<std::vector<std::array<std::vector<double>, 2>>> incomes;

  DesignTotals totals() const { return DesignTotals::from_frame(frame); }
};

// Frame file: stratum_id,cluster_id,m_sub1,m_sub2 (header row).
// Households file: stratum_id,cluster_id,substratum_id,household_id,income.
// Validation failures carry the offending row number.
SurveyDataset load_survey(const std::string& frame_path,
                          const std::string& households_path);

void write_survey_files(const SurveyDataset& dataset,
                        const std::string& frame_path,
                        const std::string& households_path);

// Fabricates a survey-file-shaped extract from a generated frame by
// SRS-sampling k households per sub-stratum of every cluster.
SurveyDataset make_survey_dataset(const PopulationFrame& frame,
                                  std::int64_t k, std::uint64_t seed);

// Reveals ingested clusters stratum-by-stratum in a seeded random order,
// so sequential engines can run over real data as if surveying
// progressively. Exhausting a stratum raises SourceError.
class ReplaySource : public ClusterSource {
 public:
  ReplaySource(const SurveyDataset& dataset, std::uint64_t seed);

  std::vector<ClusterDraw> draw(std::size_t stratum_index,
                                std::int64_t count) override;
  const DesignTotals& totals() const override { return totals_; }

  std::int64_t remaining(std::size_t stratum_index) const;

 private:
  const SurveyDataset& dataset_;
  DesignTotals totals_;
  std::vector<std::vector<std::size_t>> order_;
  std::vector<std::size_t> position_;
  std::vector<std::int64_t> next_draw_index_;
};

// Flat key-value configuration with [section] headers; returned keys are
// "section.key". '#' starts a comment.
std::map<std::string, std::string> parse_config_file(
    const std::string& path);

}  // namespace giniseq
