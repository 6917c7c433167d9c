#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "giniseq/montecarlo.hpp"
#include "giniseq/sequential.hpp"

namespace giniseq {

enum class ReportFormat { Table, Delimited };

ReportFormat parse_report_format(const std::string& text);

// Replication-study report, columns fixed to the simulation-table layout:
// label, reps, mean/sd final size, mean Gini, size ratio to C, variance
// ratio, coverage (se), mean/sd width, exceedance rate (se).
void write_report(std::ostream& os, const std::string& label,
                  const MonteCarloReport& report, ReportFormat format);

// One sequential/two-stage run: final size with pilot, Gini with its
// standard error V/sqrt(n), CI bounds and width.
void write_outcome(std::ostream& os, const std::string& label,
                   std::int64_t total_clusters,
                   const SequentialOutcome& outcome, ReportFormat format);

// Fixed-n row: n, mean/sd width, exceedance per threshold.
void write_fixed_n(std::ostream& os, const std::string& label,
                   const FixedNResult& result,
                   const std::vector<double>& thresholds,
                   ReportFormat format);

// Six significant digits, dot decimal; shared by both formats.
std::string format_number(double v);

struct ParsedReport {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Reads back a delimited report (round-trip checks).
ParsedReport parse_delimited(std::istream& is);

}  // namespace giniseq
