#include "giniseq/report.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <sstream>

namespace giniseq {

ReportFormat parse_report_format(const std::string& text) {
  if (text == "table") return ReportFormat::Table;
  if (text == "delimited") return ReportFormat::Delimited;
  throw std::invalid_argument("format must be 'table' or 'delimited'");
}

std::string format_number(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

namespace {

void emit(std::ostream& os, const std::vector<std::string>& header,
          const std::vector<std::string>& row, ReportFormat format) {
  if (format == ReportFormat::Delimited) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      os << (i ? "," : "") << header[i];
    }
    os << '\n';
    for (std::size_t i = 0; i < row.size(); ++i) {
      os << (i ? "," : "") << row[i];
    }
    os << '\n';
    return;
  }
  std::vector<std::size_t> widths(header.size());
  for (std::size_t i = 0; i < header.size(); ++i) {
    widths[i] = std::max(header[i].size(), row[i].size()) + 2;
  }
  for (std::size_t i = 0; i < header.size(); ++i) {
    os << std::setw(static_cast<int>(widths[i])) << header[i];
  }
  os << '\n';
  for (std::size_t i = 0; i < row.size(); ++i) {
    os << std::setw(static_cast<int>(widths[i])) << row[i];
  }
  os << '\n';
}

}  // namespace

void write_report(std::ostream& os, const std::string& label,
                  const MonteCarloReport& r, ReportFormat format) {
  std::vector<std::string> header = {
      "label",       "reps",       "mean_N",     "sd_N",
      "mean_G",      "N_over_C",   "V2_over_xi2", "coverage",
      "coverage_se", "mean_width", "sd_width",   "exceed_rate",
      "exceed_se",   "cap_hits"};
  std::vector<std::string> row = {label,
                                  std::to_string(r.reps),
                                  format_number(r.mean_final_size),
                                  format_number(r.sd_final_size),
                                  format_number(r.mean_g_hat),
                                  format_number(r.ratio_size_to_c),
                                  format_number(r.mean_v2_over_xi2),
                                  format_number(r.coverage),
                                  format_number(r.coverage_se),
                                  format_number(r.mean_width),
                                  format_number(r.sd_width),
                                  format_number(r.exceed_rate),
                                  format_number(r.exceed_se),
                                  std::to_string(r.cap_hits)};
  emit(os, header, row, format);
}

void write_outcome(std::ostream& os, const std::string& label,
                   std::int64_t total_clusters,
                   const SequentialOutcome& outcome, ReportFormat format) {
  double se = std::sqrt(outcome.v2 / static_cast<double>(outcome.final_n));
  std::vector<std::string> header = {"label",   "H",        "final_n",
                                     "pilot",   "g_hat",    "se_g",
                                     "ci_low",  "ci_high",  "width",
                                     "hit_cap"};
  std::vector<std::string> row = {label,
                                  std::to_string(total_clusters),
                                  std::to_string(outcome.final_n),
                                  std::to_string(outcome.pilot.realized()),
                                  format_number(outcome.g_hat),
                                  format_number(se),
                                  format_number(outcome.ci.low),
                                  format_number(outcome.ci.high),
                                  format_number(outcome.ci.width),
                                  outcome.hit_cap ? "1" : "0"};
  emit(os, header, row, format);
}

void write_fixed_n(std::ostream& os, const std::string& label,
                   const FixedNResult& result,
                   const std::vector<double>& thresholds,
                   ReportFormat format) {
  std::vector<std::string> header = {"label", "n", "mean_width", "sd_width",
                                     "mean_G", "mean_V2"};
  std::vector<std::string> row = {label,
                                  std::to_string(result.n),
                                  format_number(result.mean_width),
                                  format_number(result.sd_width),
                                  format_number(result.mean_g_hat),
                                  format_number(result.mean_v2)};
  for (std::size_t t = 0; t < thresholds.size(); ++t) {
    header.push_back("exceed_" + format_number(thresholds[t]));
    row.push_back(format_number(result.exceed_rates[t]));
  }
  emit(os, header, row, format);
}

ParsedReport parse_delimited(std::istream& is) {
  ParsedReport out;
  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (first) {
      out.header = std::move(fields);
      first = false;
    } else {
      out.rows.push_back(std::move(fields));
    }
  }
  return out;
}

}  // namespace giniseq
