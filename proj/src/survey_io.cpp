#include "giniseq/survey_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace giniseq {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string trimmed(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::int64_t parse_int(const std::string& text, const std::string& file,
                       std::size_t row, const std::string& what) {
  try {
    std::size_t pos = 0;
    std::int64_t v = std::stoll(trimmed(text), &pos);
    if (pos != trimmed(text).size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw DataError(file + " row " + std::to_string(row) + ": bad " + what +
                    " '" + text + "'");
  }
}

double parse_income(const std::string& text, const std::string& file,
                    std::size_t row) {
  double v = 0.0;
  try {
    std::size_t pos = 0;
    v = std::stod(trimmed(text), &pos);
    if (pos != trimmed(text).size()) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw DataError(file + " row " + std::to_string(row) +
                    ": bad income '" + text + "'");
  }
  if (!std::isfinite(v) || v < 0.0) {
    throw DataError(file + " row " + std::to_string(row) +
                    ": income must be finite and nonnegative");
  }
  return v;
}

}  // namespace

SurveyDataset load_survey(const std::string& frame_path,
                          const std::string& households_path) {
  std::ifstream frame_in(frame_path);
  if (!frame_in) throw DataError("cannot open frame file " + frame_path);
  std::ifstream hh_in(households_path);
  if (!hh_in) {
    throw DataError("cannot open households file " + households_path);
  }

  SurveyDataset data;
  // (stratum_id, cluster_id) -> (stratum index, cluster index)
  std::map<std::int64_t, std::size_t> stratum_index;
  std::map<std::pair<std::int64_t, std::int64_t>, std::size_t> cluster_index;

  std::string line;
  std::size_t row = 0;
  std::getline(frame_in, line);  // header
  ++row;
  while (std::getline(frame_in, line)) {
    ++row;
    if (trimmed(line).empty()) continue;
    auto fields = split_csv(line);
    if (fields.size() != 4) {
      throw DataError(frame_path + " row " + std::to_string(row) +
                      ": expected 4 columns");
    }
    std::int64_t sid = parse_int(fields[0], frame_path, row, "stratum_id");
    std::int64_t cid = parse_int(fields[1], frame_path, row, "cluster_id");
    std::int64_t m1 = parse_int(fields[2], frame_path, row, "m_sub1");
    std::int64_t m2 = parse_int(fields[3], frame_path, row, "m_sub2");
    if (m1 < 0 || m2 < 0 || m1 + m2 == 0) {
      throw DataError(frame_path + " row " + std::to_string(row) +
                      ": household counts must be nonnegative, cluster nonempty");
    }
    auto sit = stratum_index.find(sid);
    if (sit == stratum_index.end()) {
      sit = stratum_index.emplace(sid, data.frame.strata.size()).first;
      data.frame.strata.push_back({sid, {}});
      data.incomes.emplace_back();
    }
    std::size_t s = sit->second;
    if (cluster_index.count({sid, cid})) {
      throw DataError(frame_path + " row " + std::to_string(row) +
                      ": duplicate cluster");
    }
    cluster_index[{sid, cid}] = data.frame.strata[s].clusters.size();
    ClusterFrame cf;
    cf.cluster_id = cid;
    cf.substrata[0].household_count = m1;
    cf.substrata[1].household_count = m2;
    data.frame.strata[s].clusters.push_back(std::move(cf));
    data.incomes[s].emplace_back();
  }
  if (data.frame.strata.empty()) {
    throw DataError(frame_path + ": no clusters");
  }

  row = 0;
  std::getline(hh_in, line);  // header
  ++row;
  while (std::getline(hh_in, line)) {
    ++row;
    if (trimmed(line).empty()) continue;
    auto fields = split_csv(line);
    if (fields.size() != 5) {
      throw DataError(households_path + " row " + std::to_string(row) +
                      ": expected 5 columns");
    }
    std::int64_t sid = parse_int(fields[0], households_path, row, "stratum_id");
    std::int64_t cid = parse_int(fields[1], households_path, row, "cluster_id");
    std::int64_t bid =
        parse_int(fields[2], households_path, row, "substratum_id");
    parse_int(fields[3], households_path, row, "household_id");
    double income = parse_income(fields[4], households_path, row);
    if (bid != 1 && bid != 2) {
      throw DataError(households_path + " row " + std::to_string(row) +
                      ": substratum_id must be 1 or 2");
    }
    auto cit = cluster_index.find({sid, cid});
    if (cit == cluster_index.end()) {
      throw DataError(households_path + " row " + std::to_string(row) +
                      ": household references unknown cluster (" +
                      std::to_string(sid) + "," + std::to_string(cid) + ")");
    }
    std::size_t s = stratum_index.at(sid);
    data.incomes[s][cit->second][bid - 1].push_back(income);
  }

  // Frame counts must cover the surveyed households, and every cluster
  // must be drawable (at least one surveyed household per sub-stratum).
  for (std::size_t s = 0; s < data.frame.strata.size(); ++s) {
    const auto& st = data.frame.strata[s];
    for (std::size_t c = 0; c < st.clusters.size(); ++c) {
      for (int b = 0; b < 2; ++b) {
        auto surveyed =
            static_cast<std::int64_t>(data.incomes[s][c][b].size());
        auto count = st.clusters[c].substrata[b].household_count;
        if (surveyed > count) {
          throw DataError("cluster (" + std::to_string(st.stratum_id) + "," +
                          std::to_string(st.clusters[c].cluster_id) +
                          ") sub-stratum " + std::to_string(b + 1) + " has " +
                          std::to_string(surveyed) +
                          " surveyed households but frame count " +
                          std::to_string(count));
        }
        if (surveyed == 0) {
          throw DataError("cluster (" + std::to_string(st.stratum_id) + "," +
                          std::to_string(st.clusters[c].cluster_id) +
                          ") sub-stratum " + std::to_string(b + 1) +
                          " has no surveyed households");
        }
      }
    }
  }
  data.frame.validate();
  return data;
}

void write_survey_files(const SurveyDataset& dataset,
                        const std::string& frame_path,
                        const std::string& households_path) {
  std::ofstream frame_out(frame_path);
  if (!frame_out) throw DataError("cannot write " + frame_path);
  std::ofstream hh_out(households_path);
  if (!hh_out) throw DataError("cannot write " + households_path);

  frame_out << "stratum_id,cluster_id,m_sub1,m_sub2\n";
  hh_out << "stratum_id,cluster_id,substratum_id,household_id,income\n";
  hh_out.precision(17);
  for (std::size_t s = 0; s < dataset.frame.strata.size(); ++s) {
    const auto& st = dataset.frame.strata[s];
    for (std::size_t c = 0; c < st.clusters.size(); ++c) {
      const auto& cl = st.clusters[c];
      frame_out << st.stratum_id << ',' << cl.cluster_id << ','
                << cl.substrata[0].household_count << ','
                << cl.substrata[1].household_count << '\n';
      for (int b = 0; b < 2; ++b) {
        const auto& xs = dataset.incomes[s][c][b];
        for (std::size_t h = 0; h < xs.size(); ++h) {
          hh_out << st.stratum_id << ',' << cl.cluster_id << ',' << (b + 1)
                 << ',' << (h + 1) << ',' << xs[h] << '\n';
        }
      }
    }
  }
}

SurveyDataset make_survey_dataset(const PopulationFrame& frame,
                                  std::int64_t k, std::uint64_t seed) {
  SurveyDataset data;
  Rng root(seed);
  data.frame.strata.reserve(frame.strata.size());
  for (std::size_t s = 0; s < frame.strata.size(); ++s) {
    const auto& st = frame.strata[s];
    StratumFrame out_st;
    out_st.stratum_id = st.stratum_id;
    data.incomes.emplace_back();
    for (std::size_t c = 0; c < st.clusters.size(); ++c) {
      const auto& cl = st.clusters[c];
      ClusterFrame out_cl;
      out_cl.cluster_id = cl.cluster_id;
      data.incomes[s].emplace_back();
      Rng rng = root.substream(s + 1, c + 1);
      for (int b = 0; b < 2; ++b) {
        out_cl.substrata[b].household_count = cl.substrata[b].household_count;
        auto res = srs_households(frame, s, c, b, k, rng);
        for (auto idx : res.indices) {
          data.incomes[s][c][b].push_back(cl.substrata[b].incomes[idx]);
        }
      }
      out_st.clusters.push_back(std::move(out_cl));
    }
    data.frame.strata.push_back(std::move(out_st));
  }
  return data;
}

ReplaySource::ReplaySource(const SurveyDataset& dataset, std::uint64_t seed)
    : dataset_(dataset),
      totals_(dataset.totals()),
      order_(dataset.frame.strata.size()),
      position_(dataset.frame.strata.size(), 0),
      next_draw_index_(dataset.frame.strata.size(), 0) {
  Rng root(seed);
  for (std::size_t s = 0; s < order_.size(); ++s) {
    auto& ord = order_[s];
    ord.resize(dataset.frame.strata[s].clusters.size());
    std::iota(ord.begin(), ord.end(), std::size_t{0});
    Rng rng = root.substream(s + 1);
    // Fisher-Yates with the shared substream scheme.
    for (std::size_t i = ord.size(); i > 1; --i) {
      std::swap(ord[i - 1], ord[rng.below(i)]);
    }
  }
}

std::int64_t ReplaySource::remaining(std::size_t stratum_index) const {
  return static_cast<std::int64_t>(order_.at(stratum_index).size() -
                                   position_.at(stratum_index));
}

std::vector<ClusterDraw> ReplaySource::draw(std::size_t stratum_index,
                                            std::int64_t count) {
  if (stratum_index >= order_.size()) throw SourceError("no such stratum");
  if (count > remaining(stratum_index)) {
    throw SourceError("stratum " + std::to_string(stratum_index + 1) +
                      " exhausted: requested " + std::to_string(count) +
                      ", remaining " +
                      std::to_string(remaining(stratum_index)));
  }
  const auto& st = dataset_.frame.strata[stratum_index];
  std::vector<ClusterDraw> out;
  out.reserve(count);
  for (std::int64_t i = 0; i < count; ++i) {
    std::size_t c = order_[stratum_index][position_[stratum_index]++];
    const auto& cl = st.clusters[c];
    ClusterDraw d;
    d.stratum_index = stratum_index;
    d.stratum_id = st.stratum_id;
    d.cluster_id = cl.cluster_id;
    d.draw_index = next_draw_index_[stratum_index]++;
    d.cluster_households = cl.total_households();
    d.pps_probability =
        static_cast<double>(d.cluster_households) /
        static_cast<double>(totals_.stratum_households[stratum_index]);
    for (int b = 0; b < 2; ++b) {
      SubStratumDraw sub;
      sub.substratum_id = b + 1;
      sub.frame_count = cl.substrata[b].household_count;
      sub.incomes = dataset_.incomes[stratum_index][c][b];
      sub.selected_count = static_cast<std::int64_t>(sub.incomes.size());
      sub.take_all = sub.selected_count == sub.frame_count;
      d.substrata.push_back(std::move(sub));
    }
    out.push_back(std::move(d));
  }
  return out;
}

std::map<std::string, std::string> parse_config_file(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file " + path);
  std::map<std::string, std::string> out;
  std::string line;
  std::string section;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trimmed(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') {
      section = trimmed(line.substr(1, line.size() - 2));
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw DataError(path + " row " + std::to_string(row) +
                      ": expected key = value");
    }
    std::string key = trimmed(line.substr(0, eq));
    std::string value = trimmed(line.substr(eq + 1));
    out[section.empty() ? key : section + "." + key] = value;
  }
  return out;
}

}  // namespace giniseq
