#include "giniseq/design.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "giniseq/math.hpp"

namespace giniseq {

std::int64_t StratumFrame::total_households() const {
  std::int64_t total = 0;
  for (const auto& c : clusters) total += c.total_households();
  return total;
}

std::int64_t PopulationFrame::cluster_count() const {
  std::int64_t h = 0;
  for (const auto& s : strata) h += static_cast<std::int64_t>(s.clusters.size());
  return h;
}

std::int64_t PopulationFrame::cluster_count(std::size_t s) const {
  return static_cast<std::int64_t>(strata.at(s).clusters.size());
}

double PopulationFrame::allocation(std::size_t s) const {
  return static_cast<double>(cluster_count(s)) /
         static_cast<double>(cluster_count());
}

std::vector<double> PopulationFrame::allocations() const {
  std::vector<double> a;
  a.reserve(strata.size());
  for (std::size_t s = 0; s < strata.size(); ++s) a.push_back(allocation(s));
  return a;
}

void PopulationFrame::validate() const {
  if (strata.empty()) throw FrameError("frame has no strata");
  for (const auto& st : strata) {
    if (st.clusters.size() < 2) {
      throw FrameError("stratum " + std::to_string(st.stratum_id) +
                       " has fewer than 2 clusters");
    }
    for (const auto& c : st.clusters) {
      for (const auto& sub : c.substrata) {
        if (sub.household_count < 0) throw FrameError("negative count");
        if (!sub.incomes.empty() &&
            static_cast<std::int64_t>(sub.incomes.size()) !=
                sub.household_count) {
          throw FrameError("income list size disagrees with household count");
        }
        for (double x : sub.incomes) {
          if (!(x >= 0.0) || !std::isfinite(x)) {
            throw FrameError("incomes must be finite and nonnegative");
          }
        }
      }
    }
  }
  double asum = 0.0;
  for (std::size_t s = 0; s < strata.size(); ++s) asum += allocation(s);
  if (std::abs(asum - 1.0) > 1e-12) {
    throw FrameError("allocation proportions do not sum to 1");
  }
}

namespace {

double truncated_draw(const IncomeDistribution& dist, Rng& rng,
                      double threshold, bool above) {
  // Rejection from the unrestricted law; acceptance mass is 1 - q_aff
  // (above) or q_aff (below), both bounded away from zero for sane specs.
  for (int i = 0; i < 100000; ++i) {
    double x = dist.sample(rng);
    if (above ? (x >= threshold) : (x < threshold)) return x;
  }
  throw FrameError("truncated income draw failed to accept");
}

}  // namespace

PopulationFrame generate_pseudo_population(const PopulationSpec& spec,
                                           std::uint64_t seed) {
  if (spec.strata.empty()) {
    throw FrameError("spec must name at least one stratum");
  }
  for (const auto& st : spec.strata) {
    if (st.clusters < 2) throw FrameError("each stratum needs at least 2 clusters");
    if (st.min_households < 1 || st.max_households < st.min_households) {
      throw std::invalid_argument("bad household-count range");
    }
  }
  if (!(spec.affluence_quantile > 0.0 && spec.affluence_quantile < 1.0)) {
    throw std::invalid_argument("affluence quantile must be in (0,1)");
  }
  if (spec.households_per_substratum < 1) {
    throw std::invalid_argument("k must be >= 1");
  }

  const double threshold = spec.distribution.quantile(spec.affluence_quantile);
  Rng root(seed);

  PopulationFrame frame;
  frame.strata.resize(spec.strata.size());
  for (std::size_t s = 0; s < spec.strata.size(); ++s) {
    const StratumSpec& ss = spec.strata[s];
    StratumFrame& st = frame.strata[s];
    st.stratum_id = static_cast<std::int64_t>(s) + 1;
    st.clusters.resize(ss.clusters);
    for (std::size_t c = 0; c < st.clusters.size(); ++c) {
      Rng rng = root.substream(s + 1, c + 1);
      ClusterFrame& cl = st.clusters[c];
      cl.cluster_id = static_cast<std::int64_t>(c) + 1;

      std::int64_t span = ss.max_households - ss.min_households + 1;
      std::int64_t total = 0;
      for (int b = 0; b < 2; ++b) {
        total += ss.min_households + static_cast<std::int64_t>(rng.below(span));
      }
      auto& affluent = cl.substrata[0].incomes;
      auto& other = cl.substrata[1].incomes;
      for (std::int64_t h = 0; h < total; ++h) {
        double x = spec.distribution.sample(rng);
        (x >= threshold ? affluent : other).push_back(x);
      }
      while (static_cast<std::int64_t>(affluent.size()) <
             spec.households_per_substratum) {
        affluent.push_back(truncated_draw(spec.distribution, rng, threshold,
                                          /*above=*/true));
      }
      while (static_cast<std::int64_t>(other.size()) <
             spec.households_per_substratum) {
        other.push_back(truncated_draw(spec.distribution, rng, threshold,
                                       /*above=*/false));
      }
      cl.substrata[0].household_count =
          static_cast<std::int64_t>(affluent.size());
      cl.substrata[1].household_count =
          static_cast<std::int64_t>(other.size());
    }
  }
  return frame;
}

namespace {

std::vector<double> cluster_size_cumulative(const StratumFrame& st) {
  std::vector<double> cum;
  cum.reserve(st.clusters.size());
  double running = 0.0;
  for (const auto& c : st.clusters) {
    std::int64_t m = c.total_households();
    if (m <= 0) throw FrameError("cluster with no households");
    running += static_cast<double>(m);
    cum.push_back(running);
  }
  return cum;
}

std::size_t pps_pick(const std::vector<double>& cum, Rng& rng) {
  double u = rng.uniform01() * cum.back();
  auto it = std::upper_bound(cum.begin(), cum.end(), u);
  if (it == cum.end()) --it;
  return static_cast<std::size_t>(it - cum.begin());
}

// Uniform without-replacement sample of k indices from [0, m) by
// sequential selection; output is sorted and implementation-stable.
std::vector<std::size_t> srs_indices(std::int64_t m, std::int64_t k,
                                     Rng& rng) {
  std::vector<std::size_t> out;
  out.reserve(k);
  std::int64_t needed = k;
  for (std::int64_t i = 0; i < m && needed > 0; ++i) {
    double p = static_cast<double>(needed) / static_cast<double>(m - i);
    if (rng.uniform01() < p) {
      out.push_back(static_cast<std::size_t>(i));
      --needed;
    }
  }
  return out;
}

}  // namespace

std::vector<PpsDraw> pps_sample_clusters(const PopulationFrame& frame,
                                         std::size_t stratum_index,
                                         std::int64_t n_s, Rng& rng) {
  if (stratum_index >= frame.strata.size()) {
    throw FrameError("no such stratum");
  }
  if (n_s < 1) throw std::invalid_argument("n_s must be >= 1");
  const StratumFrame& st = frame.strata[stratum_index];
  if (st.clusters.empty()) throw FrameError("empty stratum");
  auto cum = cluster_size_cumulative(st);
  double total = cum.back();

  std::vector<PpsDraw> draws;
  draws.reserve(n_s);
  for (std::int64_t i = 0; i < n_s; ++i) {
    std::size_t c = pps_pick(cum, rng);
    double m = static_cast<double>(st.clusters[c].total_households());
    draws.push_back({c, static_cast<double>(n_s) * m / total});
  }
  return draws;
}

SrsResult srs_households(const PopulationFrame& frame,
                         std::size_t stratum_index, std::size_t cluster_index,
                         std::size_t substratum_index, std::int64_t k,
                         Rng& rng) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  const auto& sub = frame.strata.at(stratum_index)
                        .clusters.at(cluster_index)
                        .substrata.at(substratum_index);
  std::int64_t m = sub.household_count;
  if (m == 0) throw FrameError("empty sub-stratum");
  SrsResult res;
  if (m <= k) {
    res.take_all = true;
    res.indices.resize(m);
    std::iota(res.indices.begin(), res.indices.end(), std::size_t{0});
    return res;
  }
  res.indices = srs_indices(m, k, rng);
  return res;
}

std::vector<std::int64_t> apportion_clusters(
    std::int64_t total, const std::vector<double>& allocations) {
  std::vector<std::int64_t> out(allocations.size(), 0);
  std::vector<std::pair<double, std::size_t>> rem;
  std::int64_t assigned = 0;
  for (std::size_t s = 0; s < allocations.size(); ++s) {
    double exact = static_cast<double>(total) * allocations[s];
    out[s] = static_cast<std::int64_t>(std::floor(exact));
    assigned += out[s];
    rem.emplace_back(exact - std::floor(exact), s);
  }
  std::sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  for (std::size_t i = 0; assigned < total; ++i) {
    ++out[rem[i % rem.size()].second];
    ++assigned;
  }
  return out;
}

DesignTotals DesignTotals::from_frame(const PopulationFrame& frame) {
  DesignTotals t;
  for (const auto& st : frame.strata) {
    t.stratum_households.push_back(st.total_households());
    t.stratum_clusters.push_back(static_cast<std::int64_t>(st.clusters.size()));
  }
  std::int64_t h = std::accumulate(t.stratum_clusters.begin(),
                                   t.stratum_clusters.end(), std::int64_t{0});
  for (auto hs : t.stratum_clusters) {
    t.allocations.push_back(static_cast<double>(hs) / static_cast<double>(h));
  }
  return t;
}

WeightedSample compute_weights(const DesignTotals& totals,
                               const std::vector<ClusterDraw>& draws) {
  WeightedSample sample;
  sample.n_s.assign(totals.stratum_households.size(), 0);
  for (const auto& d : draws) {
    if (d.stratum_index >= sample.n_s.size()) {
      throw FrameError("draw references unknown stratum");
    }
    ++sample.n_s[d.stratum_index];
  }
  sample.n = static_cast<std::int64_t>(draws.size());

  KahanSum raw_total;
  for (const auto& d : draws) {
    double stratum_m =
        static_cast<double>(totals.stratum_households[d.stratum_index]);
    double n_s = static_cast<double>(sample.n_s[d.stratum_index]);
    for (const auto& sub : d.substrata) {
      if (sub.selected_count <= 0 || sub.incomes.empty()) {
        throw FrameError("sub-stratum draw without selected households");
      }
      double w = stratum_m * static_cast<double>(sub.frame_count) /
                 (n_s * static_cast<double>(d.cluster_households) *
                  static_cast<double>(sub.selected_count));
      for (double x : sub.incomes) {
        sample.observations.push_back(
            {d.stratum_index, d.draw_index, sub.substratum_id, x, w, 0.0});
        raw_total.add(w);
      }
    }
  }
  sample.raw_weight_total = raw_total.value();
  if (!(sample.raw_weight_total > 0.0)) {
    throw std::runtime_error("total raw weight is not positive");
  }
  for (auto& o : sample.observations) {
    o.weight = o.raw_weight / sample.raw_weight_total;
  }
  return sample;
}

FrameSampler::FrameSampler(const PopulationFrame& frame, std::int64_t k,
                           Rng rng, bool merge_substrata)
    : frame_(frame),
      k_(k),
      rng_(rng),
      merge_substrata_(merge_substrata),
      totals_(DesignTotals::from_frame(frame)),
      next_draw_index_(frame.strata.size(), 0) {
  if (k_ < 1) throw std::invalid_argument("k must be >= 1");
}

std::vector<ClusterDraw> FrameSampler::draw(std::size_t stratum_index,
                                            std::int64_t count) {
  if (stratum_index >= frame_.strata.size()) {
    throw SourceError("no such stratum");
  }
  const StratumFrame& st = frame_.strata[stratum_index];
  auto cum = cluster_size_cumulative(st);

  std::vector<ClusterDraw> out;
  out.reserve(count);
  for (std::int64_t i = 0; i < count; ++i) {
    std::size_t c = pps_pick(cum, rng_);
    const ClusterFrame& cl = st.clusters[c];
    ClusterDraw d;
    d.stratum_index = stratum_index;
    d.stratum_id = st.stratum_id;
    d.cluster_id = cl.cluster_id;
    d.draw_index = next_draw_index_[stratum_index]++;
    d.cluster_households = cl.total_households();
    d.pps_probability =
        static_cast<double>(d.cluster_households) / cum.back();

    if (merge_substrata_) {
      // Comparator design: no affluence split, SRS of 2k from the cluster.
      SubStratumDraw sub;
      sub.substratum_id = 0;
      sub.frame_count = cl.total_households();
      std::int64_t want = 2 * k_;
      if (sub.frame_count <= want) {
        sub.take_all = true;
        sub.selected_count = sub.frame_count;
        for (const auto& sf : cl.substrata) {
          sub.incomes.insert(sub.incomes.end(), sf.incomes.begin(),
                             sf.incomes.end());
        }
      } else {
        auto idx = srs_indices(sub.frame_count, want, rng_);
        sub.selected_count = want;
        std::int64_t split = cl.substrata[0].household_count;
        for (auto j : idx) {
          auto jj = static_cast<std::int64_t>(j);
          sub.incomes.push_back(
              jj < split ? cl.substrata[0].incomes[jj]
                         : cl.substrata[1].incomes[jj - split]);
        }
      }
      d.substrata.push_back(std::move(sub));
    } else {
      for (int b = 0; b < 2; ++b) {
        const SubStratumFrame& sf = cl.substrata[b];
        if (sf.incomes.empty()) {
          throw SourceError("frame has no incomes to sample from");
        }
        SubStratumDraw sub;
        sub.substratum_id = b + 1;
        sub.frame_count = sf.household_count;
        if (sf.household_count <= k_) {
          sub.take_all = true;
          sub.selected_count = sf.household_count;
          sub.incomes = sf.incomes;
        } else {
          auto idx = srs_indices(sf.household_count, k_, rng_);
          sub.selected_count = k_;
          for (auto j : idx) sub.incomes.push_back(sf.incomes[j]);
        }
        d.substrata.push_back(std::move(sub));
      }
    }
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace giniseq
