#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "giniseq/design.hpp"
#include "giniseq/estimators.hpp"
#include "giniseq/math.hpp"
#include "giniseq/rng.hpp"

namespace giniseq::testing {

// Equal-weight single-stratum sample; every observation belongs to one
// cluster draw so the variance machinery is bypassed.
inline WeightedSample equal_weight_sample(const std::vector<double>& values) {
  WeightedSample s;
  double w = 1.0 / static_cast<double>(values.size());
  for (double x : values) s.observations.push_back({0, 0, 0, x, w, w});
  s.n = 1;
  s.n_s = {1};
  s.raw_weight_total = 1.0;
  return s;
}

// Random multi-stratum sample with positive normalized weights; incomes
// optionally forced tie-free by jitter.
inline WeightedSample random_sample(Rng& rng, bool tie_free,
                                    int max_strata = 3,
                                    int max_draws = 6,
                                    int max_households = 5) {
  WeightedSample s;
  int strata = 1 + static_cast<int>(rng.below(max_strata));
  std::vector<double> raw;
  for (int st = 0; st < strata; ++st) {
    int draws = 2 + static_cast<int>(rng.below(max_draws - 1));
    s.n_s.push_back(draws);
    for (int d = 0; d < draws; ++d) {
      int hh = 1 + static_cast<int>(rng.below(max_households));
      for (int h = 0; h < hh; ++h) {
        double income = std::exp(2.0 * rng.uniform01());
        if (!tie_free) {
          // Push mass onto a small grid so ties actually occur.
          income = 1.0 + static_cast<double>(rng.below(4));
        }
        double w = 0.1 + rng.uniform01();
        s.observations.push_back(
            {static_cast<std::size_t>(st), d, 1, income, w, w});
        raw.push_back(w);
      }
    }
    s.n += s.n_s.back();
  }
  KahanSum total;
  for (double w : raw) total.add(w);
  s.raw_weight_total = total.value();
  for (auto& o : s.observations) o.weight = o.raw_weight / s.raw_weight_total;
  return s;
}

// Direct double-loop evaluation of the plug-in Gini with the <= CDF
// convention; the production code must agree to 1e-10.
inline double naive_gini(const WeightedSample& s) {
  const auto& obs = s.observations;
  double mu = 0.0;
  for (const auto& o : obs) mu += o.weight * o.income;
  double acc = 0.0;
  for (const auto& oi : obs) {
    double cdf = 0.0;
    for (const auto& oj : obs) {
      if (oj.income <= oi.income) cdf += oj.weight;
    }
    acc += oi.weight * oi.income * (1.0 - cdf);
  }
  return 1.0 - (2.0 / mu) * acc;
}

// Direct evaluation of the per-draw linearization scores.
inline std::vector<std::vector<double>> naive_scores(const WeightedSample& s,
                                                     double g, double mu) {
  const auto& obs = s.observations;
  std::vector<std::vector<double>> per_draw(s.n_s.size());
  std::vector<std::vector<std::int64_t>> draw_ids(s.n_s.size());
  for (std::size_t st = 0; st < s.n_s.size(); ++st) {
    for (const auto& o : obs) {
      if (o.stratum_index != st) continue;
      bool seen = false;
      for (auto id : draw_ids[st]) seen = seen || id == o.draw_index;
      if (!seen) draw_ids[st].push_back(o.draw_index);
    }
    for (auto id : draw_ids[st]) {
      double u = 0.0;
      for (const auto& o : obs) {
        if (o.stratum_index != st || o.draw_index != id) continue;
        double cdf = 0.0, tail = 0.0;
        for (const auto& oj : obs) {
          if (oj.income <= o.income) cdf += oj.weight;
          if (oj.income >= o.income) tail += oj.weight * oj.income;
        }
        u += o.weight * ((cdf - (g + 1.0) / 2.0) * o.income + tail -
                         (mu / 2.0) * (g + 1.0));
      }
      per_draw[st].push_back((2.0 / mu) * u);
    }
  }
  return per_draw;
}

}  // namespace giniseq::testing
