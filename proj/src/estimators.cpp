#include "giniseq/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "giniseq/math.hpp"

namespace giniseq {

namespace {

void require_nonempty(const WeightedSample& sample) {
  if (sample.observations.empty()) {
    throw DegenerateSampleError("empty sample");
  }
}

// Tie-grouped CDF and upper-tail sums per observation:
//   cdf[i]  = sum_j w_j 1(x_j <= x_i)
//   tail[i] = sum_j w_j x_j 1(x_j >= x_i)
// Equal incomes share one group so the <= / >= conventions hold exactly.
struct CdfTail {
  std::vector<double> cdf;
  std::vector<double> tail;
};

CdfTail cdf_and_tail(const WeightedSample& sample) {
  const auto& obs = sample.observations;
  std::size_t n = obs.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return obs[a].income < obs[b].income;
  });

  CdfTail out;
  out.cdf.resize(n);
  out.tail.resize(n);

  // Ascending pass: cumulative weight through each tie group.
  KahanSum cumw;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && obs[order[j]].income == obs[order[i]].income) {
      cumw.add(obs[order[j]].weight);
      ++j;
    }
    double f = cumw.value();
    for (std::size_t t = i; t < j; ++t) out.cdf[order[t]] = f;
    i = j;
  }

  // Descending pass: cumulative w*x from the top through each tie group.
  KahanSum cumwx;
  for (std::size_t i = n; i > 0;) {
    std::size_t j = i;
    while (j > 0 && obs[order[j - 1]].income == obs[order[i - 1]].income) {
      --j;
      cumwx.add(obs[order[j]].weight * obs[order[j]].income);
    }
    double t = cumwx.value();
    for (std::size_t q = j; q < i; ++q) out.tail[order[q]] = t;
    i = j;
  }
  return out;
}

}  // namespace

double weighted_mean(const WeightedSample& sample) {
  require_nonempty(sample);
  KahanSum acc;
  for (const auto& o : sample.observations) acc.add(o.weight * o.income);
  return acc.value();
}

double empirical_cdf(const WeightedSample& sample, double x) {
  require_nonempty(sample);
  KahanSum acc;
  for (const auto& o : sample.observations) {
    if (o.income <= x) acc.add(o.weight);
  }
  return acc.value();
}

double sample_quantile(const WeightedSample& sample, double p) {
  require_nonempty(sample);
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("quantile level must be in [0,1]");
  }
  const auto& obs = sample.observations;
  std::vector<std::size_t> order(obs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return obs[a].income < obs[b].income;
  });
  if (p == 0.0) return obs[order.front()].income;

  KahanSum cumw;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() &&
           obs[order[j]].income == obs[order[i]].income) {
      cumw.add(obs[order[j]].weight);
      ++j;
    }
    if (cumw.value() >= p) return obs[order[i]].income;
    i = j;
  }
  // Rounding shortfall at the top; the maximum is the infimum for p = 1.
  return obs[order.back()].income;
}

double gini_hat(const WeightedSample& sample) {
  require_nonempty(sample);
  double mu = weighted_mean(sample);
  if (!(mu > 0.0)) {
    throw DegenerateSampleError("weighted mean must be positive");
  }
  auto ct = cdf_and_tail(sample);
  KahanSum acc;
  const auto& obs = sample.observations;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    acc.add(obs[i].weight * obs[i].income * (1.0 - ct.cdf[i]));
  }
  return 1.0 - (2.0 / mu) * acc.value();
}

double gini_pairwise_oracle(const WeightedSample& sample) {
  require_nonempty(sample);
  double mu = weighted_mean(sample);
  if (!(mu > 0.0)) {
    throw DegenerateSampleError("weighted mean must be positive");
  }
  const auto& obs = sample.observations;
  KahanSum d;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    for (std::size_t j = 0; j < obs.size(); ++j) {
      d.add(obs[i].weight * obs[j].weight *
            std::abs(obs[i].income - obs[j].income));
    }
  }
  return d.value() / (2.0 * mu);
}

ScoreTable linearized_scores(const WeightedSample& sample, double g_hat,
                             double mu_hat) {
  require_nonempty(sample);
  auto ct = cdf_and_tail(sample);
  const double half_g1 = (g_hat + 1.0) / 2.0;
  const double mean_term = (mu_hat / 2.0) * (g_hat + 1.0);

  std::size_t strata = sample.n_s.size();
  // Slot draw indices per stratum in first-encounter order.
  std::vector<std::unordered_map<std::int64_t, std::size_t>> slot(strata);
  std::vector<std::vector<KahanSum>> acc(strata);

  const auto& obs = sample.observations;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const auto& o = obs[i];
    auto& m = slot[o.stratum_index];
    auto it = m.find(o.draw_index);
    if (it == m.end()) {
      it = m.emplace(o.draw_index, acc[o.stratum_index].size()).first;
      acc[o.stratum_index].emplace_back();
    }
    double contrib = o.weight * ((ct.cdf[i] - half_g1) * o.income +
                                 ct.tail[i] - mean_term);
    acc[o.stratum_index][it->second].add(contrib);
  }

  ScoreTable table;
  table.scores.resize(strata);
  table.stratum_means.resize(strata, 0.0);
  table.stratum_counts.resize(strata, 0);
  for (std::size_t s = 0; s < strata; ++s) {
    table.scores[s].reserve(acc[s].size());
    KahanSum mean_acc;
    for (const auto& a : acc[s]) {
      double u = (2.0 / mu_hat) * a.value();
      table.scores[s].push_back(u);
      mean_acc.add(u);
    }
    table.stratum_counts[s] = static_cast<std::int64_t>(acc[s].size());
    if (!acc[s].empty()) {
      table.stratum_means[s] =
          mean_acc.value() / static_cast<double>(acc[s].size());
    }
  }
  return table;
}

double variance_hat(const ScoreTable& scores, std::int64_t n) {
  KahanSum total;
  for (std::size_t s = 0; s < scores.scores.size(); ++s) {
    std::int64_t n_s = scores.stratum_counts[s];
    if (n_s == 0) continue;
    if (n_s == 1) {
      throw InsufficientReplicatesError(
          "stratum " + std::to_string(s + 1) +
          " has a single cluster draw; variance estimator undefined");
    }
    KahanSum ss;
    double mean = scores.stratum_means[s];
    for (double u : scores.scores[s]) {
      double d = u - mean;
      ss.add(d * d);
    }
    total.add(static_cast<double>(n_s) / static_cast<double>(n_s - 1) *
              ss.value());
  }
  return static_cast<double>(n) * total.value();
}

std::int64_t optimal_C(double xi2, double alpha, double omega) {
  if (!(xi2 > 0.0)) throw std::invalid_argument("xi2 must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("alpha must be in (0,1)");
  }
  if (!(omega > 0.0)) throw std::invalid_argument("omega must be positive");
  double z = z_half_alpha(alpha);
  return static_cast<std::int64_t>(
      std::ceil(4.0 * z * z * xi2 / (omega * omega)));
}

ConfidenceInterval confidence_interval(double g_hat, double v2,
                                       std::int64_t n, double alpha) {
  if (v2 < 0.0) throw std::invalid_argument("v2 must be nonnegative");
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  double half = z_half_alpha(alpha) * std::sqrt(v2 / static_cast<double>(n));
  return {g_hat - half, g_hat + half, 2.0 * half};
}

GiniEstimate estimate(const WeightedSample& sample, double alpha) {
  GiniEstimate est;
  est.mu_hat = weighted_mean(sample);
  est.g_hat = gini_hat(sample);
  est.n = sample.n;
  auto scores = linearized_scores(sample, est.g_hat, est.mu_hat);
  est.v_n2 = variance_hat(scores, sample.n);
  est.ci = confidence_interval(est.g_hat, est.v_n2, est.n, alpha);
  return est;
}

double gini_of_values(const std::vector<double>& values) {
  WeightedSample sample;
  double w = 1.0 / static_cast<double>(values.size());
  sample.observations.reserve(values.size());
  for (double x : values) {
    sample.observations.push_back({0, 0, 0, x, w, w});
  }
  sample.n = 1;
  sample.n_s = {1};
  sample.raw_weight_total = 1.0;
  return gini_hat(sample);
}

FixedNResult fixed_n_experiment(const PopulationFrame& frame, std::int64_t n,
                                double alpha, std::int64_t k,
                                std::int64_t reps, std::uint64_t seed,
                                const std::vector<double>& thresholds,
                                bool merge_substrata) {
  if (reps < 1) throw std::invalid_argument("reps must be >= 1");
  auto allocations = frame.allocations();
  auto n_s = apportion_clusters(n, allocations);
  for (auto v : n_s) {
    if (v < 2) {
      throw InsufficientReplicatesError(
          "fixed-n allocation gives a stratum fewer than 2 draws");
    }
  }

  FixedNResult res;
  res.n = n;
  res.exceed_rates.assign(thresholds.size(), 0.0);
  KahanSum wsum, wsq, gsum, vsum;
  std::vector<std::int64_t> exceed(thresholds.size(), 0);
  Rng root(seed);
  for (std::int64_t r = 0; r < reps; ++r) {
    FrameSampler sampler(frame, k, root.substream(r + 1), merge_substrata);
    std::vector<ClusterDraw> draws;
    for (std::size_t s = 0; s < n_s.size(); ++s) {
      auto batch = sampler.draw(s, n_s[s]);
      draws.insert(draws.end(), std::make_move_iterator(batch.begin()),
                   std::make_move_iterator(batch.end()));
    }
    auto sample = compute_weights(sampler.totals(), draws);
    auto est = estimate(sample, alpha);
    wsum.add(est.ci.width);
    wsq.add(est.ci.width * est.ci.width);
    gsum.add(est.g_hat);
    vsum.add(est.v_n2);
    for (std::size_t t = 0; t < thresholds.size(); ++t) {
      if (est.ci.width > thresholds[t]) ++exceed[t];
    }
  }
  double R = static_cast<double>(reps);
  res.mean_width = wsum.value() / R;
  double var = wsq.value() / R - res.mean_width * res.mean_width;
  res.sd_width = var > 0.0 ? std::sqrt(var) : 0.0;
  res.mean_g_hat = gsum.value() / R;
  res.mean_v2 = vsum.value() / R;
  for (std::size_t t = 0; t < thresholds.size(); ++t) {
    res.exceed_rates[t] = static_cast<double>(exceed[t]) / R;
  }
  return res;
}

}  // namespace giniseq
