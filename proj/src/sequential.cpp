#include "giniseq/sequential.hpp"

#include <cmath>
#include <numeric>

#include "giniseq/math.hpp"

namespace giniseq {

std::int64_t StoppingConfig::total_cap() const {
  return std::accumulate(stratum_caps.begin(), stratum_caps.end(),
                         std::int64_t{0});
}

void StoppingConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("alpha must be in (0,1)");
  }
  if (!(omega > 0.0)) throw std::invalid_argument("omega must be positive");
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
  if (m_prime < 1) throw std::invalid_argument("m_prime must be >= 1");
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (allocations.empty() || allocations.size() != stratum_caps.size()) {
    throw std::invalid_argument("allocations and caps must align per stratum");
  }
  double asum = 0.0;
  for (double a : allocations) {
    if (!(a > 0.0)) throw std::invalid_argument("allocations must be positive");
    asum += a;
  }
  if (std::abs(asum - 1.0) > 1e-12) {
    throw std::invalid_argument("allocations must sum to 1");
  }
  for (auto h : stratum_caps) {
    if (h < 2) throw std::invalid_argument("each stratum cap must be >= 2");
  }
}

std::int64_t PilotSizes::realized() const {
  return std::accumulate(per_stratum.begin(), per_stratum.end(),
                         std::int64_t{0});
}

PilotSizes pilot_sizes(double alpha, double omega, double delta,
                       const std::vector<double>& allocations,
                       const std::vector<std::int64_t>& stratum_caps) {
  StoppingConfig probe;
  probe.alpha = alpha;
  probe.omega = omega;
  probe.delta = delta;
  probe.allocations = allocations;
  probe.stratum_caps = stratum_caps;
  probe.validate();

  double z = z_half_alpha(alpha);
  double base = std::pow(2.0 * z / omega, 2.0 / (delta + 1.0));
  std::int64_t h = probe.total_cap();

  PilotSizes pilot;
  pilot.total_formula = std::min<std::int64_t>(
      h, std::max<std::int64_t>(2, static_cast<std::int64_t>(std::ceil(base))));
  for (std::size_t s = 0; s < allocations.size(); ++s) {
    auto m_s = std::max<std::int64_t>(
        2, static_cast<std::int64_t>(std::ceil(base * allocations[s])));
    pilot.per_stratum.push_back(std::min(stratum_caps[s], m_s));
  }
  return pilot;
}

StoppingDecision stopping_check(std::int64_t n,
                                const std::vector<std::int64_t>& n_s,
                                double v2, const StoppingConfig& config) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  if (v2 < 0.0) throw std::invalid_argument("v2 must be nonnegative");
  double z = z_half_alpha(config.alpha);
  double penalty = std::pow(static_cast<double>(n), -config.delta);
  StoppingDecision d;
  d.c_hat = 4.0 * z * z / (config.omega * config.omega) * (v2 + penalty);
  bool ok = static_cast<double>(n) >= d.c_hat;
  for (std::size_t s = 0; s < config.allocations.size(); ++s) {
    double target = d.c_hat * config.allocations[s];
    d.c_s.push_back(target);
    // Real-valued comparison, no ceiling.
    if (static_cast<double>(n_s[s]) < target) {
      d.deficient.push_back(s);
      ok = false;
    }
  }
  d.stop = ok;
  return d;
}

namespace {

SequentialOutcome finish(Procedure proc, const DesignTotals& totals,
                         const std::vector<ClusterDraw>& draws,
                         const StoppingConfig& config, PilotSizes pilot,
                         std::vector<TrajectoryPoint> trajectory,
                         bool hit_cap) {
  auto sample = compute_weights(totals, draws);
  auto est = estimate(sample, config.alpha);
  SequentialOutcome out;
  out.procedure = proc;
  out.final_n = sample.n;
  out.final_n_s = sample.n_s;
  out.pilot = std::move(pilot);
  out.g_hat = est.g_hat;
  out.mu_hat = est.mu_hat;
  out.v2 = est.v_n2;
  out.ci = est.ci;
  out.trajectory = std::move(trajectory);
  out.hit_cap = hit_cap;
  return out;
}

}  // namespace

SequentialOutcome run_purely_sequential(ClusterSource& source,
                                        const StoppingConfig& config) {
  config.validate();
  auto pilot = pilot_sizes(config.alpha, config.omega, config.delta,
                           config.allocations, config.stratum_caps);

  std::vector<ClusterDraw> draws;
  for (std::size_t s = 0; s < pilot.per_stratum.size(); ++s) {
    auto batch = source.draw(s, pilot.per_stratum[s]);
    draws.insert(draws.end(), std::make_move_iterator(batch.begin()),
                 std::make_move_iterator(batch.end()));
  }

  std::vector<TrajectoryPoint> trajectory;
  while (true) {
    auto sample = compute_weights(source.totals(), draws);
    double mu = weighted_mean(sample);
    double g = gini_hat(sample);
    auto scores = linearized_scores(sample, g, mu);
    double v2 = variance_hat(scores, sample.n);
    auto decision = stopping_check(sample.n, sample.n_s, v2, config);
    trajectory.push_back({sample.n, v2, decision.c_hat});
    if (decision.stop) {
      return finish(Procedure::PurelySequential, source.totals(), draws,
                    config, pilot, std::move(trajectory), false);
    }
    bool grew = false;
    for (std::size_t s : decision.deficient) {
      std::int64_t room = config.stratum_caps[s] - sample.n_s[s];
      if (room <= 0) continue;
      auto batch = source.draw(s, std::min(config.m_prime, room));
      draws.insert(draws.end(), std::make_move_iterator(batch.begin()),
                   std::make_move_iterator(batch.end()));
      grew = true;
    }
    if (!grew) {
      // Every deficient stratum is at its cap; stop with what we have.
      return finish(Procedure::PurelySequential, source.totals(), draws,
                    config, pilot, std::move(trajectory), true);
    }
  }
}

TwoStageSize two_stage_final_size(std::int64_t t, double v2_t,
                                  const StoppingConfig& config) {
  if (t < 2) throw std::invalid_argument("pilot t must be >= 2");
  if (v2_t < 0.0) throw std::invalid_argument("v2 must be nonnegative");
  double z = z_half_alpha(config.alpha);
  double q_raw = 4.0 * z * z * v2_t / (config.omega * config.omega);
  std::int64_t q_star =
      std::max(t, static_cast<std::int64_t>(std::ceil(q_raw)));
  std::int64_t h = config.total_cap();

  TwoStageSize out;
  out.q = std::min(h, q_star);
  out.capped = q_star > h;
  for (std::size_t s = 0; s < config.allocations.size(); ++s) {
    auto share = static_cast<std::int64_t>(
        std::ceil(static_cast<double>(out.q) * config.allocations[s]));
    out.q_s.push_back(std::min(config.stratum_caps[s], share));
  }
  return out;
}

SequentialOutcome run_two_stage(ClusterSource& source,
                                const StoppingConfig& config) {
  config.validate();
  auto pilot = pilot_sizes(config.alpha, config.omega, config.delta,
                           config.allocations, config.stratum_caps);

  std::vector<ClusterDraw> draws;
  for (std::size_t s = 0; s < pilot.per_stratum.size(); ++s) {
    auto batch = source.draw(s, pilot.per_stratum[s]);
    draws.insert(draws.end(), std::make_move_iterator(batch.begin()),
                 std::make_move_iterator(batch.end()));
  }

  auto pilot_sample = compute_weights(source.totals(), draws);
  double mu_t = weighted_mean(pilot_sample);
  double g_t = gini_hat(pilot_sample);
  auto scores_t = linearized_scores(pilot_sample, g_t, mu_t);
  double v2_t = variance_hat(scores_t, pilot_sample.n);

  auto size = two_stage_final_size(pilot_sample.n, v2_t, config);
  std::vector<TrajectoryPoint> trajectory;
  trajectory.push_back({pilot_sample.n, v2_t,
                        static_cast<double>(size.q)});

  for (std::size_t s = 0; s < size.q_s.size(); ++s) {
    std::int64_t extra = size.q_s[s] - pilot_sample.n_s[s];
    if (extra > 0) {
      auto batch = source.draw(s, extra);
      draws.insert(draws.end(), std::make_move_iterator(batch.begin()),
                   std::make_move_iterator(batch.end()));
    }
  }
  return finish(Procedure::TwoStage, source.totals(), draws, config, pilot,
                std::move(trajectory), size.capped);
}

}  // namespace giniseq
