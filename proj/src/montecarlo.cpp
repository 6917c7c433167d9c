#include "giniseq/montecarlo.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "giniseq/math.hpp"

namespace giniseq {

double analytic_gini(const IncomeDistribution& dist) {
  return dist.analytic_gini();
}

OracleSet estimate_xi2(const PopulationSpec& spec, std::int64_t n_large,
                       std::int64_t reps, std::uint64_t seed, double alpha,
                       double omega) {
  if (n_large < 1000) {
    throw std::invalid_argument("xi2 oracle needs n_large >= 1000");
  }
  if (reps < 2) throw std::invalid_argument("xi2 oracle needs reps >= 2");

  Rng root(seed);
  KahanSum sum, sumsq;
  for (std::int64_t r = 0; r < reps; ++r) {
    Rng stream = root.substream(r + 1);
    auto frame =
        generate_pseudo_population(spec, stream.substream(0, 1).seed());
    FrameSampler sampler(frame, spec.households_per_substratum,
                         stream.substream(0, 2));
    auto n_s = apportion_clusters(n_large, frame.allocations());
    std::vector<ClusterDraw> draws;
    for (std::size_t s = 0; s < n_s.size(); ++s) {
      auto batch = sampler.draw(s, n_s[s]);
      draws.insert(draws.end(), std::make_move_iterator(batch.begin()),
                   std::make_move_iterator(batch.end()));
    }
    auto sample = compute_weights(sampler.totals(), draws);
    double mu = weighted_mean(sample);
    double g = gini_hat(sample);
    auto scores = linearized_scores(sample, g, mu);
    double v2 = variance_hat(scores, sample.n);
    sum.add(v2);
    sumsq.add(v2 * v2);
  }
  double R = static_cast<double>(reps);
  OracleSet oracle;
  oracle.analytic_gini = spec.distribution.analytic_gini();
  oracle.xi2_hat = sum.value() / R;
  double var = sumsq.value() / R - oracle.xi2_hat * oracle.xi2_hat;
  oracle.xi2_se = var > 0.0 ? std::sqrt(var / R) : 0.0;
  oracle.c = optimal_C(oracle.xi2_hat, alpha, omega);
  return oracle;
}

StoppingConfig make_stopping_config(const PopulationSpec& spec, double alpha,
                                    double omega, double delta,
                                    std::int64_t m_prime) {
  StoppingConfig config;
  config.alpha = alpha;
  config.omega = omega;
  config.delta = delta;
  config.m_prime = m_prime;
  config.k = spec.households_per_substratum;
  auto clusters = spec.clusters_per_stratum();
  std::int64_t h = 0;
  for (auto hs : clusters) h += hs;
  for (auto hs : clusters) {
    config.stratum_caps.push_back(hs);
    config.allocations.push_back(static_cast<double>(hs) /
                                 static_cast<double>(h));
  }
  return config;
}

namespace {

ReplicationRecord run_one(const SimulationPlan& plan, const OracleSet& oracle,
                          std::int64_t index) {
  Rng root(plan.seed);
  Rng stream = root.substream(index + 1);
  auto frame = generate_pseudo_population(
      plan.spec, stream.substream(0, 1).seed());
  FrameSampler sampler(frame, plan.config.k, stream.substream(0, 2),
                       plan.merge_substrata);
  SequentialOutcome outcome =
      plan.procedure == Procedure::PurelySequential
          ? run_purely_sequential(sampler, plan.config)
          : run_two_stage(sampler, plan.config);

  ReplicationRecord rec;
  rec.index = index;
  rec.final_n = outcome.final_n;
  rec.pilot = outcome.pilot.realized();
  rec.g_hat = outcome.g_hat;
  rec.v2 = outcome.v2;
  rec.width = outcome.ci.width;
  rec.covered = outcome.ci.low < oracle.analytic_gini &&
                oracle.analytic_gini < outcome.ci.high;
  rec.exceeded = outcome.ci.width > plan.config.omega;
  rec.hit_cap = outcome.hit_cap;
  return rec;
}

}  // namespace

MonteCarloReport aggregate_records(std::vector<ReplicationRecord> records,
                                   const OracleSet& oracle, double omega) {
  (void)omega;  // exceed flags are already per-record
  MonteCarloReport report;
  report.reps = static_cast<std::int64_t>(records.size());
  double R = static_cast<double>(report.reps);
  KahanSum nsum, nsq, gsum, v2sum, wsum, wsq;
  std::int64_t covered = 0;
  std::int64_t exceeded = 0;
  for (const auto& rec : records) {
    double n = static_cast<double>(rec.final_n);
    nsum.add(n);
    nsq.add(n * n);
    gsum.add(rec.g_hat);
    v2sum.add(rec.v2);
    wsum.add(rec.width);
    wsq.add(rec.width * rec.width);
    if (rec.covered) ++covered;
    if (rec.exceeded) ++exceeded;
    if (rec.hit_cap) ++report.cap_hits;
  }
  report.mean_final_size = nsum.value() / R;
  double nvar = nsq.value() / R - report.mean_final_size * report.mean_final_size;
  report.sd_final_size =
      nvar > 0.0 ? std::sqrt(nvar * R / std::max(1.0, R - 1.0)) : 0.0;
  report.mean_g_hat = gsum.value() / R;
  report.ratio_size_to_c =
      report.mean_final_size / static_cast<double>(oracle.c);
  report.mean_v2_over_xi2 = v2sum.value() / R / oracle.xi2_hat;
  report.coverage = static_cast<double>(covered) / R;
  report.coverage_se =
      std::sqrt(report.coverage * (1.0 - report.coverage) / R);
  report.mean_width = wsum.value() / R;
  double wvar = wsq.value() / R - report.mean_width * report.mean_width;
  report.sd_width =
      wvar > 0.0 ? std::sqrt(wvar * R / std::max(1.0, R - 1.0)) : 0.0;
  report.exceed_rate = static_cast<double>(exceeded) / R;
  report.exceed_se =
      std::sqrt(report.exceed_rate * (1.0 - report.exceed_rate) / R);
  report.records = std::move(records);
  return report;
}

MonteCarloReport run_replications(const SimulationPlan& plan,
                                  const OracleSet& oracle) {
  if (plan.reps < 1) throw std::invalid_argument("reps must be >= 1");
  plan.config.validate();

  std::vector<ReplicationRecord> records(plan.reps);
  int workers = std::max(1, plan.workers);
  if (workers == 1) {
    for (std::int64_t r = 0; r < plan.reps; ++r) {
      records[r] = run_one(plan, oracle, r);
    }
  } else {
    std::atomic<std::int64_t> next{0};
    std::mutex err_mutex;
    std::exception_ptr error;
    auto work = [&] {
      while (true) {
        std::int64_t r = next.fetch_add(1);
        if (r >= plan.reps) return;
        try {
          records[r] = run_one(plan, oracle, r);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
  }
  return aggregate_records(std::move(records), oracle, plan.config.omega);
}

namespace {

double mean_final_size(SimulationPlan plan, const OracleSet& oracle,
                       Procedure proc, bool merged) {
  plan.procedure = proc;
  plan.merge_substrata = merged;
  return run_replications(plan, oracle).mean_final_size;
}

}  // namespace

DesignComparison compare_designs(const PopulationSpec& spec,
                                 const StoppingConfig& config,
                                 std::int64_t n_fixed, std::int64_t reps,
                                 std::uint64_t seed, int workers) {
  DesignComparison cmp;
  Rng root(seed);

  // Fixed-n comparison on matched frames/seeds.
  auto frame = generate_pseudo_population(spec, root.substream(1).seed());
  std::vector<double> thresholds = {config.omega};
  cmp.fixed_proposed =
      fixed_n_experiment(frame, n_fixed, config.alpha, config.k, reps,
                         root.substream(2).seed(), thresholds, false);
  cmp.fixed_comparator =
      fixed_n_experiment(frame, n_fixed, config.alpha, config.k, reps,
                         root.substream(2).seed(), thresholds, true);

  SimulationPlan plan{Procedure::PurelySequential, spec,    config,
                      reps,                        root.substream(3).seed(),
                      workers,                     false};

  OracleSet oracle;
  oracle.analytic_gini = spec.distribution.analytic_gini();
  oracle.xi2_hat = 1.0;  // ratio columns unused here
  oracle.c = 1;

  cmp.seq_mean_n_proposed =
      mean_final_size(plan, oracle, Procedure::PurelySequential, false);
  cmp.seq_mean_n_comparator =
      mean_final_size(plan, oracle, Procedure::PurelySequential, true);
  cmp.two_stage_mean_n_proposed =
      mean_final_size(plan, oracle, Procedure::TwoStage, false);
  cmp.two_stage_mean_n_comparator =
      mean_final_size(plan, oracle, Procedure::TwoStage, true);
  return cmp;
}

}  // namespace giniseq
