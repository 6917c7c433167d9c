// Python bindings for the main operations: population generation, weighted
// Gini estimation, pilot sizing, the two adaptive procedures and the
// replication harness.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>

#include "giniseq/montecarlo.hpp"
#include "giniseq/survey_io.hpp"

namespace py = pybind11;
using namespace giniseq;

namespace {

PopulationSpec make_spec(const std::string& dist,
                         const std::vector<std::int64_t>& clusters,
                         const std::vector<std::pair<std::int64_t, std::int64_t>>&
                             count_ranges,
                         double affluence_quantile, std::int64_t k) {
  PopulationSpec spec{IncomeDistribution::parse(dist), {},
                      affluence_quantile, k};
  if (clusters.size() != count_ranges.size()) {
    throw std::invalid_argument("clusters and count_ranges must align");
  }
  for (std::size_t s = 0; s < clusters.size(); ++s) {
    spec.strata.push_back(
        {clusters[s], count_ranges[s].first, count_ranges[s].second});
  }
  return spec;
}

StoppingConfig config_from(const PopulationSpec& spec, double alpha,
                           double omega, double delta, std::int64_t m_prime) {
  return make_stopping_config(spec, alpha, omega, delta, m_prime);
}

py::dict outcome_dict(const SequentialOutcome& out) {
  py::dict d;
  d["procedure"] = out.procedure == Procedure::PurelySequential
                       ? "purely-sequential"
                       : "two-stage";
  d["final_n"] = out.final_n;
  d["final_n_s"] = out.final_n_s;
  d["pilot"] = out.pilot.realized();
  d["g_hat"] = out.g_hat;
  d["mu_hat"] = out.mu_hat;
  d["v2"] = out.v2;
  d["ci_low"] = out.ci.low;
  d["ci_high"] = out.ci.high;
  d["width"] = out.ci.width;
  d["hit_cap"] = out.hit_cap;
  return d;
}

}  // namespace

PYBIND11_MODULE(_giniseq, m) {
  m.doc() =
      "Design-based Gini estimation: stratified two-stage cluster sampling, "
      "linearization variance, bounded-width sequential procedures";

  m.def("analytic_gini",
        [](const std::string& dist) {
          return IncomeDistribution::parse(dist).analytic_gini();
        },
        py::arg("dist"),
        "Closed-form population Gini of 'family:p1,p2'");

  m.def("gini",
        [](const std::vector<double>& values) {
          return gini_of_values(values);
        },
        py::arg("values"), "Equal-weight plug-in Gini of a value list");

  m.def("pilot_sizes",
        [](double alpha, double omega, double delta,
           const std::vector<double>& allocations,
           const std::vector<std::int64_t>& stratum_caps) {
          auto p = pilot_sizes(alpha, omega, delta, allocations, stratum_caps);
          py::dict d;
          d["formula_total"] = p.total_formula;
          d["per_stratum"] = p.per_stratum;
          d["realized"] = p.realized();
          return d;
        },
        py::arg("alpha"), py::arg("omega"), py::arg("delta"),
        py::arg("allocations"), py::arg("stratum_caps"),
        "Closed-form pilot sizes per stratum");

  m.def("optimal_c", &optimal_C, py::arg("xi2"), py::arg("alpha"),
        py::arg("omega"), "Optimal total cluster count for a known variance");

  m.def(
      "run_adaptive",
      [](const std::string& procedure, const std::string& dist,
         const std::vector<std::int64_t>& clusters,
         const std::vector<std::pair<std::int64_t, std::int64_t>>& ranges,
         double affluence_quantile, std::int64_t k, double alpha,
         double omega, double delta, std::int64_t m_prime,
         std::uint64_t frame_seed, std::uint64_t seed) {
        auto spec =
            make_spec(dist, clusters, ranges, affluence_quantile, k);
        auto cfg = config_from(spec, alpha, omega, delta, m_prime);
        auto frame = generate_pseudo_population(spec, frame_seed);
        FrameSampler sampler(frame, spec.households_per_substratum, Rng(seed));
        auto out = procedure == "two-stage"
                       ? run_two_stage(sampler, cfg)
                       : run_purely_sequential(sampler, cfg);
        return outcome_dict(out);
      },
      py::arg("procedure"), py::arg("dist"), py::arg("clusters"),
      py::arg("count_ranges"), py::arg("affluence_quantile") = 0.55,
      py::arg("k") = 2, py::arg("alpha") = 0.05, py::arg("omega") = 0.015,
      py::arg("delta") = 2.0, py::arg("m_prime") = 1,
      py::arg("frame_seed") = 1, py::arg("seed") = 1,
      "One bounded-width run ('seq' or 'two-stage') on a synthetic frame");

  m.def(
      "simulate",
      [](const std::string& procedure, const std::string& dist,
         const std::vector<std::int64_t>& clusters,
         const std::vector<std::pair<std::int64_t, std::int64_t>>& ranges,
         double affluence_quantile, std::int64_t k, double alpha,
         double omega, double delta, std::int64_t m_prime, std::int64_t reps,
         std::uint64_t seed, int workers, bool merged,
         std::int64_t oracle_n, std::int64_t oracle_reps) {
        auto spec =
            make_spec(dist, clusters, ranges, affluence_quantile, k);
        auto cfg = config_from(spec, alpha, omega, delta, m_prime);
        auto oracle = estimate_xi2(spec, oracle_n, oracle_reps,
                                   seed ^ 0x9e3779b97f4a7c15ULL, alpha, omega);
        SimulationPlan plan{procedure == "two-stage"
                                ? Procedure::TwoStage
                                : Procedure::PurelySequential,
                            spec, cfg, reps, seed, workers, merged};
        auto rep = run_replications(plan, oracle);
        py::dict d;
        d["reps"] = rep.reps;
        d["mean_final_size"] = rep.mean_final_size;
        d["sd_final_size"] = rep.sd_final_size;
        d["mean_g_hat"] = rep.mean_g_hat;
        d["ratio_size_to_c"] = rep.ratio_size_to_c;
        d["mean_v2_over_xi2"] = rep.mean_v2_over_xi2;
        d["coverage"] = rep.coverage;
        d["coverage_se"] = rep.coverage_se;
        d["mean_width"] = rep.mean_width;
        d["sd_width"] = rep.sd_width;
        d["exceed_rate"] = rep.exceed_rate;
        d["cap_hits"] = rep.cap_hits;
        d["analytic_gini"] = oracle.analytic_gini;
        d["xi2_hat"] = oracle.xi2_hat;
        d["optimal_c"] = oracle.c;
        return d;
      },
      py::arg("procedure"), py::arg("dist"), py::arg("clusters"),
      py::arg("count_ranges"), py::arg("affluence_quantile") = 0.55,
      py::arg("k") = 2, py::arg("alpha") = 0.05, py::arg("omega") = 0.015,
      py::arg("delta") = 2.0, py::arg("m_prime") = 1, py::arg("reps") = 500,
      py::arg("seed") = 1, py::arg("workers") = 1, py::arg("merged") = false,
      py::arg("oracle_n") = 2000, py::arg("oracle_reps") = 16,
      "Seeded replication study; deterministic for any worker count");

  m.def(
      "estimate_survey",
      [](const std::string& frame_path, const std::string& households_path,
         double alpha) {
        auto dataset = load_survey(frame_path, households_path);
        ReplaySource source(dataset, 0);
        std::vector<ClusterDraw> draws;
        for (std::size_t s = 0; s < dataset.frame.stratum_count(); ++s) {
          auto batch = source.draw(s, source.remaining(s));
          draws.insert(draws.end(), std::make_move_iterator(batch.begin()),
                       std::make_move_iterator(batch.end()));
        }
        auto sample = compute_weights(source.totals(), draws);
        auto est = estimate(sample, alpha);
        py::dict d;
        d["n"] = est.n;
        d["g_hat"] = est.g_hat;
        d["mu_hat"] = est.mu_hat;
        d["v2"] = est.v_n2;
        d["ci_low"] = est.ci.low;
        d["ci_high"] = est.ci.high;
        d["width"] = est.ci.width;
        return d;
      },
      py::arg("frame_path"), py::arg("households_path"),
      py::arg("alpha") = 0.05,
      "Weighted Gini with linearization CI from survey CSV files");

  py::register_exception<DataError>(m, "DataError");
  py::register_exception<SourceError>(m, "SourceError");
  py::register_exception<DegenerateSampleError>(m, "DegenerateSampleError");
  py::register_exception<InsufficientReplicatesError>(
      m, "InsufficientReplicatesError");
}
