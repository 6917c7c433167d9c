// Command-line front end: pilot sizing, adaptive estimation runs, fixed-size
// baselines, replication studies, survey-file estimation and the
// sub-stratification design comparison.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "giniseq/montecarlo.hpp"
#include "giniseq/report.hpp"
#include "giniseq/survey_io.hpp"

using namespace giniseq;

namespace {

// Exit codes: 0 success, 1 data/runtime failure, 2 usage error.
constexpr int kExitData = 1;

std::vector<std::int64_t> parse_int_list(const std::string& text) {
  std::vector<std::int64_t> out;
  std::stringstream ss(text);
  std::string field;
  while (std::getline(ss, field, ',')) {
    out.push_back(std::stoll(field));
  }
  if (out.empty()) throw CLI::ValidationError("empty integer list");
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(std::stod(field));
  return out;
}

struct PopulationFlags {
  std::string dist = "gamma:2.649,0.84";
  std::string strata = "600,600";
  std::string counts = "50:150,125:375";
  double affluence_quantile = 0.55;
  std::int64_t k = 2;
  std::uint64_t frame_seed = 1;
};

void add_population_flags(CLI::App* cmd, PopulationFlags& f) {
  cmd->add_option("--dist", f.dist,
                  "income law, family:p1,p2 (gamma, pareto, lognormal)");
  cmd->add_option("--strata", f.strata,
                  "clusters per stratum, e.g. 600,600");
  cmd->add_option("--counts", f.counts,
                  "household-count range per stratum, e.g. 50:150,125:375");
  cmd->add_option("--q-aff", f.affluence_quantile,
                  "affluence split quantile in (0,1)");
  cmd->add_option("--k", f.k, "households sampled per sub-stratum");
  cmd->add_option("--frame-seed", f.frame_seed,
                  "seed for the synthetic population frame");
}

PopulationSpec build_spec(const PopulationFlags& f) {
  PopulationSpec spec{IncomeDistribution::parse(f.dist), {},
                      f.affluence_quantile, f.k};
  auto clusters = parse_int_list(f.strata);
  std::vector<std::pair<std::int64_t, std::int64_t>> ranges;
  {
    std::stringstream ss(f.counts);
    std::string field;
    while (std::getline(ss, field, ',')) {
      auto colon = field.find(':');
      if (colon == std::string::npos) {
        throw CLI::ValidationError("--counts wants min:max pairs");
      }
      ranges.emplace_back(std::stoll(field.substr(0, colon)),
                          std::stoll(field.substr(colon + 1)));
    }
  }
  if (ranges.size() != clusters.size()) {
    throw CLI::ValidationError("--strata and --counts must align");
  }
  for (std::size_t s = 0; s < clusters.size(); ++s) {
    spec.strata.push_back({clusters[s], ranges[s].first, ranges[s].second});
  }
  return spec;
}

struct StoppingFlags {
  double alpha = 0.05;
  double omega = 0.015;
  double delta = 2.0;
  std::int64_t m_prime = 1;
};

void add_stopping_flags(CLI::App* cmd, StoppingFlags& f) {
  cmd->add_option("--alpha", f.alpha, "two-sided error rate in (0,1)");
  cmd->add_option("--omega", f.omega, "target CI width")->check(CLI::PositiveNumber);
  cmd->add_option("--delta", f.delta, "stopping-rule penalty exponent")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--m-prime", f.m_prime,
                  "clusters added per deficient stratum per step");
}

StoppingConfig config_for_frame(const PopulationFrame& frame,
                                const StoppingFlags& f, std::int64_t k) {
  StoppingConfig cfg;
  cfg.alpha = f.alpha;
  cfg.omega = f.omega;
  cfg.delta = f.delta;
  cfg.m_prime = f.m_prime;
  cfg.k = k;
  for (std::size_t s = 0; s < frame.stratum_count(); ++s) {
    cfg.stratum_caps.push_back(frame.cluster_count(s));
    cfg.allocations.push_back(frame.allocation(s));
  }
  return cfg;
}

struct OutputFlags {
  std::string out;
  std::string format = "table";
};

void add_output_flags(CLI::App* cmd, OutputFlags& f) {
  cmd->add_option("--out", f.out, "write the report here instead of stdout");
  cmd->add_option("--format", f.format, "table or delimited");
}

template <typename Fn>
void with_output(const OutputFlags& f, Fn&& fn) {
  ReportFormat format = parse_report_format(f.format);
  if (f.out.empty()) {
    fn(std::cout, format);
    return;
  }
  std::ofstream file(f.out);
  if (!file) throw DataError("cannot write " + f.out);
  fn(file, format);
}

struct SurveyFlags {
  std::string frame_file;
  std::string households_file;
};

void add_survey_flags(CLI::App* cmd, SurveyFlags& f, bool required = false) {
  auto* a = cmd->add_option("--frame", f.frame_file,
                            "survey frame CSV (stratum, cluster, counts)");
  auto* b = cmd->add_option("--households", f.households_file,
                            "surveyed household CSV");
  b->needs(a);
  a->needs(b);
  if (required) {
    a->required();
    b->required();
  }
}

int default_workers() {
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void run_adaptive(Procedure proc, const PopulationFlags& pop,
                  const StoppingFlags& stop, const SurveyFlags& survey,
                  const OutputFlags& out, std::uint64_t seed) {
  std::optional<SurveyDataset> dataset;
  std::optional<PopulationFrame> frame;
  std::unique_ptr<ClusterSource> source;
  std::int64_t total_clusters = 0;
  StoppingConfig cfg;

  if (!survey.frame_file.empty()) {
    dataset = load_survey(survey.frame_file, survey.households_file);
    cfg = config_for_frame(dataset->frame, stop, pop.k);
    total_clusters = dataset->frame.cluster_count();
    source = std::make_unique<ReplaySource>(*dataset, seed);
  } else {
    auto spec = build_spec(pop);
    frame = generate_pseudo_population(spec, pop.frame_seed);
    cfg = config_for_frame(*frame, stop, spec.households_per_substratum);
    total_clusters = frame->cluster_count();
    source = std::make_unique<FrameSampler>(
        *frame, spec.households_per_substratum, Rng(seed));
  }

  auto outcome = proc == Procedure::PurelySequential
                     ? run_purely_sequential(*source, cfg)
                     : run_two_stage(*source, cfg);
  const char* label =
      proc == Procedure::PurelySequential ? "purely-sequential" : "two-stage";
  with_output(out, [&](std::ostream& os, ReportFormat fmt) {
    write_outcome(os, label, total_clusters, outcome, fmt);
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Design-based Gini estimation over stratified two-stage cluster "
      "samples: pilot sizing, bounded-width sequential procedures, "
      "replication studies and survey-file estimation"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read defaults from an INI-style file");
  app.allow_config_extras(CLI::config_extras_mode::error);

  // ---- pilot-size ------------------------------------------------------
  auto* pilot = app.add_subcommand(
      "pilot-size", "closed-form pilot sizes per stratum");
  StoppingFlags pilot_stop;
  add_stopping_flags(pilot, pilot_stop);
  std::string pilot_strata = "600,600";
  pilot->add_option("--strata", pilot_strata, "clusters per stratum");
  OutputFlags pilot_out;
  add_output_flags(pilot, pilot_out);
  pilot->callback([&] {
    auto caps = parse_int_list(pilot_strata);
    std::int64_t total = 0;
    for (auto h : caps) total += h;
    std::vector<double> alloc;
    for (auto h : caps) {
      alloc.push_back(static_cast<double>(h) / static_cast<double>(total));
    }
    auto sizes = pilot_sizes(pilot_stop.alpha, pilot_stop.omega,
                             pilot_stop.delta, alloc, caps);
    with_output(pilot_out, [&](std::ostream& os, ReportFormat fmt) {
      std::vector<std::string> header{"formula_total", "realized"};
      std::vector<std::string> row{std::to_string(sizes.total_formula),
                                   std::to_string(sizes.realized())};
      for (std::size_t s = 0; s < sizes.per_stratum.size(); ++s) {
        header.push_back("m_" + std::to_string(s + 1));
        row.push_back(std::to_string(sizes.per_stratum[s]));
      }
      if (fmt == ReportFormat::Delimited) {
        for (std::size_t i = 0; i < header.size(); ++i) {
          os << (i ? "," : "") << header[i];
        }
        os << '\n';
        for (std::size_t i = 0; i < row.size(); ++i) {
          os << (i ? "," : "") << row[i];
        }
        os << '\n';
      } else {
        for (std::size_t i = 0; i < header.size(); ++i) {
          os << header[i] << " = " << row[i] << '\n';
        }
      }
    });
  });

  // ---- run-seq / run-two-stage ----------------------------------------
  PopulationFlags seq_pop;
  StoppingFlags seq_stop;
  SurveyFlags seq_survey;
  OutputFlags seq_out;
  std::uint64_t seq_seed = 1;
  auto* seq = app.add_subcommand(
      "run-seq", "one purely sequential bounded-width run");
  add_population_flags(seq, seq_pop);
  add_stopping_flags(seq, seq_stop);
  add_survey_flags(seq, seq_survey);
  add_output_flags(seq, seq_out);
  seq->add_option("--seed", seq_seed, "sampling seed");
  seq->callback([&] {
    run_adaptive(Procedure::PurelySequential, seq_pop, seq_stop, seq_survey,
                 seq_out, seq_seed);
  });

  PopulationFlags two_pop;
  StoppingFlags two_stop;
  SurveyFlags two_survey;
  OutputFlags two_out;
  std::uint64_t two_seed = 1;
  auto* two = app.add_subcommand(
      "run-two-stage", "one two-stage bounded-width run");
  add_population_flags(two, two_pop);
  add_stopping_flags(two, two_stop);
  add_survey_flags(two, two_survey);
  add_output_flags(two, two_out);
  two->add_option("--seed", two_seed, "sampling seed");
  two->callback([&] {
    run_adaptive(Procedure::TwoStage, two_pop, two_stop, two_survey, two_out,
                 two_seed);
  });

  // ---- fixed-n ---------------------------------------------------------
  PopulationFlags fix_pop;
  OutputFlags fix_out;
  std::int64_t fix_n = 750;
  std::int64_t fix_reps = 500;
  std::uint64_t fix_seed = 1;
  double fix_alpha = 0.05;
  std::string fix_thresholds = "0.015";
  bool fix_merged = false;
  auto* fixed = app.add_subcommand(
      "fixed-n", "repeated fixed-cluster-count baseline draws");
  add_population_flags(fixed, fix_pop);
  add_output_flags(fixed, fix_out);
  fixed->add_option("--n", fix_n, "total cluster draws")->check(CLI::PositiveNumber);
  fixed->add_option("--reps", fix_reps, "replications");
  fixed->add_option("--seed", fix_seed, "sampling seed");
  fixed->add_option("--alpha", fix_alpha, "two-sided error rate");
  fixed->add_option("--thresholds", fix_thresholds,
                    "width exceedance thresholds, comma separated");
  fixed->add_flag("--merged", fix_merged,
                  "pool sub-strata (comparator design)");
  fixed->callback([&] {
    auto spec = build_spec(fix_pop);
    auto frame = generate_pseudo_population(spec, fix_pop.frame_seed);
    auto thresholds = parse_double_list(fix_thresholds);
    auto res = fixed_n_experiment(frame, fix_n, fix_alpha,
                                  spec.households_per_substratum, fix_reps,
                                  fix_seed, thresholds, fix_merged);
    with_output(fix_out, [&](std::ostream& os, ReportFormat fmt) {
      write_fixed_n(os, fix_merged ? "fixed-n-merged" : "fixed-n", res,
                    thresholds, fmt);
    });
  });

  // ---- simulate --------------------------------------------------------
  PopulationFlags sim_pop;
  StoppingFlags sim_stop;
  OutputFlags sim_out;
  std::string sim_proc = "seq";
  std::int64_t sim_reps = 500;
  std::uint64_t sim_seed = 1;
  int sim_workers = default_workers();
  std::int64_t sim_oracle_n = 2000;
  std::int64_t sim_oracle_reps = 16;
  bool sim_merged = false;
  auto* sim = app.add_subcommand(
      "simulate", "seeded replication study of an adaptive procedure");
  add_population_flags(sim, sim_pop);
  add_stopping_flags(sim, sim_stop);
  add_output_flags(sim, sim_out);
  sim->add_option("--procedure", sim_proc, "seq or two-stage")
      ->check(CLI::IsMember({"seq", "two-stage"}));
  sim->add_option("--reps", sim_reps, "replications");
  sim->add_option("--seed", sim_seed, "root seed");
  sim->add_option("--workers", sim_workers, "worker threads")
      ->envname("GINISEQ_WORKERS");
  sim->add_option("--oracle-n", sim_oracle_n,
                  "cluster draws per reference-variance replication");
  sim->add_option("--oracle-reps", sim_oracle_reps,
                  "replications for the reference variance");
  sim->add_flag("--merged", sim_merged,
                "pool sub-strata (comparator design)");
  sim->callback([&] {
    auto spec = build_spec(sim_pop);
    auto config = make_stopping_config(spec, sim_stop.alpha, sim_stop.omega,
                                       sim_stop.delta, sim_stop.m_prime);
    auto oracle = estimate_xi2(spec, sim_oracle_n, sim_oracle_reps,
                               sim_seed ^ 0x9e3779b97f4a7c15ULL,
                               sim_stop.alpha, sim_stop.omega);
    SimulationPlan plan{sim_proc == "seq" ? Procedure::PurelySequential
                                          : Procedure::TwoStage,
                        spec,     config,      sim_reps,
                        sim_seed, sim_workers, sim_merged};
    auto report = run_replications(plan, oracle);
    with_output(sim_out, [&](std::ostream& os, ReportFormat fmt) {
      write_report(os, sim_proc, report, fmt);
    });
  });

  // ---- estimate --------------------------------------------------------
  SurveyFlags est_survey;
  OutputFlags est_out;
  double est_alpha = 0.05;
  auto* est = app.add_subcommand(
      "estimate", "one-shot estimate from ingested survey files");
  add_survey_flags(est, est_survey, true);
  add_output_flags(est, est_out);
  est->add_option("--alpha", est_alpha, "two-sided error rate");
  est->callback([&] {
    auto dataset = load_survey(est_survey.frame_file,
                               est_survey.households_file);
    // Use every surveyed cluster, in frame order.
    ReplaySource source(dataset, 0);
    std::vector<ClusterDraw> draws;
    for (std::size_t s = 0; s < dataset.frame.stratum_count(); ++s) {
      auto batch = source.draw(s, source.remaining(s));
      draws.insert(draws.end(), std::make_move_iterator(batch.begin()),
                   std::make_move_iterator(batch.end()));
    }
    auto sample = compute_weights(source.totals(), draws);
    auto result = estimate(sample, est_alpha);
    with_output(est_out, [&](std::ostream& os, ReportFormat fmt) {
      SequentialOutcome view;
      view.final_n = result.n;
      view.g_hat = result.g_hat;
      view.mu_hat = result.mu_hat;
      view.v2 = result.v_n2;
      view.ci = result.ci;
      write_outcome(os, "survey-estimate", dataset.frame.cluster_count(),
                    view, fmt);
    });
  });

  // ---- compare-designs -------------------------------------------------
  PopulationFlags cmp_pop;
  StoppingFlags cmp_stop;
  OutputFlags cmp_out;
  std::int64_t cmp_n = 1200;
  std::int64_t cmp_reps = 500;
  std::uint64_t cmp_seed = 1;
  int cmp_workers = default_workers();
  auto* cmp = app.add_subcommand(
      "compare-designs",
      "sub-stratified design vs pooled comparator on matched seeds");
  add_population_flags(cmp, cmp_pop);
  add_stopping_flags(cmp, cmp_stop);
  add_output_flags(cmp, cmp_out);
  cmp->add_option("--n-fixed", cmp_n, "fixed cluster draws for the variance arm");
  cmp->add_option("--reps", cmp_reps, "replications per arm");
  cmp->add_option("--seed", cmp_seed, "root seed");
  cmp->add_option("--workers", cmp_workers, "worker threads")
      ->envname("GINISEQ_WORKERS");
  cmp->callback([&] {
    auto spec = build_spec(cmp_pop);
    auto config = make_stopping_config(spec, cmp_stop.alpha, cmp_stop.omega,
                                       cmp_stop.delta, cmp_stop.m_prime);
    auto res = compare_designs(spec, config, cmp_n, cmp_reps, cmp_seed,
                               cmp_workers);
    with_output(cmp_out, [&](std::ostream& os, ReportFormat fmt) {
      std::vector<std::string> header{
          "fixed_n",      "v2_proposed",  "v2_comparator",
          "width_proposed", "width_comparator", "seq_n_proposed",
          "seq_n_comparator", "two_stage_n_proposed",
          "two_stage_n_comparator"};
      std::vector<std::string> row{
          std::to_string(res.fixed_proposed.n),
          format_number(res.fixed_proposed.mean_v2),
          format_number(res.fixed_comparator.mean_v2),
          format_number(res.fixed_proposed.mean_width),
          format_number(res.fixed_comparator.mean_width),
          format_number(res.seq_mean_n_proposed),
          format_number(res.seq_mean_n_comparator),
          format_number(res.two_stage_mean_n_proposed),
          format_number(res.two_stage_mean_n_comparator)};
      if (fmt == ReportFormat::Delimited) {
        for (std::size_t i = 0; i < header.size(); ++i) {
          os << (i ? "," : "") << header[i];
        }
        os << '\n';
        for (std::size_t i = 0; i < row.size(); ++i) {
          os << (i ? "," : "") << row[i];
        }
        os << '\n';
      } else {
        for (std::size_t i = 0; i < header.size(); ++i) {
          os << header[i] << " = " << row[i] << '\n';
        }
      }
    });
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // CLI11 prints its own message; help exits cleanly, usage errors as 2.
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return 0;
}
