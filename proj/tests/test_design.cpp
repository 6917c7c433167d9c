#include <algorithm>
#include <set>

#include "doctest.h"
#include "giniseq/design.hpp"
#include "test_support.hpp"

using namespace giniseq;

namespace {

PopulationSpec small_spec(const char* dist = "gamma:2.649,0.84") {
  PopulationSpec spec = PopulationSpec::defaults(IncomeDistribution::parse(dist));
  spec.strata = {{20, 10, 20}, {20, 25, 50}};
  return spec;
}

// Manual two-cluster frame used by the sampling unit tests. Clusters carry
// 10/20/70 households so PPS frequencies are easy to check.
PopulationFrame manual_frame() {
  PopulationFrame frame;
  StratumFrame st;
  st.stratum_id = 1;
  std::int64_t counts[3] = {10, 20, 70};
  for (int c = 0; c < 3; ++c) {
    ClusterFrame cl;
    cl.cluster_id = c + 1;
    cl.substrata[0].household_count = counts[c] / 2;
    cl.substrata[1].household_count = counts[c] - counts[c] / 2;
    st.clusters.push_back(cl);
  }
  frame.strata.push_back(st);
  return frame;
}

}  // namespace

TEST_CASE("generated pseudo-population satisfies its frame invariants") {
  auto spec = small_spec();
  auto frame = generate_pseudo_population(spec, 2024);
  frame.validate();
  REQUIRE(frame.stratum_count() == 2);
  CHECK(frame.cluster_count(0) == 20);
  CHECK(frame.cluster_count(1) == 20);
  CHECK(frame.cluster_count() == 40);
  CHECK(frame.allocation(0) == doctest::Approx(0.5));

  double threshold =
      spec.distribution.quantile(spec.affluence_quantile);
  for (std::size_t s = 0; s < frame.strata.size(); ++s) {
    for (const auto& cl : frame.strata[s].clusters) {
      // Each sub-stratum holds at least k households and matches its list.
      for (const auto& sub : cl.substrata) {
        CHECK(sub.household_count >= spec.households_per_substratum);
        CHECK(static_cast<std::int64_t>(sub.incomes.size()) ==
              sub.household_count);
      }
      // Affluent incomes sit at or above the split point, the rest below.
      for (double x : cl.substrata[0].incomes) CHECK(x >= threshold);
      for (double x : cl.substrata[1].incomes) CHECK(x < threshold);
      // Total size stays near the nominal range (padding can only add).
      auto range = spec.strata[s];
      CHECK(cl.total_households() >= 2 * range.min_households);
    }
  }
}

TEST_CASE("population generation is seed-deterministic") {
  auto spec = small_spec("lognormal:2.185,0.562");
  auto a = generate_pseudo_population(spec, 7);
  auto b = generate_pseudo_population(spec, 7);
  auto c = generate_pseudo_population(spec, 8);
  REQUIRE(a.strata.size() == b.strata.size());
  bool identical = true;
  bool differs_from_c = false;
  for (std::size_t s = 0; s < a.strata.size(); ++s) {
    for (std::size_t i = 0; i < a.strata[s].clusters.size(); ++i) {
      for (int sub = 0; sub < 2; ++sub) {
        const auto& xa = a.strata[s].clusters[i].substrata[sub].incomes;
        const auto& xb = b.strata[s].clusters[i].substrata[sub].incomes;
        const auto& xc = c.strata[s].clusters[i].substrata[sub].incomes;
        identical = identical && xa == xb;
        differs_from_c = differs_from_c || xa != xc;
      }
    }
  }
  CHECK(identical);
  CHECK(differs_from_c);
}

TEST_CASE("generation rejects bad specs") {
  auto spec = small_spec();
  spec.affluence_quantile = 1.0;
  CHECK_THROWS_AS(generate_pseudo_population(spec, 1), std::invalid_argument);
  spec = small_spec();
  spec.households_per_substratum = 0;
  CHECK_THROWS_AS(generate_pseudo_population(spec, 1), std::invalid_argument);
  spec = small_spec();
  spec.strata[0].min_households = 30;
  spec.strata[0].max_households = 10;
  CHECK_THROWS_AS(generate_pseudo_population(spec, 1), std::invalid_argument);
  spec = small_spec();
  spec.strata.clear();
  CHECK_THROWS_AS(generate_pseudo_population(spec, 1), FrameError);
}

TEST_CASE("PPS cluster draws are proportional to household counts") {
  auto frame = manual_frame();
  Rng rng(31);
  const std::int64_t reps = 20000;
  std::vector<std::int64_t> hits(3, 0);
  auto draws = pps_sample_clusters(frame, 0, reps, rng);
  REQUIRE(draws.size() == static_cast<std::size_t>(reps));
  for (const auto& d : draws) {
    REQUIRE(d.cluster_index < 3);
    ++hits[d.cluster_index];
  }
  // Counts 10/20/70 out of 100; binomial three-sigma bands.
  CHECK(hits[0] / static_cast<double>(reps) == doctest::Approx(0.10).epsilon(0.07));
  CHECK(hits[1] / static_cast<double>(reps) == doctest::Approx(0.20).epsilon(0.05));
  CHECK(hits[2] / static_cast<double>(reps) == doctest::Approx(0.70).epsilon(0.02));
  // Reported inclusion expectation n_s * M_sc / total.
  for (const auto& d : draws) {
    double m = static_cast<double>(
        frame.strata[0].clusters[d.cluster_index].total_households());
    CHECK(d.pps_probability ==
          doctest::Approx(static_cast<double>(reps) * m / 100.0));
  }
  CHECK_THROWS_AS(pps_sample_clusters(frame, 5, 1, rng), FrameError);
  CHECK_THROWS_AS(pps_sample_clusters(frame, 0, 0, rng), std::invalid_argument);
}

TEST_CASE("household SRS returns distinct in-range indices") {
  auto frame = manual_frame();
  Rng rng(5);
  for (int rep = 0; rep < 50; ++rep) {
    auto res = srs_households(frame, 0, 2, 1, 4, rng);
    CHECK_FALSE(res.take_all);
    REQUIRE(res.indices.size() == 4);
    std::set<std::size_t> unique(res.indices.begin(), res.indices.end());
    CHECK(unique.size() == 4);
    for (auto i : res.indices) CHECK(i < 35);
  }
  // Fewer households than requested: take-all.
  auto all = srs_households(frame, 0, 0, 0, 10, rng);
  CHECK(all.take_all);
  CHECK(all.indices.size() == 5);
}

TEST_CASE("cluster apportionment sums exactly and tracks proportions") {
  CHECK(apportion_clusters(1200, {0.5, 0.5}) ==
        std::vector<std::int64_t>{600, 600});
  auto odd = apportion_clusters(7, {0.5, 0.5});
  CHECK(odd[0] + odd[1] == 7);
  CHECK(std::abs(odd[0] - odd[1]) == 1);
  auto skew = apportion_clusters(100, {0.701, 0.299});
  CHECK(skew[0] + skew[1] == 100);
  CHECK(skew[0] == 70);
  auto three = apportion_clusters(10, {1.0 / 3, 1.0 / 3, 1.0 / 3});
  CHECK(three[0] + three[1] + three[2] == 10);
}

TEST_CASE("weight computation reproduces a hand-worked fixture") {
  DesignTotals totals;
  totals.stratum_households = {100};
  totals.stratum_clusters = {5};
  totals.allocations = {1.0};

  ClusterDraw a;
  a.stratum_index = 0;
  a.cluster_id = 1;
  a.draw_index = 0;
  a.cluster_households = 40;
  a.substrata.push_back({1, 30, 2, false, {10.0, 20.0}});
  a.substrata.push_back({2, 10, 2, false, {5.0, 15.0}});
  ClusterDraw b;
  b.stratum_index = 0;
  b.cluster_id = 3;
  b.draw_index = 1;
  b.cluster_households = 60;
  b.substrata.push_back({1, 35, 2, false, {8.0, 12.0}});
  b.substrata.push_back({2, 25, 2, false, {30.0, 7.0}});

  auto sample = compute_weights(totals, {a, b});
  REQUIRE(sample.n == 2);
  REQUIRE(sample.n_s == std::vector<std::int64_t>{2});
  REQUIRE(sample.observations.size() == 8);

  // W = (sum_c M_sc) * M_scb / (n_s * M_sc * selected):
  //   cluster a: 100*30/(2*40*2) = 18.75 and 100*10/(2*40*2) = 6.25
  //   cluster b: 100*35/(2*60*2) = 14.58333... and 100*25/(2*60*2) = 10.41666...
  // Total raw weight = 2*(18.75 + 6.25) + 2*(14.583333 + 10.416667) = 100.
  CHECK(sample.raw_weight_total == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(sample.observations[0].raw_weight == doctest::Approx(18.75));
  CHECK(sample.observations[2].raw_weight == doctest::Approx(6.25));
  CHECK(sample.observations[4].raw_weight == doctest::Approx(35.0 / 2.4));
  CHECK(sample.observations[6].raw_weight == doctest::Approx(25.0 / 2.4));
  KahanSum wsum;
  for (const auto& o : sample.observations) wsum.add(o.weight);
  CHECK(std::abs(wsum.value() - 1.0) <= 1e-12);

  // Draws without surveyed households are rejected.
  b.substrata[0].incomes.clear();
  CHECK_THROWS_AS(compute_weights(totals, {a, b}), FrameError);
}

TEST_CASE("frame sampler draws k households per sub-stratum") {
  auto spec = small_spec();
  auto frame = generate_pseudo_population(spec, 11);
  FrameSampler sampler(frame, spec.households_per_substratum, Rng(77));
  auto draws = sampler.draw(0, 5);
  REQUIRE(draws.size() == 5);
  std::int64_t expect_index = 0;
  for (const auto& d : draws) {
    CHECK(d.stratum_index == 0);
    CHECK(d.draw_index == expect_index++);
    REQUIRE(d.substrata.size() == 2);
    CHECK(d.substrata[0].substratum_id == 1);
    CHECK(d.substrata[1].substratum_id == 2);
    for (const auto& sub : d.substrata) {
      if (!sub.take_all) {
        CHECK(static_cast<std::int64_t>(sub.incomes.size()) ==
              spec.households_per_substratum);
      }
      CHECK(sub.selected_count ==
            static_cast<std::int64_t>(sub.incomes.size()));
    }
  }
  // Draw indices keep counting across calls.
  auto more = sampler.draw(0, 2);
  CHECK(more[0].draw_index == 5);
  CHECK_THROWS_AS(sampler.draw(9, 1), SourceError);
}

TEST_CASE("merged sampler pools both sub-strata") {
  auto spec = small_spec();
  auto frame = generate_pseudo_population(spec, 11);
  FrameSampler sampler(frame, spec.households_per_substratum, Rng(77), true);
  auto draws = sampler.draw(1, 4);
  for (const auto& d : draws) {
    REQUIRE(d.substrata.size() == 1);
    CHECK(d.substrata[0].substratum_id == 0);
    CHECK(d.substrata[0].frame_count == d.cluster_households);
    if (!d.substrata[0].take_all) {
      CHECK(static_cast<std::int64_t>(d.substrata[0].incomes.size()) ==
            2 * spec.households_per_substratum);
    }
  }
}

TEST_CASE("frame sampler is deterministic in its seed") {
  auto spec = small_spec();
  auto frame = generate_pseudo_population(spec, 3);
  FrameSampler s1(frame, 2, Rng(42));
  FrameSampler s2(frame, 2, Rng(42));
  auto d1 = s1.draw(0, 6);
  auto d2 = s2.draw(0, 6);
  REQUIRE(d1.size() == d2.size());
  for (std::size_t i = 0; i < d1.size(); ++i) {
    CHECK(d1[i].cluster_id == d2[i].cluster_id);
    for (int b = 0; b < 2; ++b) {
      CHECK(d1[i].substrata[b].incomes == d2[i].substrata[b].incomes);
    }
  }
}

TEST_CASE("design totals mirror the frame") {
  auto frame = manual_frame();
  auto totals = DesignTotals::from_frame(frame);
  REQUIRE(totals.stratum_households.size() == 1);
  CHECK(totals.stratum_households[0] == 100);
  CHECK(totals.stratum_clusters[0] == 3);
  CHECK(totals.allocations[0] == doctest::Approx(1.0));
}
