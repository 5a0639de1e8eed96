#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "lcoal/chain.hpp"
#include "lcoal/stats.hpp"

using namespace lcoal;

TEST_CASE("merger rate table matches closed forms") {
  // Lebesgue: lambda_{i,k} = B(k-1, i-k+1), so C(i,k) lambda_{i,k} is
  // i! (k-2)! / ((k)!... ) -- spot values suffice.
  MergerRateTable u(MeasureSpec::uniform(), 12);
  CHECK(u.total_rate(2) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(u.total_rate(3) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(u.k_probability(3, 2) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(u.k_probability(3, 3) == doctest::Approx(0.25).epsilon(1e-12));

  MergerRateTable k(MeasureSpec::kingman(), 12);
  for (int i = 2; i <= 12; ++i) {
    CHECK(k.total_rate(i) == doctest::Approx(i * (i - 1) / 2.0).epsilon(1e-12));
    CHECK(k.k_probability(i, 2) == doctest::Approx(1.0).epsilon(1e-12));
  }

  // probabilities sum to 1 row by row
  MergerRateTable b(MeasureSpec::beta_family(0.5), 15);
  for (int i = 2; i <= 15; ++i) {
    double s = 0.0;
    for (int kk = 2; kk <= i; ++kk) s += b.k_probability(i, kk);
    CHECK(s == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("sample_k follows the k distribution") {
  MergerRateTable t(MeasureSpec::uniform(), 6);
  Stream rng(3, 0, Lane::chain_events);
  const int reps = 40000, i = 5;
  std::vector<long long> counts(i + 1, 0);
  for (int r = 0; r < reps; ++r) ++counts[t.sample_k(i, rng)];
  std::vector<long long> obs;
  std::vector<double> want;
  for (int kk = 2; kk <= i; ++kk) {
    obs.push_back(counts[kk]);
    want.push_back(t.k_probability(i, kk));
  }
  Chi2Result c = chi_square_gof(obs, want);
  CHECK(c.p_value > 1e-3);
}

TEST_CASE("chain hits the all-singletons survival probability") {
  // With i blocks nothing has happened by t iff the first wait exceeds t;
  // for uniform at n = 3 the total rate is 2.
  MeasureSpec m = MeasureSpec::uniform();
  MergerRateTable table(m, 3);
  const int reps = 20000;
  long still = 0;
  for (int r = 0; r < reps; ++r) {
    Stream rng(21, r, Lane::chain_events);
    ChainTrajectory tr = simulate_chain(table, 3, 1.0, {}, rng);
    if (tr.final_state.block_count() == 3) ++still;
  }
  const double want = std::exp(-2.0);
  const double p = double(still) / reps;
  const double se = std::sqrt(want * (1 - want) / reps);
  CHECK(std::abs(p - want) < 4 * se);
}

TEST_CASE("snapshots are right-continuous at event times") {
  MeasureSpec m = MeasureSpec::uniform();
  MergerRateTable table(m, 5);
  int checked = 0;
  for (int r = 0; r < 50; ++r) {
    Stream rng(77, r, Lane::chain_events);
    ChainTrajectory tr = simulate_chain(table, 5, 10.0, {}, rng);
    if (tr.events.empty()) continue;
    double t1 = tr.events[0].time;
    // identical randomness, snapshot exactly at the first event time
    Stream rng2(77, r, Lane::chain_events);
    ChainTrajectory tr2 = simulate_chain(table, 5, 10.0, {t1}, rng2);
    REQUIRE(tr2.snapshots.count(t1) == 1);
    CHECK(tr2.snapshots.at(t1).block_count() < 5);  // merge already applied
    ++checked;
  }
  CHECK(checked > 30);
}

TEST_CASE("trajectory records carry one event per line") {
  MergerRateTable table(MeasureSpec::uniform(), 4);
  Stream rng(5, 0, Lane::chain_events);
  ChainTrajectory tr = simulate_chain(table, 4, 100.0, {}, rng);
  REQUIRE(!tr.events.empty());
  std::istringstream lines(trajectory_records(tr));
  std::string line;
  std::size_t n_lines = 0;
  int blocks = 4;
  while (std::getline(lines, line)) {
    // "time k i0,i1,..,i(k-1) blocks"
    std::istringstream f(line);
    double time;
    int k, result_blocks;
    std::string indices;
    REQUIRE(bool(f >> time >> k >> indices >> result_blocks));
    CHECK(k == int(tr.events[n_lines].merged_blocks.size()));
    CHECK(std::count(indices.begin(), indices.end(), ',') == k - 1);
    blocks -= k - 1;
    CHECK(result_blocks == blocks);
    ++n_lines;
  }
  CHECK(n_lines == tr.events.size());
}

TEST_CASE("generator matrix for three blocks") {
  GeneratorMatrix g = rate_matrix(MeasureSpec::uniform(), 3);
  REQUIRE(g.states.size() == 5);  // Bell(3)
  Partition sing = Partition::singletons(3);
  Partition pair12 = Partition::parse("1,2|3");
  Partition full = Partition::parse("1,2,3");
  // Lebesgue: lambda_{3,2} = int (1-x) dx = 1/2 per specific pair and
  // lambda_{3,3} = int x dx = 1/2, so the singleton row leaves at rate 2.
  CHECK(g.rate(sing, pair12) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(g.rate(sing, full) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(g.rate(pair12, full) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(g.rate(pair12, sing) == 0.0);
  int i = g.index_of(sing);
  CHECK(g.rates[i][i] == doctest::Approx(-2.0).epsilon(1e-12));

  GeneratorMatrix g7 = rate_matrix(MeasureSpec::kingman(), 7);
  CHECK(g7.states.size() == 877);  // Bell(7)
}

TEST_CASE("transition probabilities, frozen three-block values") {
  // exp(t G) from all singletons at t = 1 for Lebesgue; frozen from an
  // independent matrix exponential.
  std::map<Partition, double> p =
      transition_probabilities(MeasureSpec::uniform(), 3, 1.0);
  Partition sing = Partition::singletons(3);
  Partition full = Partition::parse("1,2,3");
  CHECK(p.at(sing) ==
        doctest::Approx(0.13533528323661269).epsilon(1e-10));
  CHECK(p.at(Partition::parse("1,2|3")) ==
        doctest::Approx(0.11627207896741481).epsilon(1e-10));
  CHECK(p.at(Partition::parse("1,3|2")) ==
        doctest::Approx(0.11627207896741481).epsilon(1e-10));
  CHECK(p.at(Partition::parse("1|2,3")) ==
        doctest::Approx(0.11627207896741481).epsilon(1e-10));
  CHECK(p.at(full) ==
        doctest::Approx(0.51584847986114286).epsilon(1e-10));

  double total = 0.0;
  for (const auto& [part, prob] : p) total += prob;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-10));

  std::map<Partition, double> p5 =
      transition_probabilities(MeasureSpec::beta_family(1.5), 5, 0.7);
  double total5 = 0.0;
  for (const auto& [part, prob] : p5) {
    CHECK(prob >= -1e-12);
    total5 += prob;
  }
  CHECK(total5 == doctest::Approx(1.0).epsilon(1e-10));
}
