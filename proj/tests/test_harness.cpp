#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "lcoal/errors.hpp"
#include "lcoal/harness.hpp"

using namespace lcoal;

TEST_CASE("config parsing and the canonical echo") {
  ExperimentConfig c = parse_config(
      "# comment line\n"
      "measure = beta:0.5\n"
      "mode = flow\n"
      "t = 2.5\n"
      "eps = 0.25, 0.125\n"
      "thresholds = 0.01\n"
      "replicates = 10\n"
      "seed = 42\n");
  CHECK(c.mode == ExperimentConfig::Mode::flow);
  CHECK(c.measure.kind() == MeasureKind::beta_family);
  CHECK(c.measure.alpha() == 0.5);
  CHECK(c.t == 2.5);
  CHECK(c.eps_grid == std::vector<double>{0.25, 0.125});
  CHECK(c.replicates == 10);
  CHECK(c.seed == 42);

  // the echo parses back to the same canonical text (idempotence)
  std::string echo = canonical_config_text(c);
  CHECK(canonical_config_text(parse_config(echo)) == echo);

  CHECK_THROWS_AS(parse_config("measur = kingman\n"), DomainError);
  CHECK_THROWS_AS(parse_config("mode = warp\n"), DomainError);
  CHECK_THROWS_AS(parse_config("replicates = 0\n"), DomainError);
}

TEST_CASE("measure text forms") {
  CHECK(parse_measure("kingman").kind() == MeasureKind::atoms);
  CHECK(parse_measure("uniform").alpha() == 1.0);
  CHECK(parse_measure("beta:1.5").alpha() == 1.5);
  CHECK(parse_measure("x2").kind() == MeasureKind::piecewise_density);
  MeasureSpec a = parse_measure("atoms:0.5:2,0.25:1");
  REQUIRE(a.kind() == MeasureKind::atoms);
  CHECK(a.total_mass() == doctest::Approx(3.0));
  MeasureSpec p = parse_measure("piecewise:0,0.5,1;1;2");
  REQUIRE(p.kind() == MeasureKind::piecewise_density);
  CHECK(p.breakpoints() == std::vector<double>{0.0, 0.5, 1.0});
  CHECK_THROWS_AS(parse_measure("beta"), DomainError);
  CHECK_THROWS_AS(parse_measure("nope:1"), DomainError);
}

TEST_CASE("config hash separates configs, ignores formatting") {
  ExperimentConfig a = parse_config("measure=kingman\nn=5\n");
  ExperimentConfig b = parse_config("n = 5\nmeasure = kingman\n");
  ExperimentConfig c = parse_config("measure=kingman\nn=6\n");
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a) != config_hash(c));
}

TEST_CASE("raw campaigns concatenate exactly") {
  ExperimentConfig c = parse_config(
      "measure = beta:0.5\nmode = flow\nt = 1\n"
      "eps = 0.25,0.125,0.0625\nthresholds = 0.01\n"
      "replicates = 100\nseed = 9\n");
  CampaignData whole = run_raw(c, 0, 100);
  CampaignData left = run_raw(c, 0, 37);
  CampaignData right = run_raw(c, 37, 100);
  CampaignData merged = merge_campaigns(left, right);
  REQUIRE(merged.names == whole.names);
  REQUIRE(merged.columns.size() == whole.columns.size());
  for (std::size_t i = 0; i < whole.columns.size(); ++i) {
    REQUIRE(merged.columns[i].size() == whole.columns[i].size());
    for (std::size_t j = 0; j < whole.columns[i].size(); ++j) {
      // bitwise: replicate j's numbers cannot depend on the batch split
      if (std::isnan(whole.columns[i][j]))
        CHECK(std::isnan(merged.columns[i][j]));
      else
        CHECK(merged.columns[i][j] == whole.columns[i][j]);
    }
  }
  CHECK(report_csv(reduce(c, merged)) == report_csv(reduce(c, whole)));

  CHECK_THROWS_AS(merge_campaigns(right, left), DomainError);  // not adjacent
}

TEST_CASE("chain-mode report has the advertised columns") {
  ExperimentConfig c = parse_config(
      "measure = uniform\nmode = chain\nn = 6\nt = 1\n"
      "snapshots = 0.5, 1\nreplicates = 50\nseed = 3\n");
  McReport r = run(c);
  CHECK(r.seed == 3);
  CHECK(r.cfg_hash == config_hash(c));
  bool saw_blocks = false, saw_dust = false, saw_nonsingleton = false;
  for (const StatLine& s : r.stats) {
    if (s.name == "blocks:t=0.5") saw_blocks = true;
    if (s.name == "dust:t=1") saw_dust = true;
    if (s.name == "non_singletons:t=1") saw_nonsingleton = true;
    CHECK(s.count == 50);
  }
  CHECK(saw_blocks);
  CHECK(saw_dust);
  CHECK(saw_nonsingleton);

  std::string csv = report_csv(r);
  CHECK(csv.find("# seed=3") != std::string::npos);
  CHECK(csv.find("# config_hash=") != std::string::npos);
  CHECK(csv.find("statistic,mean,se,count") != std::string::npos);
  CHECK(csv.find("runtime") == std::string::npos);
}

TEST_CASE("jsonl dump is one record per replicate and statistic") {
  ExperimentConfig c = parse_config(
      "measure = uniform\nmode = chain\nn = 3\nt = 1\n"
      "snapshots = 1\nreplicates = 4\nseed = 1\n");
  CampaignData d = run_raw(c, 0, 4);
  std::istringstream lines(campaign_jsonl(c, d));
  std::string line;
  std::size_t count = 0, headers = 0;
  while (std::getline(lines, line)) {
    if (line.find("\"replicate\"") != std::string::npos)
      ++count;
    else if (line.find("\"config_hash\"") != std::string::npos)
      ++headers;
  }
  CHECK(headers == 1);
  CHECK(count == 4 * d.names.size());
}

TEST_CASE("embed-mode reduce reports per-stratum statistics") {
  ExperimentConfig c = parse_config(
      "measure = kingman\nmode = embed\nn = 5\nT = 0.2\n"
      "selector = all\nreplicates = 300\nseed = 11\n");
  McReport r = run(c);
  bool saw_rejected = false, saw_count = false;
  for (const StatLine& s : r.stats) {
    if (s.name == "rejected") saw_rejected = true;
    if (s.name.rfind("count:l=", 0) == 0) saw_count = true;
  }
  CHECK(saw_rejected);
  CHECK(saw_count);
}

TEST_CASE("dichotomy evidence rejects regimes C and D") {
  EvidenceKnobs k;
  k.replicates = 10;
  CHECK_THROWS_AS(dichotomy_evidence(MeasureSpec::uniform(), 1.0, k),
                  DomainError);
  CHECK_THROWS_AS(dichotomy_evidence(MeasureSpec::kingman(), 1.0, k),
                  DomainError);
}

TEST_CASE("dichotomy evidence, dusty measure with infinite activity") {
  EvidenceKnobs k;
  k.replicates = 300;
  k.seed = 5;
  EvidenceTable t = dichotomy_evidence(MeasureSpec::beta_family(0.5), 1.0, k);
  CHECK(t.regime == Regime::B);
  REQUIRE(t.rows.size() == 7);  // default grid 2^-2 .. 2^-8
  CHECK(t.rows.front().eps == 0.25);
  CHECK(t.monotone_fraction == 1.0);
  CHECK(t.strict_increase_fraction > 0.0);
  CHECK(t.dust_mean_final > 0.0);
  for (std::size_t j = 0; j + 1 < t.rows.size(); ++j)
    CHECK(t.rows[j + 1].mean_points > t.rows[j].mean_points);
  std::string text = evidence_text(t);
  CHECK(text.find("regime B") != std::string::npos);
  CHECK((text.find("PASS") != std::string::npos ||
         text.find("FAIL") != std::string::npos));
}

TEST_CASE("dichotomy evidence, finite-activity measure stabilizes") {
  EvidenceKnobs k;
  k.replicates = 300;
  k.seed = 6;
  EvidenceTable t = dichotomy_evidence(MeasureSpec::x_squared(), 1.0, k);
  CHECK(t.regime == Regime::A);
  CHECK(t.stable_fraction >= 0.90);
  CHECK(t.mean_abs_diff_fine <= 0.1);
  CHECK(t.pass);
  CHECK(evidence_text(t).find("regime A") != std::string::npos);
}
