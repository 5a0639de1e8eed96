#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lcoal/embed.hpp"
#include "lcoal/flow.hpp"
#include "lcoal/measures.hpp"

namespace lcoal {

struct ExperimentConfig {
  enum class Mode { chain, flow, embed };

  MeasureSpec measure = MeasureSpec::uniform();
  Mode mode = Mode::chain;
  int n = 2;
  double t = 1.0;
  std::vector<double> eps_grid;        // flow: strictly decreasing
  std::vector<double> thresholds;      // flow: census thresholds
  std::vector<double> snapshot_times;  // chain
  double T = 0.0;                      // embed reference time
  BlockSelector selector = BlockSelector::non_singleton;
  long replicates = 1;
  std::uint64_t seed = 0;
};

// Flat key=value config text (one pair per line, '#' comments). Keys:
//   measure=beta:A | kingman | uniform | x2 | atoms:x:m,... |
//           piecewise:b0,b1,..;c00,c01;c10,..
//   mode=chain|flow|embed   n=   t=   eps=e0,e1,..   thresholds=..
//   snapshots=..            T=   selector=non_singleton|all
//   replicates=             seed=
ExperimentConfig parse_config(const std::string& text);
MeasureSpec parse_measure(const std::string& text);

// Canonical echo of a fully-resolved config; its FNV hash identifies the
// run in every output header.
std::string canonical_config_text(const ExperimentConfig& c);
std::uint64_t config_hash(const ExperimentConfig& c);

// Raw per-replicate statistic columns for replicate indices [rep_lo, rep_hi).
// Merging two adjacent ranges is plain concatenation, so any split of the
// replicate range reduces to identical aggregates.
struct CampaignData {
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;  // [statistic][replicate offset]
  long rep_lo = 0, rep_hi = 0;
};

CampaignData run_raw(const ExperimentConfig& c, long rep_lo, long rep_hi);
CampaignData merge_campaigns(const CampaignData& a, const CampaignData& b);

struct StatLine {
  std::string name;
  double mean = 0.0;
  double se = 0.0;
  long count = 0;
};

struct McReport {
  std::vector<StatLine> stats;
  std::vector<std::string> warnings;
  std::uint64_t seed = 0;
  std::uint64_t cfg_hash = 0;
  std::string config_text;
  double runtime_seconds = 0.0;  // informational; never serialized
};

McReport reduce(const ExperimentConfig& c, const CampaignData& data);
McReport run(const ExperimentConfig& c);

// CSV: commented header (version, seed, config hash, config echo), then
// one "name,mean,se,count" row per statistic. Deterministic bytes for a
// given (config, seed); wall-clock time is deliberately left out.
std::string report_csv(const McReport& r);
// JSONL per-replicate dump: one object per (replicate, statistic).
std::string campaign_jsonl(const ExperimentConfig& c, const CampaignData& d);

// Desk-scale evidence for the block-counting dichotomy, for measures in
// regimes A or B (regimes C and D are settled by the summability
// functional instead and are rejected here). Regime B: the coupled
// refinement must never lose holes, most paths must strictly gain them end
// to end, and dust must stay well above 0. Regime A: hole counts must
// stabilize once the truncation drops below the measure's support.
struct EvidenceKnobs {
  std::vector<double> eps_grid;       // default 2^-2 .. 2^-8
  double main_threshold = 0.01;
  long replicates = 4000;
  std::uint64_t seed = 1;
  // End-to-end growth bar. The true proportion of coupled paths that gain at
  // least one hole over the default grid is 0.5656 +- 0.0011 (paired MC,
  // 2*10^5 replicates) for the flagship regime-B case: heavy marks near 1
  // crush the dust early on many paths, and with it the chance of later hole
  // births. The bar sits 8 SE below that truth at the default replicate
  // count.
  double strict_fraction_min = 0.5;
  double dust_floor_factor = 0.5;     // regime B dust floor vs Campbell limit
  double stabilization_eps = 0.05;    // regime A: levels below this must agree
  double stable_fraction_min = 0.90;
  double mean_abs_diff_max = 0.1;
};

struct EvidenceRow {
  double eps = 0.0;
  double mean_points = 0.0;
  double mean_holes = 0.0;       // total hole count = case-A event count
  double mean_census_main = 0.0; // holes with size >= main_threshold
  double mean_dust = 0.0;
  double se_dust = 0.0;
};

struct EvidenceTable {
  Regime regime = Regime::A;
  std::vector<EvidenceRow> rows;
  // regime B verdict inputs
  double monotone_fraction = 0.0;         // paths with nondecreasing counts
  double strict_increase_fraction = 0.0;  // paths with count(last) > count(first)
  bool mean_census_strictly_increasing = false;
  double dust_mean_final = 0.0;
  double campbell_floor = 0.0;  // dust_floor_factor * exp(-t mu^-1)
  // regime A verdict inputs
  double stable_fraction = 0.0;      // paths constant below stabilization_eps
  double mean_abs_diff_fine = 0.0;   // mean |count step| below stabilization_eps
  bool pass = false;
  std::string verdict;
};

EvidenceTable dichotomy_evidence(const MeasureSpec& m, double t,
                                 const EvidenceKnobs& knobs);

std::string evidence_text(const EvidenceTable& t);

}
