#pragma once

#include <map>
#include <string>
#include <vector>

#include "lcoal/measures.hpp"
#include "lcoal/partition.hpp"
#include "lcoal/rng.hpp"

namespace lcoal {

// Per-(measure, n) table of k-merger weights C(i,k) lambda_{i,k}, kept in
// log space so block counts in the thousands stay finite. Build once, share
// across replicates; the table is read-only after construction.
class MergerRateTable {
 public:
  MergerRateTable(const MeasureSpec& m, int n_max);

  int n_max() const { return n_max_; }
  // Total merger rate R_i with i blocks; finite for every finite i.
  double total_rate(int i) const;
  // Draw the merger size k with probability C(i,k) lambda_{i,k} / R_i.
  int sample_k(int i, Stream& rng) const;
  // Probability of size k given a merger happens at i blocks.
  double k_probability(int i, int k) const;

 private:
  int n_max_;
  std::vector<double> total_;               // [i]
  std::vector<std::vector<double>> probs_;  // [i][k], k = 2..i
};

struct ChainEvent {
  double time;
  std::vector<int> merged_blocks;  // indices into the pre-event partition
};

struct ChainTrajectory {
  explicit ChainTrajectory(int n_)
      : n(n_), final_state(Partition::singletons(n_)) {}

  int n;
  std::vector<ChainEvent> events;
  std::map<double, Partition> snapshots;  // requested time -> state there
  bool frozen = false;  // total rate hit 0 with blocks remaining
  Partition final_state;
};

// Exact Gillespie simulation of the restricted coalescent started from
// all singletons: waiting time exponential(R_i), size k by weight, then a
// uniform k-subset of blocks merges. States are right-continuous, so a
// snapshot exactly at an event time sees the merged state. A zero total
// rate freezes the chain (flagged, not an error).
ChainTrajectory simulate_chain(const MergerRateTable& table, int n,
                               double t_end,
                               const std::vector<double>& snapshot_times,
                               Stream& rng);
ChainTrajectory simulate_chain(const MeasureSpec& m, int n, double t_end,
                               const std::vector<double>& snapshot_times,
                               Stream& rng);

// Line-delimited event records: "time k indices result_block_count".
std::string trajectory_records(const ChainTrajectory& t);

// Exact generator over all partitions of {1..n}, n <= 7: entry pi -> pi'
// is lambda_{i,k} when pi' merges a specific k-subset of pi's i blocks;
// diagonal is minus the row sum.
struct GeneratorMatrix {
  std::vector<Partition> states;            // canonical enumeration order
  std::vector<std::vector<double>> rates;   // dense generator, states x states
  int index_of(const Partition& p) const;
  double rate(const Partition& from, const Partition& to) const;
};

GeneratorMatrix rate_matrix(const MeasureSpec& m, int n);

// exp(t G) applied to the all-singletons initial law, as a map from
// partition to probability. Computed by scaling-and-squaring and verified
// against uniformization; the two must agree to 1e-8 and the result sums
// to 1 within 1e-10.
std::map<Partition, double> transition_probabilities(const MeasureSpec& m,
                                                     int n, double t);

}
