#pragma once

#include <cstdint>
#include <vector>

#include "lcoal/chain.hpp"
#include "lcoal/measures.hpp"

namespace lcoal {

enum class BlockSelector {
  non_singleton,  // blocks of size >= 2 at the reference time
  all,
};

struct InducedEvent {
  double time;            // > T
  std::vector<int> reps;  // 0-based indices into `representatives`, sorted
};

// Coalescent induced on one representative (the least element) per selected
// block of the state at T. Base events merging fewer than two
// representative-carrying blocks are dropped; the induced state at T is all
// singletons by construction.
struct EmbeddedProcess {
  double T = 0.0;
  std::vector<int> representatives;  // strictly increasing
  std::vector<InducedEvent> induced_events;
};

// T must be one of traj's snapshot times; fewer than two selected blocks is
// an error (there is nothing to induce).
EmbeddedProcess embed(const ChainTrajectory& traj, double T,
                      BlockSelector sel = BlockSelector::non_singleton);

// Induced block count at time t >= T (right-continuous).
int induced_block_count(const EmbeddedProcess& e, double t);

// Distributional check that the induced process is again a coalescent with
// the same rates: conditional on l selected blocks at T, the first induced
// waiting time should be exponential(R_l) and the first merger size should
// follow C(l,k) lambda_{l,k} / R_l. Strata with fewer than min_samples
// replicates are skipped, not failed.
struct StratumReport {
  int l = 0;
  long count = 0;
  bool skipped = false;
  double ks_stat = 0.0, ks_p = 0.0;    // waiting times vs exponential(R_l)
  double chi2_stat = 0.0, chi2_p = 0.0;  // merger sizes vs the weight law
  int chi2_df = 0;
};

struct InducedRateReport {
  long replicates = 0;
  long rejected = 0;  // replicates with < 2 selected blocks at T
  std::vector<StratumReport> strata;
};

InducedRateReport induced_rate_test(const MeasureSpec& m, int n, double T,
                                    long replicates, std::uint64_t seed,
                                    BlockSelector sel = BlockSelector::non_singleton,
                                    long min_samples = 100);

}
