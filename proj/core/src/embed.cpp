#include "lcoal/embed.hpp"

#include <algorithm>
#include <map>

#include "lcoal/errors.hpp"
#include "lcoal/stats.hpp"

namespace lcoal {

EmbeddedProcess embed(const ChainTrajectory& traj, double T,
                      BlockSelector sel) {
  auto snap = traj.snapshots.find(T);
  if (snap == traj.snapshots.end())
    throw DomainError("embed: T must be one of the trajectory's snapshots");
  const Partition& at_T = snap->second;

  EmbeddedProcess out;
  out.T = T;
  for (const auto& b : at_T.blocks())
    if (sel == BlockSelector::all || b.size() >= 2)
      out.representatives.push_back(b.front());
  if (out.representatives.size() < 2)
    throw DomainError("embed: fewer than two selected blocks at T");

  // Replay the base chain from scratch; event block indices refer to the
  // state just before each event, so the walk must mirror the simulation.
  Partition state = Partition::singletons(traj.n);
  for (const ChainEvent& e : traj.events) {
    if (e.time > T) {
      std::vector<int> touched;
      for (std::size_t r = 0; r < out.representatives.size(); ++r) {
        int blk = state.block_of(out.representatives[r]);
        if (std::binary_search(e.merged_blocks.begin(), e.merged_blocks.end(),
                               blk))
          touched.push_back(static_cast<int>(r));
      }
      if (touched.size() >= 2) out.induced_events.push_back({e.time, touched});
    }
    state = merge(state, e.merged_blocks);
  }
  return out;
}

int induced_block_count(const EmbeddedProcess& e, double t) {
  if (!(t >= e.T)) throw DomainError("induced_block_count: t must be >= T");
  int count = static_cast<int>(e.representatives.size());
  for (const InducedEvent& ev : e.induced_events)
    if (ev.time <= t) count -= static_cast<int>(ev.reps.size()) - 1;
  return count;
}

InducedRateReport induced_rate_test(const MeasureSpec& m, int n, double T,
                                    long replicates, std::uint64_t seed,
                                    BlockSelector sel, long min_samples) {
  if (n < 2 || n > 7)
    throw DomainError("induced_rate_test: n must lie in [2, 7]");
  if (!(T >= 0.0)) throw DomainError("induced_rate_test: T must be >= 0");
  if (replicates < 1)
    throw DomainError("induced_rate_test: need at least one replicate");

  MergerRateTable table(m, n);
  // waiting times and first-event sizes, bucketed by selected block count l
  std::map<int, std::vector<double>> waits;
  std::map<int, std::vector<long>> sizes;  // counts indexed by k

  InducedRateReport out;
  out.replicates = replicates;
  for (long r = 0; r < replicates; ++r) {
    Stream s(seed, static_cast<std::uint32_t>(r), Lane::chain_events);
    // run to absorption so the first induced event is always observed
    ChainTrajectory traj = simulate_chain(table, n, 1e18, {T}, s);
    EmbeddedProcess emb;
    try {
      emb = embed(traj, T, sel);
    } catch (const DomainError&) {
      ++out.rejected;
      continue;
    }
    if (emb.induced_events.empty()) continue;  // frozen chain; cannot happen
                                               // with positive rates
    int l = static_cast<int>(emb.representatives.size());
    const InducedEvent& first = emb.induced_events.front();
    waits[l].push_back(first.time - T);
    auto& sz = sizes[l];
    if (sz.empty()) sz.assign(static_cast<std::size_t>(l) + 1, 0);
    ++sz[first.reps.size()];
  }

  for (auto& [l, w] : waits) {
    StratumReport sr;
    sr.l = l;
    sr.count = static_cast<long>(w.size());
    if (sr.count < min_samples) {
      sr.skipped = true;
      out.strata.push_back(sr);
      continue;
    }
    KsResult ks = ks_test_exponential(w, table.total_rate(l));
    sr.ks_stat = ks.statistic;
    sr.ks_p = ks.p_value;
    std::vector<long long> counts;
    std::vector<double> probs;
    int live = 0;
    for (int k = 2; k <= l; ++k) {
      counts.push_back(sizes[l][static_cast<std::size_t>(k)]);
      probs.push_back(table.k_probability(l, k));
      if (probs.back() > 0.0) ++live;
    }
    if (live >= 2) {
      Chi2Result c2 = chi_square_gof(counts, probs);
      sr.chi2_stat = c2.statistic;
      sr.chi2_df = c2.df;
      sr.chi2_p = c2.p_value;
    } else {
      // a single admissible merger size (l = 2, or a pure pairwise
      // measure) leaves the size law with nothing to test
      sr.chi2_p = 1.0;
    }
    out.strata.push_back(sr);
  }
  return out;
}

}
