#pragma once

#include <string>
#include <vector>

namespace lcoal {

// Partition of {1..n} in canonical form: each block strictly increasing,
// blocks ordered by least element. Immutable; operations return new values.
class Partition {
 public:
  static Partition singletons(int n);
  // Validates disjointness and coverage, then canonicalizes.
  static Partition from_blocks(int n, std::vector<std::vector<int>> blocks);
  // Groups equal labels; element i+1 gets labels[i]. Block order follows
  // least elements, so the label values themselves never matter.
  static Partition from_labels(const std::vector<int>& labels);
  // Text form "1,2|3"; must cover {1..n} for n = largest element.
  static Partition parse(const std::string& text);

  int n() const { return n_; }
  int block_count() const { return static_cast<int>(blocks_.size()); }
  const std::vector<std::vector<int>>& blocks() const { return blocks_; }
  // 0-based index of the block containing element e (1-based).
  int block_of(int e) const;

  std::string to_text() const;

  bool operator==(const Partition& o) const {
    return n_ == o.n_ && blocks_ == o.blocks_;
  }
  bool operator!=(const Partition& o) const { return !(*this == o); }
  // Lexicographic on the canonical block lists; gives maps a stable order.
  bool operator<(const Partition& o) const;

 private:
  Partition() = default;
  void rebuild_index();

  int n_ = 0;
  std::vector<std::vector<int>> blocks_;
  std::vector<int> block_of_;  // dense element -> block index, O(1) membership
};

// Keep only elements <= m; emptied blocks vanish, order is restored.
Partition restrict(const Partition& p, int m);

// Replace the blocks at the given (0-based) indices by their union;
// at least two distinct indices required.
Partition merge(const Partition& p, const std::vector<int>& which);

// Finite-n frequency estimate. True asymptotic frequencies are limits, so
// a block of size <= threshold counts as dust (|b|/n each), and larger
// blocks contribute |b|/n to the sorted frequency list. threshold = 1
// means exact singletons.
struct FrequencySummary {
  std::vector<double> sorted_freqs;  // nonincreasing
  double dust = 0.0;
};

FrequencySummary summarize(const Partition& p, int threshold = 1);

}
