#include "lcoal/partition.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

#include "lcoal/errors.hpp"

namespace lcoal {

void Partition::rebuild_index() {
  block_of_.assign(static_cast<std::size_t>(n_) + 1, -1);
  for (std::size_t b = 0; b < blocks_.size(); ++b)
    for (int e : blocks_[b]) block_of_[static_cast<std::size_t>(e)] = static_cast<int>(b);
}

Partition Partition::singletons(int n) {
  if (n < 1) throw DomainError("Partition: ground set must be nonempty");
  Partition p;
  p.n_ = n;
  p.blocks_.reserve(static_cast<std::size_t>(n));
  for (int e = 1; e <= n; ++e) p.blocks_.push_back({e});
  p.rebuild_index();
  return p;
}

Partition Partition::from_blocks(int n, std::vector<std::vector<int>> blocks) {
  if (n < 1) throw DomainError("Partition: ground set must be nonempty");
  std::vector<char> seen(static_cast<std::size_t>(n) + 1, 0);
  int covered = 0;
  for (auto& b : blocks) {
    if (b.empty()) throw DomainError("Partition: empty block");
    std::sort(b.begin(), b.end());
    for (int e : b) {
      if (e < 1 || e > n) throw DomainError("Partition: element out of range");
      if (seen[static_cast<std::size_t>(e)])
        throw DomainError("Partition: element repeated across blocks");
      seen[static_cast<std::size_t>(e)] = 1;
      ++covered;
    }
  }
  if (covered != n) throw DomainError("Partition: blocks do not cover {1..n}");
  std::sort(blocks.begin(), blocks.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  Partition p;
  p.n_ = n;
  p.blocks_ = std::move(blocks);
  p.rebuild_index();
  return p;
}

Partition Partition::from_labels(const std::vector<int>& labels) {
  if (labels.empty()) throw DomainError("Partition: ground set must be nonempty");
  std::map<int, std::vector<int>> groups;
  for (std::size_t i = 0; i < labels.size(); ++i)
    groups[labels[i]].push_back(static_cast<int>(i) + 1);
  std::vector<std::vector<int>> blocks;
  blocks.reserve(groups.size());
  for (auto& [lab, b] : groups) {
    (void)lab;
    blocks.push_back(std::move(b));
  }
  return from_blocks(static_cast<int>(labels.size()), std::move(blocks));
}

Partition Partition::parse(const std::string& text) {
  std::vector<std::vector<int>> blocks;
  std::istringstream by_block(text);
  std::string blk;
  int maxe = 0;
  while (std::getline(by_block, blk, '|')) {
    std::vector<int> b;
    std::istringstream by_elem(blk);
    std::string tok;
    while (std::getline(by_elem, tok, ',')) {
      std::size_t pos = 0;
      int e;
      try {
        e = std::stoi(tok, &pos);
      } catch (const std::exception&) {
        throw DomainError("Partition::parse: bad element '" + tok + "'");
      }
      while (pos < tok.size() && std::isspace(static_cast<unsigned char>(tok[pos]))) ++pos;
      if (pos != tok.size())
        throw DomainError("Partition::parse: bad element '" + tok + "'");
      b.push_back(e);
      maxe = std::max(maxe, e);
    }
    if (b.empty()) throw DomainError("Partition::parse: empty block");
    blocks.push_back(std::move(b));
  }
  if (blocks.empty()) throw DomainError("Partition::parse: empty text");
  return from_blocks(maxe, std::move(blocks));
}

int Partition::block_of(int e) const {
  if (e < 1 || e > n_) throw DomainError("block_of: element out of range");
  return block_of_[static_cast<std::size_t>(e)];
}

std::string Partition::to_text() const {
  std::ostringstream out;
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    if (b) out << '|';
    for (std::size_t i = 0; i < blocks_[b].size(); ++i) {
      if (i) out << ',';
      out << blocks_[b][i];
    }
  }
  return out.str();
}

bool Partition::operator<(const Partition& o) const {
  if (n_ != o.n_) return n_ < o.n_;
  return blocks_ < o.blocks_;
}

Partition restrict(const Partition& p, int m) {
  if (m < 1 || m > p.n()) throw DomainError("restrict: m out of range");
  std::vector<std::vector<int>> blocks;
  for (const auto& b : p.blocks()) {
    std::vector<int> kept;
    for (int e : b)
      if (e <= m) kept.push_back(e);
    if (!kept.empty()) blocks.push_back(std::move(kept));
  }
  return Partition::from_blocks(m, std::move(blocks));
}

Partition merge(const Partition& p, const std::vector<int>& which) {
  std::vector<int> idx = which;
  std::sort(idx.begin(), idx.end());
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  if (idx.size() < 2) throw DomainError("merge: need at least two distinct blocks");
  for (int i : idx)
    if (i < 0 || i >= p.block_count())
      throw DomainError("merge: block index out of range");
  std::vector<std::vector<int>> blocks;
  std::vector<int> merged;
  std::size_t next = 0;
  for (int b = 0; b < p.block_count(); ++b) {
    if (next < idx.size() && idx[next] == b) {
      merged.insert(merged.end(), p.blocks()[static_cast<std::size_t>(b)].begin(),
                    p.blocks()[static_cast<std::size_t>(b)].end());
      ++next;
    } else {
      blocks.push_back(p.blocks()[static_cast<std::size_t>(b)]);
    }
  }
  blocks.push_back(std::move(merged));
  return Partition::from_blocks(p.n(), std::move(blocks));
}

FrequencySummary summarize(const Partition& p, int threshold) {
  if (threshold < 1) throw DomainError("summarize: threshold must be >= 1");
  FrequencySummary out;
  long small = 0;
  for (const auto& b : p.blocks()) {
    if (static_cast<int>(b.size()) <= threshold)
      small += static_cast<long>(b.size());
    else
      out.sorted_freqs.push_back(static_cast<double>(b.size()) / p.n());
  }
  std::sort(out.sorted_freqs.rbegin(), out.sorted_freqs.rend());
  out.dust = static_cast<double>(small) / p.n();
  return out;
}

}
