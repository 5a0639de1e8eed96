#include "lcoal/chain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "lcoal/errors.hpp"
#include "lcoal/stats.hpp"

namespace lcoal {

MergerRateTable::MergerRateTable(const MeasureSpec& m, int n_max)
    : n_max_(n_max) {
  if (n_max < 2) throw DomainError("MergerRateTable: need n_max >= 2");
  total_.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
  probs_.resize(static_cast<std::size_t>(n_max) + 1);
  for (int i = 2; i <= n_max; ++i) {
    std::vector<double> logw(static_cast<std::size_t>(i) + 1,
                             -std::numeric_limits<double>::infinity());
    double best = -std::numeric_limits<double>::infinity();
    for (int k = 2; k <= i; ++k) {
      double lr = log_merger_rate(m, i, k);
      if (lr == -std::numeric_limits<double>::infinity()) continue;
      logw[static_cast<std::size_t>(k)] = log_binomial(i, k) + lr;
      best = std::max(best, logw[static_cast<std::size_t>(k)]);
    }
    auto& row = probs_[static_cast<std::size_t>(i)];
    row.assign(static_cast<std::size_t>(i) + 1, 0.0);
    if (best == -std::numeric_limits<double>::infinity()) {
      total_[static_cast<std::size_t>(i)] = 0.0;
      continue;
    }
    double z = 0.0;
    for (int k = 2; k <= i; ++k)
      z += row[static_cast<std::size_t>(k)] =
          std::exp(logw[static_cast<std::size_t>(k)] - best);
    for (int k = 2; k <= i; ++k) row[static_cast<std::size_t>(k)] /= z;
    total_[static_cast<std::size_t>(i)] = std::exp(best + std::log(z));
  }
}

double MergerRateTable::total_rate(int i) const {
  if (i < 2 || i > n_max_) throw DomainError("total_rate: i out of range");
  return total_[static_cast<std::size_t>(i)];
}

double MergerRateTable::k_probability(int i, int k) const {
  if (i < 2 || i > n_max_) throw DomainError("k_probability: i out of range");
  if (k < 2 || k > i) throw DomainError("k_probability: k out of range");
  return probs_[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
}

int MergerRateTable::sample_k(int i, Stream& rng) const {
  if (i < 2 || i > n_max_) throw DomainError("sample_k: i out of range");
  const auto& row = probs_[static_cast<std::size_t>(i)];
  double u = rng.next_double();
  double acc = 0.0;
  for (int k = 2; k <= i; ++k) {
    acc += row[static_cast<std::size_t>(k)];
    if (u < acc) return k;
  }
  return i;  // guards against roundoff in the cumulative walk
}

namespace {

// Uniform k-subset of {0..i-1} by partial Fisher-Yates; sorted for the
// canonical event record.
std::vector<int> sample_block_subset(int i, int k, Stream& rng) {
  std::vector<int> idx(static_cast<std::size_t>(i));
  std::iota(idx.begin(), idx.end(), 0);
  for (int j = 0; j < k; ++j) {
    std::uint64_t r = rng.below(static_cast<std::uint64_t>(i - j));
    std::swap(idx[static_cast<std::size_t>(j)],
              idx[static_cast<std::size_t>(j) + r]);
  }
  idx.resize(static_cast<std::size_t>(k));
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace

ChainTrajectory simulate_chain(const MergerRateTable& table, int n,
                               double t_end,
                               const std::vector<double>& snapshot_times,
                               Stream& rng) {
  if (n < 2) throw DomainError("simulate_chain: need n >= 2");
  if (n > table.n_max())
    throw DomainError("simulate_chain: n exceeds the rate table");
  if (!(t_end >= 0.0)) throw DomainError("simulate_chain: t_end must be >= 0");
  std::vector<double> snaps = snapshot_times;
  std::sort(snaps.begin(), snaps.end());
  for (double s : snaps)
    if (!(s >= 0.0) || !(s <= t_end))
      throw DomainError("simulate_chain: snapshot outside [0, t_end]");

  ChainTrajectory out(n);
  Partition state = Partition::singletons(n);
  double t = 0.0;
  std::size_t next_snap = 0;
  while (state.block_count() > 1) {
    int i = state.block_count();
    double ri = table.total_rate(i);
    if (ri == 0.0) {
      out.frozen = true;
      break;
    }
    double t_next = t + rng.exponential(ri);
    while (next_snap < snaps.size() && snaps[next_snap] < t_next &&
           snaps[next_snap] <= t_end) {
      out.snapshots.emplace(snaps[next_snap], state);
      ++next_snap;
    }
    if (t_next > t_end) {
      t = t_end;
      break;
    }
    int k = table.sample_k(i, rng);
    std::vector<int> subset = sample_block_subset(i, k, rng);
    out.events.push_back({t_next, subset});
    state = merge(state, subset);
    t = t_next;
  }
  while (next_snap < snaps.size()) {
    out.snapshots.emplace(snaps[next_snap], state);
    ++next_snap;
  }
  out.final_state = state;
  return out;
}

ChainTrajectory simulate_chain(const MeasureSpec& m, int n, double t_end,
                               const std::vector<double>& snapshot_times,
                               Stream& rng) {
  MergerRateTable table(m, n);
  return simulate_chain(table, n, t_end, snapshot_times, rng);
}

std::string trajectory_records(const ChainTrajectory& t) {
  std::ostringstream out;
  int blocks = t.n;
  for (const ChainEvent& e : t.events) {
    blocks -= static_cast<int>(e.merged_blocks.size()) - 1;
    out << format_real(e.time) << " " << e.merged_blocks.size() << " ";
    for (std::size_t i = 0; i < e.merged_blocks.size(); ++i) {
      if (i) out << ",";
      out << e.merged_blocks[i];
    }
    out << " " << blocks << "\n";
  }
  return out.str();
}

int GeneratorMatrix::index_of(const Partition& p) const {
  auto it = std::lower_bound(states.begin(), states.end(), p);
  if (it == states.end() || !(*it == p))
    throw DomainError("GeneratorMatrix: unknown partition");
  return static_cast<int>(it - states.begin());
}

double GeneratorMatrix::rate(const Partition& from, const Partition& to) const {
  return rates[static_cast<std::size_t>(index_of(from))]
              [static_cast<std::size_t>(index_of(to))];
}

namespace {

// All partitions of {1..n} by restricted growth strings.
std::vector<Partition> enumerate_partitions(int n) {
  std::vector<Partition> out;
  std::vector<int> rgs(static_cast<std::size_t>(n), 0);
  while (true) {
    out.push_back(Partition::from_labels(rgs));
    // next RGS: increment the rightmost digit that can grow
    int pos = n - 1;
    for (; pos > 0; --pos) {
      int cap = 0;
      for (int j = 0; j < pos; ++j) cap = std::max(cap, rgs[static_cast<std::size_t>(j)]);
      if (rgs[static_cast<std::size_t>(pos)] <= cap) break;
    }
    if (pos == 0) break;
    ++rgs[static_cast<std::size_t>(pos)];
    for (int j = pos + 1; j < n; ++j) rgs[static_cast<std::size_t>(j)] = 0;
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

GeneratorMatrix rate_matrix(const MeasureSpec& m, int n) {
  if (n < 2 || n > 7)
    throw DomainError("rate_matrix: n must lie in [2, 7]");
  GeneratorMatrix g;
  g.states = enumerate_partitions(n);
  std::size_t s = g.states.size();
  g.rates.assign(s, std::vector<double>(s, 0.0));
  for (std::size_t a = 0; a < s; ++a) {
    const Partition& p = g.states[a];
    int i = p.block_count();
    if (i < 2) continue;
    // every subset of blocks of size >= 2, via bitmask
    for (unsigned mask = 1; mask < (1u << i); ++mask) {
      int k = __builtin_popcount(mask);
      if (k < 2) continue;
      std::vector<int> which;
      for (int b = 0; b < i; ++b)
        if (mask & (1u << b)) which.push_back(b);
      Partition q = merge(p, which);
      std::size_t bidx = static_cast<std::size_t>(g.index_of(q));
      g.rates[a][bidx] += merger_rate(m, i, k);
    }
    double row = 0.0;
    for (std::size_t bidx = 0; bidx < s; ++bidx)
      if (bidx != a) row += g.rates[a][bidx];
    g.rates[a][a] = -row;
  }
  return g;
}

namespace {

// exp(tG) row for the all-singleton start via uniformization: with
// L = max |G_ii|, P = I + G/L, the row is sum_k Pois(tL)(k) (v P^k).
std::vector<double> uniformization_row(const std::vector<std::vector<double>>& G,
                                       std::size_t start, double t) {
  std::size_t s = G.size();
  double L = 0.0;
  for (std::size_t a = 0; a < s; ++a) L = std::max(L, -G[a][a]);
  std::vector<double> out(s, 0.0);
  if (L == 0.0) {
    out[start] = 1.0;
    return out;
  }
  std::vector<double> v(s, 0.0);
  v[start] = 1.0;
  double lt = L * t;
  double logw = -lt;  // log Poisson(k=0) weight
  double tail = 1.0;
  for (int k = 0; k < 100000; ++k) {
    double w = std::exp(logw);
    for (std::size_t a = 0; a < s; ++a) out[a] += w * v[a];
    tail -= w;
    if (tail < 1e-14 && k > lt) break;
    std::vector<double> nv(s, 0.0);
    for (std::size_t a = 0; a < s; ++a) {
      if (v[a] == 0.0) continue;
      for (std::size_t b = 0; b < s; ++b) {
        double p = G[a][b] / L + (a == b ? 1.0 : 0.0);
        if (p != 0.0) nv[b] += v[a] * p;
      }
    }
    v = std::move(nv);
    logw += std::log(lt) - std::log1p(k);  // advance to Poisson weight k+1
  }
  return out;
}

}  // namespace

std::map<Partition, double> transition_probabilities(const MeasureSpec& m,
                                                     int n, double t) {
  if (!(t >= 0.0))
    throw DomainError("transition_probabilities: t must be >= 0");
  GeneratorMatrix g = rate_matrix(m, n);
  std::size_t s = g.states.size();
  std::size_t start = static_cast<std::size_t>(
      g.index_of(Partition::singletons(n)));

  Eigen::MatrixXd G(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s));
  for (std::size_t a = 0; a < s; ++a)
    for (std::size_t b = 0; b < s; ++b)
      G(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
          g.rates[a][b];
  Eigen::MatrixXd E = (t * G).exp();

  std::vector<double> check = uniformization_row(g.rates, start, t);
  double total = 0.0;
  std::map<Partition, double> out;
  for (std::size_t b = 0; b < s; ++b) {
    double p = E(static_cast<Eigen::Index>(start), static_cast<Eigen::Index>(b));
    if (std::abs(p - check[b]) > 1e-8)
      throw InconclusiveError(
          "transition_probabilities: matrix exponential and uniformization "
          "disagree");
    p = std::max(p, 0.0);
    total += p;
    out.emplace(g.states[b], p);
  }
  if (std::abs(total - 1.0) > 1e-10)
    throw InconclusiveError(
        "transition_probabilities: probabilities do not sum to 1");
  return out;
}

}
