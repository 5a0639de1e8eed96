#include "lcoal/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>

#include "lcoal/errors.hpp"
#include "lcoal/stats.hpp"
#include "lcoal/version.hpp"

namespace lcoal {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    std::size_t next = s.find(sep, pos);
    if (next == std::string::npos) {
      out.push_back(s.substr(pos));
      return out;
    }
    out.push_back(s.substr(pos, next - pos));
    pos = next + 1;
  }
}

double parse_double(const std::string& raw, const char* what) {
  const std::string t = trim(raw);
  if (t.empty()) throw DomainError(std::string("config: empty ") + what);
  char* end = nullptr;
  double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size() || !std::isfinite(v))
    throw DomainError(std::string("config: bad ") + what + " '" + t + "'");
  return v;
}

long parse_long(const std::string& raw, const char* what) {
  const std::string t = trim(raw);
  char* end = nullptr;
  long v = std::strtol(t.c_str(), &end, 10);
  if (t.empty() || end != t.c_str() + t.size())
    throw DomainError(std::string("config: bad ") + what + " '" + t + "'");
  return v;
}

std::vector<double> parse_list(const std::string& raw, const char* what) {
  std::vector<double> out;
  if (trim(raw).empty()) return out;
  for (const std::string& piece : split(raw, ','))
    out.push_back(parse_double(piece, what));
  return out;
}

std::string join_reals(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += format_real(v[i]);
  }
  return out;
}

std::string measure_text(const MeasureSpec& m) {
  switch (m.kind()) {
    case MeasureKind::beta_family:
      return "beta:" + format_real(m.alpha());
    case MeasureKind::atoms: {
      std::string out = "atoms:";
      const auto& a = m.atom_list();
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (i) out += ',';
        out += format_real(a[i].first) + ":" + format_real(a[i].second);
      }
      return out;
    }
    case MeasureKind::piecewise_density: {
      std::string out = "piecewise:" + join_reals(m.breakpoints());
      for (const auto& piece : m.coefficients()) out += ";" + join_reals(piece);
      return out;
    }
  }
  throw DomainError("measure_text: unknown kind");
}

const char* mode_text(ExperimentConfig::Mode m) {
  switch (m) {
    case ExperimentConfig::Mode::chain: return "chain";
    case ExperimentConfig::Mode::flow: return "flow";
    case ExperimentConfig::Mode::embed: return "embed";
  }
  return "?";
}

std::string stat_suffix(const char* key, double v) {
  return std::string(":") + key + "=" + format_real(v);
}

void append_csv_field(std::string& out, double v) {
  out += format_real(v);
}

}  // namespace

MeasureSpec parse_measure(const std::string& text) {
  const std::string t = trim(text);
  if (t == "kingman") return MeasureSpec::kingman();
  if (t == "uniform") return MeasureSpec::uniform();
  if (t == "x2") return MeasureSpec::x_squared();
  const std::size_t colon = t.find(':');
  const std::string head = colon == std::string::npos ? t : t.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : t.substr(colon + 1);
  if (head == "beta") return MeasureSpec::beta_family(parse_double(rest, "alpha"));
  if (head == "atoms") {
    std::vector<std::pair<double, double>> atoms;
    for (const std::string& pair : split(rest, ',')) {
      std::vector<std::string> parts = split(pair, ':');
      if (parts.size() != 2)
        throw DomainError("config: atoms expect x:mass pairs, got '" + pair + "'");
      atoms.emplace_back(parse_double(parts[0], "atom location"),
                         parse_double(parts[1], "atom mass"));
    }
    return MeasureSpec::atoms(std::move(atoms));
  }
  if (head == "piecewise") {
    std::vector<std::string> groups = split(rest, ';');
    if (groups.size() < 2)
      throw DomainError("config: piecewise expects breaks;coeffs[;coeffs..]");
    std::vector<double> breaks = parse_list(groups[0], "breakpoint");
    std::vector<std::vector<double>> coeffs;
    for (std::size_t i = 1; i < groups.size(); ++i)
      coeffs.push_back(parse_list(groups[i], "coefficient"));
    return MeasureSpec::piecewise_density(std::move(breaks), std::move(coeffs));
  }
  throw DomainError("config: unknown measure '" + t + "'");
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig c;
  for (const std::string& raw_line : split(text, '\n')) {
    std::string line = trim(raw_line);
    if (line.empty() || line[0] == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw DomainError("config: expected key=value, got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "measure") {
      c.measure = parse_measure(value);
    } else if (key == "mode") {
      if (value == "chain") c.mode = ExperimentConfig::Mode::chain;
      else if (value == "flow") c.mode = ExperimentConfig::Mode::flow;
      else if (value == "embed") c.mode = ExperimentConfig::Mode::embed;
      else throw DomainError("config: mode must be chain|flow|embed");
    } else if (key == "n") {
      c.n = static_cast<int>(parse_long(value, "n"));
    } else if (key == "t") {
      c.t = parse_double(value, "t");
    } else if (key == "eps") {
      c.eps_grid = parse_list(value, "eps");
    } else if (key == "thresholds") {
      c.thresholds = parse_list(value, "threshold");
    } else if (key == "snapshots") {
      c.snapshot_times = parse_list(value, "snapshot time");
    } else if (key == "T") {
      c.T = parse_double(value, "T");
    } else if (key == "selector") {
      if (value == "non_singleton") c.selector = BlockSelector::non_singleton;
      else if (value == "all") c.selector = BlockSelector::all;
      else throw DomainError("config: selector must be non_singleton|all");
    } else if (key == "replicates") {
      c.replicates = parse_long(value, "replicates");
    } else if (key == "seed") {
      char* end = nullptr;
      c.seed = std::strtoull(value.c_str(), &end, 10);
      if (value.empty() || end != value.c_str() + value.size())
        throw DomainError("config: bad seed '" + value + "'");
    } else {
      throw DomainError("config: unknown key '" + key + "'");
    }
  }
  if (c.n < 1) throw DomainError("config: n must be >= 1");
  if (!(c.t >= 0.0)) throw DomainError("config: t must be >= 0");
  if (c.replicates < 1) throw DomainError("config: replicates must be >= 1");
  return c;
}

std::string canonical_config_text(const ExperimentConfig& c) {
  std::string out;
  out += "measure=" + measure_text(c.measure) + "\n";
  out += std::string("mode=") + mode_text(c.mode) + "\n";
  out += "n=" + std::to_string(c.n) + "\n";
  out += "t=" + format_real(c.t) + "\n";
  out += "eps=" + join_reals(c.eps_grid) + "\n";
  out += "thresholds=" + join_reals(c.thresholds) + "\n";
  out += "snapshots=" + join_reals(c.snapshot_times) + "\n";
  out += "T=" + format_real(c.T) + "\n";
  out += std::string("selector=") +
         (c.selector == BlockSelector::all ? "all" : "non_singleton") + "\n";
  out += "replicates=" + std::to_string(c.replicates) + "\n";
  out += "seed=" + std::to_string(c.seed) + "\n";
  return out;
}

std::uint64_t config_hash(const ExperimentConfig& c) {
  return fnv1a64(canonical_config_text(c));
}

namespace {

struct ColumnSet {
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;
  std::size_t add(std::string name) {
    names.push_back(std::move(name));
    columns.emplace_back();
    return columns.size() - 1;
  }
};

CampaignData run_raw_chain(const ExperimentConfig& c, long rep_lo, long rep_hi) {
  std::vector<double> snaps = c.snapshot_times;
  if (snaps.empty()) snaps.push_back(c.t);
  ColumnSet cols;
  std::vector<std::size_t> blocks_col, singles_col, nonsingles_col, dust_col,
      allsingle_col;
  for (double s : snaps) {
    blocks_col.push_back(cols.add("blocks" + stat_suffix("t", s)));
    singles_col.push_back(cols.add("singletons" + stat_suffix("t", s)));
    nonsingles_col.push_back(cols.add("non_singletons" + stat_suffix("t", s)));
    dust_col.push_back(cols.add("dust" + stat_suffix("t", s)));
    allsingle_col.push_back(cols.add("all_singletons" + stat_suffix("t", s)));
  }
  const MergerRateTable table(c.measure, c.n);
  const double t_end = *std::max_element(snaps.begin(), snaps.end());
  for (long r = rep_lo; r < rep_hi; ++r) {
    Stream rng(c.seed, static_cast<std::uint32_t>(r), Lane::chain_events);
    ChainTrajectory traj = simulate_chain(table, c.n, t_end, snaps, rng);
    for (std::size_t j = 0; j < snaps.size(); ++j) {
      const Partition& p = traj.snapshots.at(snaps[j]);
      long singles = 0;
      for (const auto& b : p.blocks()) singles += b.size() == 1 ? 1 : 0;
      cols.columns[blocks_col[j]].push_back(double(p.block_count()));
      cols.columns[singles_col[j]].push_back(double(singles));
      cols.columns[nonsingles_col[j]].push_back(double(p.block_count() - singles));
      cols.columns[dust_col[j]].push_back(double(singles) / double(c.n));
      cols.columns[allsingle_col[j]].push_back(p.block_count() == c.n ? 1.0 : 0.0);
    }
  }
  return CampaignData{std::move(cols.names), std::move(cols.columns), rep_lo, rep_hi};
}

CampaignData run_raw_flow(const ExperimentConfig& c, long rep_lo, long rep_hi) {
  if (c.eps_grid.empty())
    throw DomainError("flow mode needs a nonempty eps= grid");
  std::vector<double> thresholds = c.thresholds;
  if (thresholds.empty()) thresholds.push_back(0.0);
  const LayerSamplers samplers(c.measure, c.eps_grid);
  ColumnSet cols;
  std::vector<std::size_t> points_col, holes_col, dust_col;
  std::vector<std::vector<std::size_t>> census_col(c.eps_grid.size());
  for (std::size_t j = 0; j < c.eps_grid.size(); ++j) {
    const double eps = c.eps_grid[j];
    points_col.push_back(cols.add("points" + stat_suffix("eps", eps)));
    holes_col.push_back(cols.add("holes" + stat_suffix("eps", eps)));
    dust_col.push_back(cols.add("dust" + stat_suffix("eps", eps)));
    for (double thr : thresholds)
      census_col[j].push_back(cols.add("census" + stat_suffix("eps", eps) +
                                       stat_suffix("thr", thr)));
  }
  const std::size_t mismatch = cols.add("dust_mismatch");
  const std::size_t monotone = cols.add("holes_monotone");
  const std::size_t strict = cols.add("holes_strict_gain");

  // Census at threshold 0 is the total hole count; prepend it when absent so
  // the per-path coupling checks always have it, without renaming columns.
  std::vector<double> eff_thresholds = thresholds;
  const bool has_zero = !thresholds.empty() && thresholds.front() == 0.0;
  if (!has_zero) eff_thresholds.insert(eff_thresholds.begin(), 0.0);
  const std::size_t off = has_zero ? 0 : 1;

  for (long r = rep_lo; r < rep_hi; ++r) {
    FlowResult res = run_flow_levels(samplers, c.t, eff_thresholds, c.seed,
                                     static_cast<std::uint32_t>(r), true);
    bool mono = true;
    long prev_total = -1;
    for (std::size_t j = 0; j < c.eps_grid.size(); ++j) {
      const long total = res.census_by_level[j][0];
      if (prev_total >= 0 && total < prev_total) mono = false;
      prev_total = total;
      cols.columns[points_col[j]].push_back(double(res.point_count_by_level[j].second));
      cols.columns[holes_col[j]].push_back(double(total));
      cols.columns[dust_col[j]].push_back(res.dust_by_level[j].second);
      for (std::size_t k = 0; k < thresholds.size(); ++k)
        cols.columns[census_col[j][k]].push_back(double(res.census_by_level[j][k + off]));
    }
    double product = 1.0;
    for (const FlowEvent& e : res.events) product *= 1.0 - e.x;
    cols.columns[mismatch].push_back(std::fabs(res.bridge.slope() - product));
    cols.columns[monotone].push_back(mono ? 1.0 : 0.0);
    const long first = res.census_by_level.front()[0];
    const long last = res.census_by_level.back()[0];
    cols.columns[strict].push_back(last > first ? 1.0 : 0.0);
  }
  return CampaignData{std::move(cols.names), std::move(cols.columns), rep_lo, rep_hi};
}

CampaignData run_raw_embed(const ExperimentConfig& c, long rep_lo, long rep_hi) {
  const double nan = std::nan("");
  ColumnSet cols;
  const std::size_t rejected = cols.add("rejected");
  const std::size_t l_col = cols.add("induced_l");
  const std::size_t wait_col = cols.add("first_wait");
  const std::size_t k_col = cols.add("first_k");
  const MergerRateTable table(c.measure, c.n);
  for (long r = rep_lo; r < rep_hi; ++r) {
    Stream rng(c.seed, static_cast<std::uint32_t>(r), Lane::chain_events);
    ChainTrajectory traj = simulate_chain(table, c.n, 1e18, {c.T}, rng);
    try {
      EmbeddedProcess e = embed(traj, c.T, c.selector);
      cols.columns[rejected].push_back(0.0);
      cols.columns[l_col].push_back(double(e.representatives.size()));
      if (e.induced_events.empty()) {
        cols.columns[wait_col].push_back(nan);
        cols.columns[k_col].push_back(nan);
      } else {
        cols.columns[wait_col].push_back(e.induced_events.front().time - c.T);
        cols.columns[k_col].push_back(double(e.induced_events.front().reps.size()));
      }
    } catch (const DomainError&) {
      cols.columns[rejected].push_back(1.0);
      cols.columns[l_col].push_back(nan);
      cols.columns[wait_col].push_back(nan);
      cols.columns[k_col].push_back(nan);
    }
  }
  return CampaignData{std::move(cols.names), std::move(cols.columns), rep_lo, rep_hi};
}

}  // namespace

CampaignData run_raw(const ExperimentConfig& c, long rep_lo, long rep_hi) {
  if (rep_lo < 0 || rep_hi < rep_lo)
    throw DomainError("run_raw: need 0 <= rep_lo <= rep_hi");
  switch (c.mode) {
    case ExperimentConfig::Mode::chain: return run_raw_chain(c, rep_lo, rep_hi);
    case ExperimentConfig::Mode::flow: return run_raw_flow(c, rep_lo, rep_hi);
    case ExperimentConfig::Mode::embed: return run_raw_embed(c, rep_lo, rep_hi);
  }
  throw DomainError("run_raw: unknown mode");
}

CampaignData merge_campaigns(const CampaignData& a, const CampaignData& b) {
  if (a.names != b.names)
    throw DomainError("merge_campaigns: statistic columns differ");
  if (a.rep_hi != b.rep_lo)
    throw DomainError("merge_campaigns: ranges must be adjacent");
  CampaignData out;
  out.names = a.names;
  out.rep_lo = a.rep_lo;
  out.rep_hi = b.rep_hi;
  out.columns.resize(a.columns.size());
  for (std::size_t i = 0; i < a.columns.size(); ++i) {
    out.columns[i] = a.columns[i];
    out.columns[i].insert(out.columns[i].end(), b.columns[i].begin(),
                          b.columns[i].end());
  }
  return out;
}

namespace {

McReport reduce_embed(const ExperimentConfig& c, const CampaignData& data) {
  McReport r;
  const auto col = [&](const char* name) -> const std::vector<double>& {
    for (std::size_t i = 0; i < data.names.size(); ++i)
      if (data.names[i] == name) return data.columns[i];
    throw DomainError(std::string("reduce: missing column ") + name);
  };
  const std::vector<double>& rejected = col("rejected");
  const std::vector<double>& ls = col("induced_l");
  const std::vector<double>& waits = col("first_wait");
  const std::vector<double>& ks = col("first_k");
  long n_rejected = 0;
  std::map<int, std::pair<std::vector<double>, std::vector<long long>>> strata;
  for (std::size_t i = 0; i < rejected.size(); ++i) {
    if (rejected[i] != 0.0) {
      ++n_rejected;
      continue;
    }
    if (std::isnan(waits[i])) continue;
    const int l = static_cast<int>(ls[i]);
    auto& s = strata[l];
    s.first.push_back(waits[i]);
    if (s.second.empty()) s.second.assign(std::size_t(l) - 1, 0);
    const int k = static_cast<int>(ks[i]);
    s.second[std::size_t(k) - 2] += 1;
  }
  r.stats.push_back({"replicates", double(rejected.size()), 0.0,
                     long(rejected.size())});
  r.stats.push_back({"rejected", double(n_rejected), 0.0, n_rejected});
  const MergerRateTable table(c.measure, c.n);
  constexpr long kMinSamples = 100;
  for (auto& [l, s] : strata) {
    const long count = long(s.first.size());
    const std::string at = stat_suffix("l", double(l));
    r.stats.push_back({"count" + at, double(count), 0.0, count});
    if (count < kMinSamples || l < 2) {
      r.warnings.push_back("stratum l=" + std::to_string(l) +
                           " skipped (" + std::to_string(count) + " samples)");
      continue;
    }
    KsResult kr = ks_test_exponential(s.first, table.total_rate(l));
    r.stats.push_back({"ks_stat" + at, kr.statistic, 0.0, count});
    r.stats.push_back({"ks_p" + at, kr.p_value, 0.0, count});
    std::vector<double> probs;
    int live = 0;
    for (int k = 2; k <= l; ++k) {
      probs.push_back(table.k_probability(l, k));
      if (probs.back() > 0.0) ++live;
    }
    // the size law needs at least two admissible merger sizes to test
    if (live >= 2) {
      Chi2Result cr = chi_square_gof(s.second, probs);
      r.stats.push_back({"chi2_stat" + at, cr.statistic, 0.0, count});
      r.stats.push_back({"chi2_p" + at, cr.p_value, 0.0, count});
    }
  }
  return r;
}

}  // namespace

McReport reduce(const ExperimentConfig& c, const CampaignData& data) {
  McReport r;
  if (c.mode == ExperimentConfig::Mode::embed) {
    r = reduce_embed(c, data);
  } else {
    for (std::size_t i = 0; i < data.names.size(); ++i) {
      MeanSe ms = mean_se(data.columns[i]);
      r.stats.push_back({data.names[i], ms.mean, ms.se, long(ms.n)});
    }
  }
  r.seed = c.seed;
  r.config_text = canonical_config_text(c);
  r.cfg_hash = config_hash(c);
  try {
    Behaviour b = classify(c.measure);
    r.warnings.push_back(std::string("regime ") + regime_letter(b.label));
  } catch (const InconclusiveError& e) {
    r.warnings.push_back(std::string("classification inconclusive: ") + e.what());
  }
  return r;
}

McReport run(const ExperimentConfig& c) {
  const auto start = std::chrono::steady_clock::now();
  CampaignData data = run_raw(c, 0, c.replicates);
  McReport r = reduce(c, data);
  r.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return r;
}

std::string report_csv(const McReport& r) {
  std::string out;
  out += std::string("# lcoal_version=") + kVersion + "\n";
  out += "# seed=" + std::to_string(r.seed) + "\n";
  char hex[32];
  std::snprintf(hex, sizeof hex, "%016llx",
                static_cast<unsigned long long>(r.cfg_hash));
  out += std::string("# config_hash=") + hex + "\n";
  for (const std::string& line : split(r.config_text, '\n'))
    if (!line.empty()) out += "# config " + line + "\n";
  for (const std::string& w : r.warnings) out += "# note " + w + "\n";
  out += "statistic,mean,se,count\n";
  for (const StatLine& s : r.stats) {
    out += s.name;
    out += ',';
    append_csv_field(out, s.mean);
    out += ',';
    append_csv_field(out, s.se);
    out += ',';
    out += std::to_string(s.count);
    out += '\n';
  }
  return out;
}

std::string campaign_jsonl(const ExperimentConfig& c, const CampaignData& d) {
  std::string out;
  char hex[32];
  std::snprintf(hex, sizeof hex, "%016llx",
                static_cast<unsigned long long>(config_hash(c)));
  out += std::string("{\"lcoal_version\":\"") + kVersion + "\",\"seed\":" +
         std::to_string(c.seed) + ",\"config_hash\":\"" + hex + "\"}\n";
  for (std::size_t i = 0; i < d.columns.size(); ++i) {
    for (std::size_t j = 0; j < d.columns[i].size(); ++j) {
      out += "{\"replicate\":" + std::to_string(d.rep_lo + long(j)) +
             ",\"statistic\":\"" + d.names[i] + "\",\"value\":";
      const double v = d.columns[i][j];
      out += std::isnan(v) ? "null" : format_real(v);
      out += "}\n";
    }
  }
  return out;
}

EvidenceTable dichotomy_evidence(const MeasureSpec& m, double t,
                                 const EvidenceKnobs& knobs) {
  Behaviour b = classify(m);
  if (b.label == Regime::C || b.label == Regime::D)
    throw DomainError(
        "dichotomy evidence applies to regimes A and B only; regimes C and D "
        "are decided by the summability functional (see classify and mu_star)");
  EvidenceKnobs k = knobs;
  if (k.eps_grid.empty())
    for (int j = 2; j <= 8; ++j) k.eps_grid.push_back(std::ldexp(1.0, -j));
  const std::size_t levels = k.eps_grid.size();
  if (levels < 2) throw DomainError("dichotomy evidence needs >= 2 eps levels");
  const LayerSamplers samplers(m, k.eps_grid);
  const std::vector<double> thresholds{0.0, k.main_threshold};

  EvidenceTable out;
  out.regime = b.label;
  std::vector<std::vector<double>> dust(levels);
  std::vector<double> points_sum(levels, 0.0), holes_sum(levels, 0.0),
      census_sum(levels, 0.0);
  long mono_ok = 0, strict_ok = 0, stable_ok = 0;
  double fine_diff_sum = 0.0;
  long fine_diff_n = 0;

  std::vector<std::size_t> fine;  // levels below the stabilization cutoff
  for (std::size_t j = 0; j < levels; ++j)
    if (k.eps_grid[j] < k.stabilization_eps) fine.push_back(j);
  if (b.label == Regime::A && fine.size() < 2)
    throw DomainError("stabilization check needs >= 2 eps levels below the cutoff");

  for (long r = 0; r < k.replicates; ++r) {
    FlowResult res = run_flow_levels(samplers, t, thresholds, k.seed,
                                     static_cast<std::uint32_t>(r), false);
    bool mono = true;
    for (std::size_t j = 0; j < levels; ++j) {
      const long total = res.census_by_level[j][0];
      if (j > 0 && total < res.census_by_level[j - 1][0]) mono = false;
      points_sum[j] += double(res.point_count_by_level[j].second);
      holes_sum[j] += double(total);
      census_sum[j] += double(res.census_by_level[j][1]);
      dust[j].push_back(res.dust_by_level[j].second);
    }
    mono_ok += mono ? 1 : 0;
    strict_ok += res.census_by_level.back()[0] > res.census_by_level.front()[0];
    if (!fine.empty()) {
      bool stable = true;
      for (std::size_t i = 1; i < fine.size(); ++i) {
        const long d = res.census_by_level[fine[i]][0] -
                       res.census_by_level[fine[i - 1]][0];
        if (d != 0) stable = false;
        fine_diff_sum += double(std::labs(d));
        ++fine_diff_n;
      }
      stable_ok += stable ? 1 : 0;
    }
  }

  const double reps = double(k.replicates);
  for (std::size_t j = 0; j < levels; ++j) {
    MeanSe ms = mean_se(dust[j]);
    out.rows.push_back({k.eps_grid[j], points_sum[j] / reps, holes_sum[j] / reps,
                        census_sum[j] / reps, ms.mean, ms.se});
  }
  out.monotone_fraction = double(mono_ok) / reps;
  out.strict_increase_fraction = double(strict_ok) / reps;
  out.mean_census_strictly_increasing = true;
  for (std::size_t j = 1; j < levels; ++j)
    if (!(out.rows[j].mean_census_main > out.rows[j - 1].mean_census_main))
      out.mean_census_strictly_increasing = false;
  out.dust_mean_final = out.rows.back().mean_dust;
  out.stable_fraction = fine.empty() ? 0.0 : double(stable_ok) / reps;
  out.mean_abs_diff_fine =
      fine_diff_n > 0 ? fine_diff_sum / double(fine_diff_n) : 0.0;

  if (b.label == Regime::B) {
    ExtendedReal mu1 = moment(m, -1);
    if (mu1.infinite)
      throw DomainError("regime B measure reported an infinite first negative moment");
    out.campbell_floor = k.dust_floor_factor * std::exp(-t * mu1.value);
    const bool coupled_ok = out.monotone_fraction == 1.0;
    const bool growth_ok = out.strict_increase_fraction >= k.strict_fraction_min;
    const bool dust_ok = out.dust_mean_final >= out.campbell_floor;
    out.pass = coupled_ok && growth_ok && dust_ok;
    out.verdict = out.pass
        ? "evidence supports unbounded hole growth with positive dust (regime B)"
        : std::string("regime B evidence incomplete:") +
              (coupled_ok ? "" : " coupling lost holes;") +
              (growth_ok ? "" : " too few strictly growing paths;") +
              (dust_ok ? "" : " dust mean below the Campbell floor;");
  } else {
    const bool stable_ok_frac = out.stable_fraction >= k.stable_fraction_min;
    const bool diff_ok = out.mean_abs_diff_fine <= k.mean_abs_diff_max;
    out.pass = stable_ok_frac && diff_ok;
    out.verdict = out.pass
        ? "evidence supports finite stabilization of the hole count (regime A)"
        : std::string("regime A evidence incomplete:") +
              (stable_ok_frac ? "" : " too few stabilized paths;") +
              (diff_ok ? "" : " hole counts still moving below the cutoff;");
  }
  return out;
}

std::string evidence_text(const EvidenceTable& t) {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "regime %c\n", regime_letter(t.regime));
  out += buf;
  out += "eps,mean_points,mean_holes,mean_census_main,mean_dust,se_dust\n";
  for (const EvidenceRow& r : t.rows) {
    out += format_real(r.eps) + "," + format_real(r.mean_points) + "," +
           format_real(r.mean_holes) + "," + format_real(r.mean_census_main) +
           "," + format_real(r.mean_dust) + "," + format_real(r.se_dust) + "\n";
  }
  std::snprintf(buf, sizeof buf,
                "monotone_fraction=%s\nstrict_increase_fraction=%s\n",
                format_real(t.monotone_fraction).c_str(),
                format_real(t.strict_increase_fraction).c_str());
  out += buf;
  if (t.regime == Regime::B) {
    std::snprintf(buf, sizeof buf, "dust_mean_final=%s campbell_floor=%s\n",
                  format_real(t.dust_mean_final).c_str(),
                  format_real(t.campbell_floor).c_str());
    out += buf;
  } else {
    std::snprintf(buf, sizeof buf, "stable_fraction=%s mean_abs_diff_fine=%s\n",
                  format_real(t.stable_fraction).c_str(),
                  format_real(t.mean_abs_diff_fine).c_str());
    out += buf;
  }
  out += std::string(t.pass ? "PASS" : "FAIL") + ": " + t.verdict + "\n";
  return out;
}

}
