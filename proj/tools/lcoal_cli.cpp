// Command-line front end: classify a driving measure, simulate the
// finite-restriction chain or the flow-of-bridges construction, run the
// dichotomy evidence harness, or render a bridge as SVG.
//
// Every output starts with a header naming the tool version, the seed in
// effect, and the hash of the fully-resolved configuration, so any artifact
// can be traced back to the exact run that produced it.

#include <cstdio>
#include <fstream>
#include <random>
#include <string>

#include "CLI11.hpp"
#include "lcoal/chain.hpp"
#include "lcoal/errors.hpp"
#include "lcoal/flow.hpp"
#include "lcoal/harness.hpp"
#include "lcoal/measures.hpp"
#include "lcoal/stats.hpp"
#include "lcoal/version.hpp"

namespace {

using lcoal::DomainError;
using lcoal::ExperimentConfig;
using lcoal::InconclusiveError;
using lcoal::MeasureSpec;

struct MeasureFlags {
  double beta_alpha = -1.0;
  bool kingman = false, uniform = false, x2 = false;
  std::string text;  // parse_measure syntax

  void attach(CLI::App* cmd) {
    cmd->add_option("--beta", beta_alpha,
                    "Beta-family measure with this parameter in (0,2]");
    cmd->add_flag("--kingman", kingman, "Unit atom at 0");
    cmd->add_flag("--uniform", uniform, "Uniform density on [0,1]");
    cmd->add_flag("--x2", x2, "Density x^2 on [0,1]");
    cmd->add_option("--measure", text,
                    "Measure in config syntax, e.g. beta:0.5 or atoms:0:1");
  }

  // Returns true if any flag was given; fills m.
  bool resolve(MeasureSpec& m) const {
    int sources = (beta_alpha >= 0.0) + kingman + uniform + x2 + !text.empty();
    if (sources > 1)
      throw DomainError("give exactly one measure flag");
    if (sources == 0) return false;
    if (beta_alpha >= 0.0) m = MeasureSpec::beta_family(beta_alpha);
    else if (kingman) m = MeasureSpec::kingman();
    else if (uniform) m = MeasureSpec::uniform();
    else if (x2) m = MeasureSpec::x_squared();
    else m = lcoal::parse_measure(text);
    return true;
  }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("cannot read config file '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return text;
}

// Config file first, explicit flags on top.
struct CommonOpts {
  std::string config_path;
  MeasureFlags measure;
  int n = -1;
  double t = -1.0;
  std::vector<double> eps, thresholds, snapshots;
  double T = -1.0;
  long replicates = -1;
  std::uint64_t seed = 0;
  bool seed_given = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "Flat key=value config file");
    measure.attach(cmd);
    cmd->add_option("--n", n, "Sample size");
    cmd->add_option("--t", t, "Time horizon");
    cmd->add_option("--eps", eps, "Decreasing truncation grid")->delimiter(',');
    cmd->add_option("--thresholds", thresholds, "Census size thresholds")
        ->delimiter(',');
    cmd->add_option("--snapshots", snapshots, "Chain snapshot times")
        ->delimiter(',');
    cmd->add_option("--T", T, "Reference time for the induced process");
    cmd->add_option("--replicates", replicates, "Monte Carlo replicates");
    cmd->add_option_function<std::uint64_t>(
           "--seed",
           [this](const std::uint64_t& s) {
             seed = s;
             seed_given = true;
           },
           "Root seed (generated and printed when omitted)");
  }

  ExperimentConfig build(ExperimentConfig::Mode mode, bool randomized) {
    ExperimentConfig c;
    if (!config_path.empty()) c = lcoal::parse_config(read_file(config_path));
    c.mode = mode;
    MeasureSpec m = c.measure;
    if (measure.resolve(m)) c.measure = m;
    else if (config_path.empty())
      throw DomainError("no measure given (use --beta/--kingman/--uniform/--x2/"
                        "--measure or a config file)");
    if (n >= 0) c.n = n;
    if (t >= 0.0) c.t = t;
    if (!eps.empty()) c.eps_grid = eps;
    if (!thresholds.empty()) c.thresholds = thresholds;
    if (!snapshots.empty()) c.snapshot_times = snapshots;
    if (T >= 0.0) c.T = T;
    if (replicates >= 0) c.replicates = replicates;
    if (seed_given) {
      c.seed = seed;
    } else if (randomized && c.seed == 0) {
      std::random_device rd;
      c.seed = (std::uint64_t(rd()) << 32) | rd();
      std::fprintf(stderr, "generated seed=%llu\n",
                   static_cast<unsigned long long>(c.seed));
    }
    return c;
  }
};

void print_header(FILE* out, const ExperimentConfig& c) {
  std::fprintf(out, "# lcoal_version=%s\n", lcoal::kVersion);
  std::fprintf(out, "# seed=%llu\n", static_cast<unsigned long long>(c.seed));
  std::fprintf(out, "# config_hash=%016llx\n",
               static_cast<unsigned long long>(lcoal::config_hash(c)));
}

FILE* open_output(const std::string& path) {
  if (path.empty() || path == "-") return stdout;
  FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw DomainError("cannot write output file '" + path + "'");
  return f;
}

void emit(const std::string& out_path, const std::string& payload) {
  FILE* f = open_output(out_path);
  std::fwrite(payload.data(), 1, payload.size(), f);
  if (f != stdout) std::fclose(f);
}

int cmd_classify(CommonOpts& opts) {
  ExperimentConfig c = opts.build(ExperimentConfig::Mode::chain, false);
  std::string out;
  out += std::string("# lcoal_version=") + lcoal::kVersion + "\n";
  out += "# seed=" + std::to_string(c.seed) + "\n";
  char hex[32];
  std::snprintf(hex, sizeof hex, "%016llx",
                static_cast<unsigned long long>(lcoal::config_hash(c)));
  out += std::string("# config_hash=") + hex + "\n";
  out += "measure=" + c.measure.describe() + "\n";
  try {
    lcoal::Behaviour b = lcoal::classify(c.measure);
    out += std::string("regime=") + lcoal::regime_letter(b.label) + "\n";
    out += std::string("first_negative_moment_finite=") +
           (b.mu_minus1_finite ? "true" : "false") + "\n";
    out += std::string("second_negative_moment_finite=") +
           (b.mu_minus2_finite ? "true" : "false") + "\n";
    out += std::string("summability_functional_finite=") +
           (b.mu_star_finite ? "true" : "false") + "\n";
    lcoal::MuStarResult ms = lcoal::mu_star(c.measure);
    out += std::string(ms.infinite ? "summability_partial=" : "summability_value=") +
           lcoal::format_real(ms.value) + "\n";
    out += "growth_exponent=" + lcoal::format_real(ms.diagnostics.growth_exponent) + "\n";
    if (!ms.infinite) {
      out += "tail_estimate=" + lcoal::format_real(ms.diagnostics.tail_estimate) + "\n";
      out += std::string("extrapolation_stable=") +
             (ms.diagnostics.extrapolation_stable ? "true" : "false") + "\n";
    }
  } catch (const InconclusiveError& e) {
    out += std::string("warning: classification inconclusive: ") + e.what() + "\n";
  }
  std::fputs(out.c_str(), stdout);
  return 0;
}

int cmd_simulate_chain(CommonOpts& opts, const std::string& out_path,
                       bool jsonl, bool trajectory) {
  ExperimentConfig c = opts.build(ExperimentConfig::Mode::chain, true);
  if (trajectory) {
    std::vector<double> snaps = c.snapshot_times;
    if (snaps.empty()) snaps.push_back(c.t);
    lcoal::Stream rng(c.seed, 0, lcoal::Lane::chain_events);
    lcoal::ChainTrajectory traj =
        lcoal::simulate_chain(c.measure, c.n, c.t, snaps, rng);
    std::string out;
    out += std::string("# lcoal_version=") + lcoal::kVersion + "\n";
    out += "# seed=" + std::to_string(c.seed) + "\n";
    char hex[32];
    std::snprintf(hex, sizeof hex, "%016llx",
                  static_cast<unsigned long long>(lcoal::config_hash(c)));
    out += std::string("# config_hash=") + hex + "\n";
    out += lcoal::trajectory_records(traj);
    emit(out_path, out);
    return 0;
  }
  if (jsonl) {
    lcoal::CampaignData d = lcoal::run_raw(c, 0, c.replicates);
    emit(out_path, lcoal::campaign_jsonl(c, d));
    return 0;
  }
  lcoal::McReport r = lcoal::run(c);
  std::fprintf(stderr, "runtime_seconds=%.3f\n", r.runtime_seconds);
  emit(out_path, lcoal::report_csv(r));
  return 0;
}

int cmd_simulate_flow(CommonOpts& opts, const std::string& out_path,
                      bool jsonl, bool emit_bridge) {
  ExperimentConfig c = opts.build(ExperimentConfig::Mode::flow, true);
  if (emit_bridge) {
    if (c.eps_grid.empty()) throw DomainError("flow mode needs an eps= grid");
    lcoal::LayerSamplers samplers(c.measure, c.eps_grid);
    std::vector<double> thr = c.thresholds.empty() ? std::vector<double>{0.0}
                                                   : c.thresholds;
    lcoal::FlowResult res =
        lcoal::run_flow_levels(samplers, c.t, thr, c.seed, 0, false);
    std::string out;
    out += std::string("# lcoal_version=") + lcoal::kVersion + "\n";
    out += "# seed=" + std::to_string(c.seed) + "\n";
    char hex[32];
    std::snprintf(hex, sizeof hex, "%016llx",
                  static_cast<unsigned long long>(lcoal::config_hash(c)));
    out += std::string("# config_hash=") + hex + "\n";
    out += lcoal::serialize_bridge(res.bridge) + "\n";
    emit(out_path, out);
    return 0;
  }
  if (jsonl) {
    lcoal::CampaignData d = lcoal::run_raw(c, 0, c.replicates);
    emit(out_path, lcoal::campaign_jsonl(c, d));
    return 0;
  }
  lcoal::McReport r = lcoal::run(c);
  std::fprintf(stderr, "runtime_seconds=%.3f\n", r.runtime_seconds);
  emit(out_path, lcoal::report_csv(r));
  return 0;
}

int cmd_verify(CommonOpts& opts, double main_threshold) {
  ExperimentConfig c = opts.build(ExperimentConfig::Mode::flow, true);
  lcoal::EvidenceKnobs knobs;
  knobs.eps_grid = c.eps_grid;
  knobs.seed = c.seed;
  if (c.replicates > 1) knobs.replicates = c.replicates;
  if (main_threshold > 0.0) knobs.main_threshold = main_threshold;
  print_header(stdout, c);
  lcoal::EvidenceTable table =
      lcoal::dichotomy_evidence(c.measure, c.t, knobs);
  std::fputs(lcoal::evidence_text(table).c_str(), stdout);
  return table.pass ? 0 : 1;
}

int cmd_render(CommonOpts& opts, const std::string& bridge_text,
               const std::string& out_path) {
  std::string out;
  if (!bridge_text.empty()) {
    lcoal::FiniteBridge b = lcoal::parse_bridge(bridge_text);
    out += "<!-- lcoal_version=" + std::string(lcoal::kVersion) + " -->\n";
    out += lcoal::render_svg(b);
    emit(out_path, out);
    return 0;
  }
  ExperimentConfig c = opts.build(ExperimentConfig::Mode::flow, true);
  if (c.eps_grid.empty()) throw DomainError("render needs --bridge or an eps= grid");
  lcoal::LayerSamplers samplers(c.measure, c.eps_grid);
  lcoal::FlowResult res =
      lcoal::run_flow_levels(samplers, c.t, {0.0}, c.seed, 0, false);
  char hex[32];
  std::snprintf(hex, sizeof hex, "%016llx",
                static_cast<unsigned long long>(lcoal::config_hash(c)));
  out += "<!-- lcoal_version=" + std::string(lcoal::kVersion) +
         " seed=" + std::to_string(c.seed) + " config_hash=" + hex + " -->\n";
  out += lcoal::render_svg(res.bridge);
  emit(out_path, out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lambda-coalescent simulation and analysis"};
  app.require_subcommand(1);

  CommonOpts classify_opts, chain_opts, flow_opts, verify_opts, render_opts;
  std::string chain_out, flow_out, render_out, bridge_text;
  bool chain_jsonl = false, chain_traj = false;
  bool flow_jsonl = false, flow_bridge = false;
  double verify_threshold = 0.0;

  CLI::App* classify = app.add_subcommand("classify", "Behaviour regime of a measure");
  classify_opts.attach(classify);

  CLI::App* chain = app.add_subcommand("simulate-chain",
                                       "Finite-restriction Markov chain");
  chain_opts.attach(chain);
  chain->add_option("--out", chain_out, "Output path (default stdout)");
  chain->add_flag("--jsonl", chain_jsonl, "Per-replicate JSONL dump");
  chain->add_flag("--trajectory", chain_traj,
                  "Single-path event records instead of a report");

  CLI::App* flow = app.add_subcommand("simulate-flow", "Flow of bridges");
  flow_opts.attach(flow);
  flow->add_option("--out", flow_out, "Output path (default stdout)");
  flow->add_flag("--jsonl", flow_jsonl, "Per-replicate JSONL dump");
  flow->add_flag("--emit-bridge", flow_bridge,
                 "Serialized finest-level bridge for replicate 0");

  CLI::App* verify = app.add_subcommand(
      "verify", "Dichotomy evidence for a regime A or B measure");
  verify_opts.attach(verify);
  verify->add_option("--main-threshold", verify_threshold,
                     "Census threshold for the growth trend");

  CLI::App* render = app.add_subcommand("render", "Bridge graph as SVG");
  render_opts.attach(render);
  render->add_option("--bridge", bridge_text, "Serialized bridge slope;u:s,..");
  render->add_option("--out", render_out, "Output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the message and usage pointer
    return 2;
  }

  try {
    if (classify->parsed()) return cmd_classify(classify_opts);
    if (chain->parsed())
      return cmd_simulate_chain(chain_opts, chain_out, chain_jsonl, chain_traj);
    if (flow->parsed())
      return cmd_simulate_flow(flow_opts, flow_out, flow_jsonl, flow_bridge);
    if (verify->parsed()) return cmd_verify(verify_opts, verify_threshold);
    if (render->parsed()) return cmd_render(render_opts, bridge_text, render_out);
  } catch (const DomainError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const InconclusiveError& e) {
    std::fprintf(stderr, "inconclusive: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
