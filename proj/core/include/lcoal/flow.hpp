#pragma once

#include <cstdint>
#include <vector>

#include "lcoal/bridge.hpp"
#include "lcoal/measures.hpp"
#include "lcoal/partition.hpp"
#include "lcoal/rng.hpp"

namespace lcoal {

struct FlowPoint {
  double time;  // in (0, t]
  double x;     // mark in (eps, 1)
};

// Poisson draw on (0,t] x (eps,1] with intensity dt x nu(dx), sorted by
// time. Times are strictly distinct (resampled on exact collision). Marks
// are distinct too for density-kind measures; atom measures legitimately
// repeat their atom locations.
struct PoissonPointSet {
  double t = 0.0;
  double eps = 1.0;
  std::vector<FlowPoint> points;
};

PoissonPointSet sample_points(const MeasureSpec& m, double t, double eps,
                              Stream& point_stream);

// Adds an independent Poisson layer on (eps_new, p.eps] to p: the existing
// points are kept as-is, so studies across truncation levels are coupled
// pathwise rather than re-drawn.
PoissonPointSet refine_points(const PoissonPointSet& p, const MeasureSpec& m,
                              double eps_new, Stream& point_stream);

// Per-factor bookkeeping from the tracked composition walk.
struct FlowEvent {
  double time = 0.0;
  double x = 0.0;
  double u = 0.0;       // location actually used (post-resampling)
  bool case_a = false;  // true: a hole was born; false: absorbed by a hole
  int resamples = 0;    // boundary collisions before u was accepted
  double dust_before = 0.0;  // slope of the prefix bridge
  double remap_u = 0.0;      // dust_remap of u under the prefix bridge
};

struct FlowBuild {
  FiniteBridge bridge;
  std::vector<FlowEvent> events;  // empty when tracking is off
};

// Compose simple bridges for the points in increasing time order, drawing
// each factor's uniform location from u_stream at composition time. The
// result's slope is exactly the running product of (1-x) factors.
FlowBuild build_flow_bridge(const PoissonPointSet& p, Stream& u_stream,
                            bool tracked = true);

// Count of holes with size >= threshold, one entry per threshold.
std::vector<long> hole_census(const FiniteBridge& b,
                              const std::vector<double>& thresholds);

// One replicate of the coupled multi-level construction over a decreasing
// eps grid: lower layers and the composition order are shared between
// levels, each new layer composing onto the right of the level-j bridge.
// Per level the bridge has the same law as a time-ordered build at that
// truncation (factors are i.i.d.), while pathwise the dust can only shrink
// and the hole count can only grow.
struct FlowResult {
  FiniteBridge bridge;  // finest level
  std::vector<std::pair<double, double>> dust_by_level;     // (eps, dust)
  std::vector<std::pair<double, long>> hole_census_final;   // (threshold, n)
  std::vector<std::pair<double, long>> point_count_by_level;  // (eps, N)
  std::vector<std::vector<long>> census_by_level;  // [level][threshold idx]
  std::vector<FlowEvent> events;                   // tracked builds only
};

// Reusable truncated-nu samplers for one eps grid: layer 0 covers
// (eps[0], 1], layer j covers (eps[j], eps[j-1]]. Build once per
// (measure, grid), share across replicates.
class LayerSamplers {
 public:
  LayerSamplers(const MeasureSpec& m, std::vector<double> eps_grid);
  const MeasureSpec& measure() const { return measure_; }
  const std::vector<double>& grid() const { return grid_; }
  double layer_mass(std::size_t j) const;
  double layer_sample(std::size_t j, Stream& s) const;

 private:
  MeasureSpec measure_;
  std::vector<double> grid_;
  std::vector<NuSampler> layers_;
};

FlowResult run_flow_levels(const LayerSamplers& samplers, double t,
                           const std::vector<double>& thresholds,
                           std::uint64_t seed, std::uint32_t replicate,
                           bool tracked = false);

// Convenience single-level paintbox draw: Poisson points, bridge, then a
// paintbox sample, with the three randomness sources on their own lanes of
// (seed, replicate) so the V-draws can be replayed across eps levels.
Partition flow_partition(const MeasureSpec& m, double t, double eps, int n,
                         std::uint64_t seed, std::uint32_t replicate);

}
