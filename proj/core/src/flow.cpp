#include "lcoal/flow.hpp"

#include <algorithm>
#include <iostream>
#include <set>

#include "lcoal/errors.hpp"

namespace lcoal {

namespace {

// Draw a point batch with distinct times (and distinct marks for density
// kinds; atom measures repeat locations by design). Exact collisions have
// probability zero and are resampled.
void draw_batch(std::uint64_t n, double t, const MeasureSpec& m,
                const NuSampler& sampler, Stream& s,
                std::set<double>& used_times, std::set<double>& used_x,
                std::vector<FlowPoint>& out) {
  bool distinct_x = m.kind() != MeasureKind::atoms;
  for (std::uint64_t i = 0; i < n; ++i) {
    double time;
    do {
      time = t * (1.0 - s.next_double());  // lands in (0, t]
    } while (!used_times.insert(time).second);
    double x;
    do {
      x = sampler.sample(s);
    } while (distinct_x && !used_x.insert(x).second);
    out.push_back({time, x});
  }
}

void sort_by_time(std::vector<FlowPoint>& pts) {
  std::sort(pts.begin(), pts.end(),
            [](const FlowPoint& a, const FlowPoint& b) {
              return a.time < b.time;
            });
}

// One tracked composition step with boundary resampling.
TrackedComposition compose_step(const FiniteBridge& b, double x,
                                Stream& u_stream, double* u_used,
                                int* resamples) {
  *resamples = 0;
  for (;;) {
    double u = u_stream.next_double();
    try {
      TrackedComposition tc = compose_tracked(b, x, u);
      *u_used = u;
      return tc;
    } catch (const BoundaryCollision&) {
      ++*resamples;
      std::cerr << "flow: resampled u after a boundary collision\n";
    }
  }
}

}  // namespace

PoissonPointSet sample_points(const MeasureSpec& m, double t, double eps,
                              Stream& point_stream) {
  if (!(t > 0.0)) throw DomainError("sample_points: t must be positive");
  if (!(eps > 0.0) || !(eps < 1.0))
    throw DomainError("sample_points: eps must lie in (0, 1)");
  PoissonPointSet out;
  out.t = t;
  out.eps = eps;
  NuSampler sampler(m, eps, 1.0);
  std::uint64_t n = point_stream.poisson(t * sampler.mass());
  if (n > 0) {
    std::set<double> used_times, used_x;
    draw_batch(n, t, m, sampler, point_stream, used_times, used_x, out.points);
    sort_by_time(out.points);
  }
  return out;
}

PoissonPointSet refine_points(const PoissonPointSet& p, const MeasureSpec& m,
                              double eps_new, Stream& point_stream) {
  if (!(eps_new > 0.0) || !(eps_new < p.eps))
    throw DomainError("refine_points: need 0 < eps_new < current eps");
  PoissonPointSet out = p;
  out.eps = eps_new;
  NuSampler sampler(m, eps_new, p.eps);
  std::uint64_t n = point_stream.poisson(p.t * sampler.mass());
  if (n > 0) {
    std::set<double> used_times, used_x;
    for (const FlowPoint& q : p.points) {
      used_times.insert(q.time);
      used_x.insert(q.x);
    }
    draw_batch(n, p.t, m, sampler, point_stream, used_times, used_x,
               out.points);
    sort_by_time(out.points);
  }
  return out;
}

FlowBuild build_flow_bridge(const PoissonPointSet& p, Stream& u_stream,
                            bool tracked) {
  FlowBuild out;
  if (tracked) out.events.reserve(p.points.size());
  for (const FlowPoint& pt : p.points) {
    double u = 0.0;
    int resamples = 0;
    FlowEvent ev;
    if (tracked) {
      ev.time = pt.time;
      ev.x = pt.x;
      ev.dust_before = out.bridge.slope();
    }
    TrackedComposition tc =
        compose_step(out.bridge, pt.x, u_stream, &u, &resamples);
    if (tracked) {
      ev.u = u;
      ev.resamples = resamples;
      ev.case_a = tc.added_hole;
      ev.remap_u = dust_remap(out.bridge, u);
      out.events.push_back(ev);
    }
    out.bridge = std::move(tc.result);
  }
  return out;
}

std::vector<long> hole_census(const FiniteBridge& b,
                              const std::vector<double>& thresholds) {
  std::vector<long> out(thresholds.size(), 0);
  for (const Hole& h : b.holes())
    for (std::size_t i = 0; i < thresholds.size(); ++i)
      if (h.size() >= thresholds[i]) ++out[i];
  return out;
}

LayerSamplers::LayerSamplers(const MeasureSpec& m, std::vector<double> eps_grid)
    : measure_(m), grid_(std::move(eps_grid)) {
  if (grid_.empty()) throw DomainError("LayerSamplers: empty eps grid");
  for (std::size_t j = 0; j < grid_.size(); ++j) {
    if (!(grid_[j] > 0.0) || !(grid_[j] < 1.0))
      throw DomainError("LayerSamplers: eps must lie in (0, 1)");
    if (j > 0 && !(grid_[j] < grid_[j - 1]))
      throw DomainError("LayerSamplers: eps grid must strictly decrease");
    layers_.emplace_back(m, grid_[j], j == 0 ? 1.0 : grid_[j - 1]);
  }
}

double LayerSamplers::layer_mass(std::size_t j) const {
  return layers_.at(j).mass();
}

double LayerSamplers::layer_sample(std::size_t j, Stream& s) const {
  return layers_.at(j).sample(s);
}

FlowResult run_flow_levels(const LayerSamplers& samplers, double t,
                           const std::vector<double>& thresholds,
                           std::uint64_t seed, std::uint32_t replicate,
                           bool tracked) {
  if (!(t > 0.0)) throw DomainError("run_flow_levels: t must be positive");
  Stream point_stream(seed, replicate, Lane::poisson_points);
  Stream u_stream(seed, replicate, Lane::composition_u);
  const MeasureSpec& m = samplers.measure();
  const std::vector<double>& grid = samplers.grid();

  FlowResult out;
  std::set<double> used_times, used_x;
  long total_points = 0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    std::uint64_t n = point_stream.poisson(t * samplers.layer_mass(j));
    std::vector<FlowPoint> layer;
    if (n > 0) {
      // draw via the shared layer sampler; NuSampler::sample pulls from the
      // provided stream, so reuse draw_batch's collision bookkeeping inline
      bool distinct_x = m.kind() != MeasureKind::atoms;
      for (std::uint64_t i = 0; i < n; ++i) {
        double time;
        do {
          time = t * (1.0 - point_stream.next_double());
        } while (!used_times.insert(time).second);
        double x;
        do {
          x = samplers.layer_sample(j, point_stream);
        } while (distinct_x && !used_x.insert(x).second);
        layer.push_back({time, x});
      }
      sort_by_time(layer);
    }
    // Compose the new layer onto the right of the current bridge, in the
    // layer's own time order. Each level's bridge then has the one-level
    // law (i.i.d. factors commute in law) while dust and hole count move
    // monotonically along the path.
    for (const FlowPoint& pt : layer) {
      double u = 0.0;
      int resamples = 0;
      FlowEvent ev;
      if (tracked) {
        ev.time = pt.time;
        ev.x = pt.x;
        ev.dust_before = out.bridge.slope();
      }
      TrackedComposition tc =
          compose_step(out.bridge, pt.x, u_stream, &u, &resamples);
      if (tracked) {
        ev.u = u;
        ev.resamples = resamples;
        ev.case_a = tc.added_hole;
        ev.remap_u = dust_remap(out.bridge, u);
        out.events.push_back(ev);
      }
      out.bridge = std::move(tc.result);
    }
    total_points += static_cast<long>(n);
    out.dust_by_level.emplace_back(grid[j], out.bridge.slope());
    out.point_count_by_level.emplace_back(grid[j], total_points);
    out.census_by_level.push_back(hole_census(out.bridge, thresholds));
  }
  for (std::size_t i = 0; i < thresholds.size(); ++i)
    out.hole_census_final.emplace_back(thresholds[i],
                                       out.census_by_level.back()[i]);
  return out;
}

Partition flow_partition(const MeasureSpec& m, double t, double eps, int n,
                         std::uint64_t seed, std::uint32_t replicate) {
  Stream point_stream(seed, replicate, Lane::poisson_points);
  Stream u_stream(seed, replicate, Lane::composition_u);
  Stream v_stream(seed, replicate, Lane::paintbox_v);
  PoissonPointSet pts = sample_points(m, t, eps, point_stream);
  FlowBuild fb = build_flow_bridge(pts, u_stream, false);
  return paintbox(fb.bridge, n, v_stream);
}

}
