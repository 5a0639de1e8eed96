#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "lcoal/partition.hpp"
#include "lcoal/rng.hpp"

namespace lcoal {

struct Jump {
  double u;  // location in [0,1)
  double s;  // size > 0
};

// Half-open interval [lo, hi) on the value axis skipped by the bridge.
struct Hole {
  double lo = 0.0;
  double hi = 0.0;
  double size() const { return hi - lo; }
};

// Nondecreasing right-continuous function on [0,1] with b(1) = 1, stored
// structurally as slope + jump list (never as a sampled curve). The slope is
// the dust mass and also the lower Lipschitz constant. Immutable.
class FiniteBridge {
 public:
  FiniteBridge() = default;  // the identity bridge
  static FiniteBridge identity();
  // Sorts jumps by location, then validates: locations in [0,1) and
  // distinct, sizes > 0, slope + sum of sizes = 1 within 1e-9.
  static FiniteBridge make(double slope, std::vector<Jump> jumps);

  double slope() const { return slope_; }
  const std::vector<Jump>& jump_list() const { return jumps_; }
  // One hole per jump: [b(u-), b(u-) + s), sorted by lo.
  const std::vector<Hole>& holes() const { return holes_; }

  double evaluate(double y) const;
  // Right-continuous inverse inf{z : b(z) > v}; inverse(1) = 1.
  double inverse(double v) const;

  // Structural position of a point on the value axis: inside hole `index`,
  // or in dust with `index` holes entirely below. This is the primitive all
  // identity decisions go through; no float comparisons of inverse values.
  struct Location {
    bool in_hole;
    int index;
  };
  Location locate(double v) const;

 private:
  double slope_ = 1.0;
  std::vector<Jump> jumps_;
  std::vector<double> prefix_{0.0};  // prefix_[i] = sum of sizes before jump i
  std::vector<Hole> holes_;
};

// Single-factor bridge (1-x)y + x 1{u <= y}; x = 0 would be the identity and
// is rejected, as is x = 1.
FiniteBridge simple_bridge(double x, double u);

// Dust mass; equals the slope.
double dust(const FiniteBridge& b);

// Apply `first`, then `second`: result(y) = second(first(y)). Slope
// multiplies. Jumps are computed structurally: each jump of `first` carries
// second's slope times its size; each jump of `second` lands at its
// inf-preimage under `first`. Coincident result locations are merged (a
// measure-zero event, logged to stderr).
FiniteBridge compose(const FiniteBridge& first, const FiniteBridge& second);

// Composition with a single new factor, tracking what happened to each hole.
// Case A: u falls in first's dust, one hole is born, sized exactly x.
// Case B: u falls inside hole `absorbed_index`, which grows to
// (1-x) * size + x; the hole count is unchanged. Every other hole's child
// has size exactly (1-x) times its parent.
struct TrackedComposition {
  FiniteBridge result;
  bool added_hole = false;          // case A
  std::vector<int> child_of;        // hole i of first -> hole index in result
  int new_hole_index = -1;          // case A only
  Hole new_hole;                    // case A only
  int absorbed_index = -1;          // case B only
};

// Rejects u that lands exactly on a hole boundary of `first` (or exactly on
// an existing jump location); the caller resamples u.
struct BoundaryCollision : std::runtime_error {
  using std::runtime_error::runtime_error;
};
TrackedComposition compose_tracked(const FiniteBridge& first, double x,
                                   double u);

// Draw V_1..V_n uniform; i ~ j iff both V fall in the same hole (dust
// points give singletons almost surely; bitwise-equal dust draws share a
// block, matching the level-set definition).
Partition paintbox(const FiniteBridge& b, int n, Stream& rng);

// Measure-preserving remap that stacks the dust onto [0, dust(b)) and the
// holes, in order, after it. f(v) < dust(b) iff v lies in no hole.
double dust_remap(const FiniteBridge& b, double v);

// "slope;u1:s1,u2:s2,..." with 17 significant digits; round-trips exactly.
std::string serialize_bridge(const FiniteBridge& b);
FiniteBridge parse_bridge(const std::string& text);

// Deterministic drawing of the bridge graph with holes shaded on the value
// axis; byte-identical for identical inputs.
std::string render_svg(const FiniteBridge& b);

}
