#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "lcoal/bridge.hpp"
#include "lcoal/errors.hpp"
#include "lcoal/rng.hpp"

using namespace lcoal;

TEST_CASE("single-factor bridge: evaluate, inverse, locate") {
  FiniteBridge b = simple_bridge(0.4, 0.5);
  CHECK(b.slope() == doctest::Approx(0.6));
  REQUIRE(b.jump_list().size() == 1);
  CHECK(b.jump_list()[0].u == doctest::Approx(0.5));
  CHECK(b.jump_list()[0].s == doctest::Approx(0.4));
  REQUIRE(b.holes().size() == 1);
  CHECK(b.holes()[0].lo == doctest::Approx(0.3));
  CHECK(b.holes()[0].hi == doctest::Approx(0.7));

  CHECK(b.evaluate(0.0) == doctest::Approx(0.0));
  CHECK(b.evaluate(0.3) == doctest::Approx(0.18));
  CHECK(b.evaluate(0.5) == doctest::Approx(0.7));  // right-continuous at u
  CHECK(b.evaluate(1.0) == doctest::Approx(1.0));

  CHECK(b.inverse(0.18) == doctest::Approx(0.3));
  CHECK(b.inverse(0.5) == doctest::Approx(0.5));  // inside the hole
  CHECK(b.inverse(0.7) == doctest::Approx(0.5));
  CHECK(b.inverse(1.0) == doctest::Approx(1.0));

  CHECK(b.locate(0.2).in_hole == false);
  CHECK(b.locate(0.2).index == 0);
  CHECK(b.locate(0.3).in_hole == true);  // holes are half-open [lo, hi)
  CHECK(b.locate(0.5).in_hole == true);
  CHECK(b.locate(0.5).index == 0);
  CHECK(b.locate(0.7).in_hole == false);
  CHECK(b.locate(0.7).index == 1);

  FiniteBridge id;
  CHECK(id.slope() == 1.0);
  CHECK(id.jump_list().empty());
  CHECK(id.evaluate(0.37) == doctest::Approx(0.37));
  CHECK(dust(id) == 1.0);

  CHECK_THROWS_AS(simple_bridge(0.0, 0.5), DomainError);
  CHECK_THROWS_AS(simple_bridge(1.0, 0.5), DomainError);
}

TEST_CASE("make validates its structural invariants") {
  // unordered input is sorted, not rejected
  FiniteBridge sorted = FiniteBridge::make(0.5, {{0.6, 0.25}, {0.2, 0.25}});
  CHECK(sorted.jump_list()[0].u == 0.2);
  CHECK_THROWS_AS(FiniteBridge::make(0.5, {{0.2, 0.25}, {0.2, 0.25}}),
                  DomainError);  // coincident locations
  CHECK_THROWS_AS(FiniteBridge::make(0.5, {{0.2, 0.0}}), DomainError);
  CHECK_THROWS_AS(FiniteBridge::make(0.5, {{0.2, 0.4}}), DomainError);
  CHECK_THROWS_AS(FiniteBridge::make(0.5, {{-0.1, 0.5}}), DomainError);
  FiniteBridge ok = FiniteBridge::make(0.5, {{0.2, 0.3}, {0.6, 0.2}});
  CHECK(ok.holes().size() == 2);
}

TEST_CASE("composition in function order") {
  // result(y) = second(first(y)); slope multiplies, first's jump carries
  // second's slope, second's jump pulls back through first's inverse.
  FiniteBridge first = simple_bridge(0.4, 0.5);
  FiniteBridge second = simple_bridge(0.5, 0.2);
  FiniteBridge c = compose(first, second);
  CHECK(c.slope() == doctest::Approx(0.3));
  REQUIRE(c.jump_list().size() == 2);
  CHECK(c.jump_list()[0].u == doctest::Approx(1.0 / 3.0));
  CHECK(c.jump_list()[0].s == doctest::Approx(0.5));
  CHECK(c.jump_list()[1].u == doctest::Approx(0.5));
  CHECK(c.jump_list()[1].s == doctest::Approx(0.2));
  CHECK(c.evaluate(0.4) == doctest::Approx(0.62));

  // pointwise agreement with the definition
  for (double y : {0.0, 0.1, 0.25, 1.0 / 3.0, 0.45, 0.5, 0.8, 1.0})
    CHECK(c.evaluate(y) == doctest::Approx(second.evaluate(first.evaluate(y))));

  // identity is neutral on both sides
  FiniteBridge id;
  CHECK(compose(id, first).jump_list().size() == 1);
  CHECK(compose(first, id).slope() == doctest::Approx(first.slope()));
}

TEST_CASE("tracked composition, case A births a hole of size x") {
  FiniteBridge first = simple_bridge(0.4, 0.5);
  TrackedComposition t = compose_tracked(first, 0.2, 0.1);
  CHECK(t.added_hole);
  CHECK(t.absorbed_index == -1);
  CHECK(t.new_hole_index == 0);
  CHECK(t.new_hole.lo == doctest::Approx(0.08));
  CHECK(t.new_hole.hi == doctest::Approx(0.28));
  CHECK(t.new_hole.size() == doctest::Approx(0.2));
  REQUIRE(t.child_of.size() == 1);
  CHECK(t.child_of[0] == 1);
  REQUIRE(t.result.holes().size() == 2);
  // the old hole's child shrank by exactly (1-x)
  CHECK(t.result.holes()[1].size() == doctest::Approx(0.8 * 0.4));
  CHECK(t.result.slope() == doctest::Approx(0.8 * 0.6));
}

TEST_CASE("tracked composition, case B absorbs into the hit hole") {
  FiniteBridge first = simple_bridge(0.4, 0.5);
  TrackedComposition t = compose_tracked(first, 0.2, 0.4);
  CHECK(!t.added_hole);
  CHECK(t.absorbed_index == 0);
  CHECK(t.new_hole_index == -1);
  REQUIRE(t.result.holes().size() == 1);
  CHECK(t.result.holes()[0].size() == doctest::Approx(0.8 * 0.4 + 0.2));
  REQUIRE(t.child_of.size() == 1);
  CHECK(t.child_of[0] == 0);
  CHECK(t.result.slope() == doctest::Approx(0.8 * 0.6));
}

TEST_CASE("tracked composition rejects boundary hits") {
  FiniteBridge first = simple_bridge(0.4, 0.5);
  CHECK_THROWS_AS(compose_tracked(first, 0.2, 0.3), BoundaryCollision);
  CHECK_THROWS_AS(compose_tracked(first, 0.2, 0.7), BoundaryCollision);
}

TEST_CASE("paintbox splits mass between holes and dust") {
  FiniteBridge b = simple_bridge(0.4, 0.5);
  Stream rng(99, 0, Lane::paintbox_v);
  const int n = 2000;
  Partition p = paintbox(b, n, rng);
  CHECK(p.n() == n);
  int largest = 0, nonsingle = 0;
  for (const auto& blk : p.blocks()) {
    largest = std::max(largest, int(blk.size()));
    if (blk.size() > 1) ++nonsingle;
  }
  // one hole of size 0.4: the single non-singleton block is Binomial(n, 0.4)
  CHECK(nonsingle == 1);
  const double sd = std::sqrt(n * 0.4 * 0.6);
  CHECK(std::abs(largest - 800.0) < 4 * sd);
  // dust points are almost surely distinct, so everything else is singleton
  CHECK(p.block_count() == n - largest + 1);
}

TEST_CASE("dust remap stacks dust first, then holes in order") {
  FiniteBridge b = simple_bridge(0.4, 0.5);  // dust 0.6, hole [0.3, 0.7)
  CHECK(dust_remap(b, 0.2) == doctest::Approx(0.2));
  CHECK(dust_remap(b, 0.8) == doctest::Approx(0.4));
  CHECK(dust_remap(b, 0.85) == doctest::Approx(0.45));
  CHECK(dust_remap(b, 0.5) == doctest::Approx(0.8));
  // the defining property: f(v) < slope iff v avoids every hole
  Stream rng(7, 0, Lane::misc);
  for (int i = 0; i < 1000; ++i) {
    double v = rng.next_double();
    bool in_hole = b.locate(v).in_hole;
    CHECK((dust_remap(b, v) < b.slope()) == !in_hole);
  }
}

TEST_CASE("serialization round-trips bitwise") {
  FiniteBridge b = FiniteBridge::make(
      0.123456789012345678, {{0.1, 0.5}, {0.7, 1.0 - 0.5 - 0.123456789012345678}});
  std::string text = serialize_bridge(b);
  FiniteBridge r = parse_bridge(text);
  CHECK(r.slope() == b.slope());
  REQUIRE(r.jump_list().size() == b.jump_list().size());
  for (std::size_t i = 0; i < b.jump_list().size(); ++i) {
    CHECK(r.jump_list()[i].u == b.jump_list()[i].u);
    CHECK(r.jump_list()[i].s == b.jump_list()[i].s);
  }
  CHECK(serialize_bridge(r) == text);

  CHECK(serialize_bridge(FiniteBridge()).substr(0, 1) == "1");
  CHECK_THROWS_AS(parse_bridge("not a bridge"), DomainError);
}

TEST_CASE("svg rendering is deterministic") {
  FiniteBridge b = simple_bridge(0.4, 0.5);
  std::string s1 = render_svg(b);
  std::string s2 = render_svg(b);
  CHECK(s1 == s2);
  CHECK(s1.find("<svg") != std::string::npos);
  CHECK(s1.find("</svg>") != std::string::npos);
  CHECK(s1 != render_svg(FiniteBridge()));
}
