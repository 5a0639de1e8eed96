#include <cmath>

#include "doctest.h"
#include "lcoal/quadrature.hpp"

using namespace lcoal;

TEST_CASE("smooth integrals") {
  QuadResult r = integrate([](double x, double) { return x * x; }, 0, 1);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(1.0 / 3.0).epsilon(1e-13));

  QuadResult s = integrate([](double x, double) { return std::sin(x); }, 0, 2);
  CHECK(s.converged);
  CHECK(s.value == doctest::Approx(1.0 - std::cos(2.0)).epsilon(1e-13));
}

TEST_CASE("integrable endpoint singularities") {
  // Interior-node rule plus dyadic refinement handles x^-1/2 at 0.
  QuadResult a =
      integrate([](double x, double) { return 1.0 / std::sqrt(x); }, 0, 1);
  CHECK(a.converged);
  CHECK(a.value == doctest::Approx(2.0).epsilon(1e-9));

  // The 1-x channel keeps accuracy at the right endpoint (refinement stacks
  // toward 0, so this side converges a shade slower than the left).
  QuadResult b = integrate(
      [](double, double omx) { return 1.0 / std::sqrt(omx); }, 0, 1);
  CHECK(b.converged);
  CHECK(b.value == doctest::Approx(2.0).epsilon(1e-8));

  QuadResult c = integrate([](double x, double) { return std::log(x); }, 0, 1);
  CHECK(c.converged);
  CHECK(c.value == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("divergent integral is not certified") {
  QuadResult r = integrate([](double x, double) { return 1.0 / x; }, 0, 1,
                           1e-10, 0.0, 2000);
  CHECK(!r.converged);
}

TEST_CASE("dyadic scan verdicts near zero") {
  auto scan = [](double p) {
    return dyadic_scan_origin(
        [p](double x, double) { return std::pow(x, p); });
  };
  // Block mass over (2^-(j+1), 2^-j] scales like 2^-j(p+1): geometric decay
  // for p > -1, constant for p = -1, growth for p < -1.
  CHECK(scan(-0.5).verdict == DyadicScan::Verdict::convergent);
  CHECK(scan(-1.0).verdict == DyadicScan::Verdict::divergent);
  CHECK(scan(-1.2).verdict == DyadicScan::Verdict::divergent);
  // Decay ratio 2^-0.01 = 0.9931 sits inside the deliberate dead band.
  CHECK(scan(-0.99).verdict == DyadicScan::Verdict::indeterminate);

  DyadicScan zero = dyadic_scan_origin([](double, double) { return 0.0; });
  CHECK(zero.verdict == DyadicScan::Verdict::convergent);
  CHECK(zero.total == 0.0);

  DyadicScan conv = scan(-0.5);
  CHECK(conv.blocks.size() >= 10);
  // total approximates int_0^1 x^-1/2 = 2 (all dyadic blocks)
  CHECK(conv.total == doctest::Approx(2.0).epsilon(1e-6));
}
