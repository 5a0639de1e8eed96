#pragma once

#include <string>
#include <utility>
#include <vector>

#include "lcoal/quadrature.hpp"
#include "lcoal/rng.hpp"

namespace lcoal {

enum class MeasureKind { beta_family, atoms, piecewise_density };

// Finite driving measure on [0,1] with no mass at 1. Immutable after
// construction; all operations on it are pure.
//
// Representations:
//  - beta_family(alpha), alpha in (0,2): the Beta(2-alpha, alpha) probability
//    measure, density x^(1-alpha) (1-x)^(alpha-1) / B(2-alpha, alpha).
//    alpha = 2 is accepted and returns the unit atom at 0 instead (the
//    natural limiting case; the Beta parameters degenerate there).
//  - atoms: point masses at locations in [0,1); the location-0 atom is the
//    pure pairwise-merger case.
//  - piecewise_density: polynomial density pieces between breakpoints
//    0 <= b_0 < ... < b_k <= 1; coefficient vectors are in increasing power.
class MeasureSpec {
 public:
  static MeasureSpec beta_family(double alpha);
  static MeasureSpec atoms(std::vector<std::pair<double, double>> loc_mass);
  static MeasureSpec piecewise_density(std::vector<double> breakpoints,
                                       std::vector<std::vector<double>> coeffs);

  // Presets.
  static MeasureSpec kingman();    // unit atom at 0
  static MeasureSpec uniform();    // Lebesgue on [0,1] = beta_family(1)
  static MeasureSpec x_squared();  // density x^2 on [0,1]

  MeasureKind kind() const { return kind_; }
  double total_mass() const { return total_mass_; }

  // beta_family only.
  double alpha() const;
  // atoms only: sorted by location, duplicates merged.
  const std::vector<std::pair<double, double>>& atom_list() const;
  // piecewise_density only.
  const std::vector<double>& breakpoints() const;
  const std::vector<std::vector<double>>& coefficients() const;

  // Density value at x (quadrature kinds only; atoms have no density).
  // The second argument must equal 1-x; it preserves accuracy near 1.
  double density(double x, double one_minus_x) const;

  // Infimum of the support and the leading power of the density there
  // (beta: 1-alpha; piecewise: first nonzero coefficient power). Drives the
  // closed-form finiteness predicates.
  double support_min() const;

  // Canonical one-line description; stable across runs, used in config
  // echoes and hashes.
  std::string describe() const;

 private:
  MeasureSpec() = default;

  MeasureKind kind_ = MeasureKind::atoms;
  double alpha_ = 0.0;
  std::vector<std::pair<double, double>> atoms_;
  std::vector<double> breaks_;
  std::vector<std::vector<double>> coeffs_;
  double total_mass_ = 0.0;

  friend struct MeasureAccess;
};

// Nonnegative extended real with the divergence evidence that produced it.
struct ExtendedReal {
  double value = 0.0;  // finite value, or the partial sum when infinite
  bool infinite = false;
  DyadicScan diagnostics;  // dyadic tail blocks (empty for exact set kinds)
};

struct MuStarDiagnostics {
  std::vector<double> partial_sums;  // partial sum through i, i = 2..i_max
  double r_imax = 0.0;               // inner sum at i_max
  double growth_exponent = 0.0;      // fitted p: R_i ~ C i^p over the top octave
  double tail_estimate = 0.0;        // power-law tail beyond i_max
  bool extrapolation_stable = false; // halving i_max moves the total < 1e-3 rel
};

struct MuStarResult {
  double value = 0.0;  // partial + tail when finite; partial sum when infinite
  bool infinite = false;
  MuStarDiagnostics diagnostics;
};

enum class Regime { A, B, C, D };
char regime_letter(Regime r);

struct Behaviour {
  Regime label;
  bool mu_minus1_finite;
  bool mu_minus2_finite;
  bool mu_star_finite;
};

// n-th moment of the measure, n >= -2 (only the -1 and -2 negative moments
// are meaningful here). Closed form for beta/atoms; quadrature for densities.
// Divergence verdicts combine the exact exponent test with the dyadic-tail
// diagnostic; a contradiction raises InconclusiveError.
ExtendedReal moment(const MeasureSpec& m, int n, double tol = 1e-10);

// Rate at which a fixed k-subset of i blocks merges:
// int_0^1 x^(k-2) (1-x)^(i-k) Lambda(dx), with 0^0 = 1 at the endpoint,
// so an atom at 0 contributes only for k = 2.
double merger_rate(const MeasureSpec& m, int i, int k);

// log of merger_rate, stable for large i where the rate underflows;
// -infinity for an exactly zero rate.
double log_merger_rate(const MeasureSpec& m, int i, int k);

// The block-counting summability functional: sum over i >= 2 of the
// reciprocal of R_i = sum_{k=2..i} (k-1) C(i,k) lambda_{i,k}. Computed via
// the exact prefix recurrence R_{i+1} = R_i + sum_{j<i} c_j with
// c_j = int (1-x)^j Lambda(dx), which is all-positive arithmetic.
MuStarResult mu_star(const MeasureSpec& m, double tol = 1e-10,
                     int i_max = 10000);

// Regime label from the finiteness pattern:
//   A: second negative moment finite;
//   B: second infinite, first finite;
//   C: first infinite and the summability functional infinite;
//   D: summability functional finite.
// Exactly one holds. Verdicts are closed-form, cross-checked numerically;
// disagreement raises InconclusiveError.
Behaviour classify(const MeasureSpec& m);

// nu((eps,1]) with nu(dx) = x^-2 Lambda(dx); finite for every eps > 0.
double nu_tail_mass(const MeasureSpec& m, double eps);

// int_(eps,1] x nu(dx) = int_(eps,1] x^-1 Lambda(dx); the exponent in the
// expected-dust identity E[dust] = exp(-t * this).
double nu_first_moment_tail(const MeasureSpec& m, double eps);

// Inverse-CDF sampler for nu restricted to (lo, hi]; exact for atoms,
// numeric inverse with CDF error <= 1e-9 for density kinds. Build once,
// sample many times.
class NuSampler {
 public:
  NuSampler(const MeasureSpec& m, double lo, double hi);
  double mass() const { return mass_; }
  double sample(Stream& s) const;

 private:
  double inverse_cdf(double target) const;

  MeasureSpec measure_;
  double lo_, hi_;
  double mass_ = 0.0;
  bool discrete_ = false;
  // discrete: locations and cumulative weights
  std::vector<double> disc_x_, disc_cum_;
  // continuous: segment ends and cumulative integrals over segments
  std::vector<double> seg_x_, seg_cum_;
};

// Single draw convenience; constructs a sampler per call, so hot loops
// should hold a NuSampler instead.
double sample_nu_truncated(const MeasureSpec& m, double eps, Stream& s);

}
