#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace lcoal {

// Neumaier-compensated accumulator. Used wherever sums must stay consistent
// to 1e-12 over long chains (hole sizes, frequency summaries).
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Upper-tail probability of the chi-square distribution with df degrees of
// freedom, P[X >= stat].
double chi_square_survival(double stat, int df);

// Kolmogorov asymptotic survival Q(s) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 s^2).
double kolmogorov_survival(double s);

struct KsResult {
  double statistic;  // sup-norm distance D_n
  double p_value;
  std::size_t n;
};

// One-sample KS tests. The p-value uses the finite-n adjusted argument
// (sqrt(n) + 0.12 + 0.11/sqrt(n)) * D_n in the asymptotic survival.
KsResult ks_test_uniform01(std::vector<double> sample);
KsResult ks_test_exponential(std::vector<double> sample, double rate);

struct Chi2Result {
  double statistic;
  double p_value;
  int df;
};

// Goodness of fit of observed counts against expected cell probabilities;
// df = cells - 1. Cells with zero expected probability must have zero counts.
Chi2Result chi_square_gof(const std::vector<long long>& observed,
                          const std::vector<double>& expected_probs);

struct MeanSe {
  double mean;
  double se;  // sample standard deviation / sqrt(n)
  std::size_t n;
};

// Reduces per-replicate values in index order (the order is part of the
// byte-exact aggregation contract).
MeanSe mean_se(const std::vector<double>& values);

// log of C(n, k) via lgamma; plenty for the block counts used here.
double log_binomial(int n, int k);

// FNV-1a 64-bit hash; used for config fingerprints in report headers.
std::uint64_t fnv1a64(std::string_view text);

// Shortest decimal that round-trips is overkill here; the external contract
// is 17 significant digits everywhere.
std::string format_real(double x);

}
