#include "lcoal/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include <boost/math/special_functions/gamma.hpp>

#include "lcoal/errors.hpp"

namespace lcoal {

double chi_square_survival(double stat, int df) {
  if (df < 1) throw DomainError("chi_square_survival: df must be >= 1");
  if (!(stat >= 0)) throw DomainError("chi_square_survival: stat must be >= 0");
  return boost::math::gamma_q(0.5 * df, 0.5 * stat);
}

double kolmogorov_survival(double s) {
  if (s <= 0) return 1.0;
  if (s > 10) return 0.0;
  double q = 0.0;
  double sign = 1.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * s * s);
    q += sign * term;
    sign = -sign;
    if (term < 1e-18) break;
  }
  q *= 2.0;
  return std::clamp(q, 0.0, 1.0);
}

namespace {

KsResult ks_from_uniformized(std::vector<double>& probs) {
  std::sort(probs.begin(), probs.end());
  const std::size_t n = probs.size();
  if (n == 0) throw DomainError("ks test: empty sample");
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double cdf = probs[i];
    const double above = static_cast<double>(i + 1) / n - cdf;
    const double below = cdf - static_cast<double>(i) / n;
    d = std::max({d, above, below});
  }
  const double rn = std::sqrt(static_cast<double>(n));
  const double arg = (rn + 0.12 + 0.11 / rn) * d;
  return {d, kolmogorov_survival(arg), n};
}

}  // namespace

KsResult ks_test_uniform01(std::vector<double> sample) {
  return ks_from_uniformized(sample);
}

KsResult ks_test_exponential(std::vector<double> sample, double rate) {
  if (!(rate > 0)) throw DomainError("ks_test_exponential: rate must be > 0");
  for (double& x : sample) x = -std::expm1(-rate * x);
  return ks_from_uniformized(sample);
}

Chi2Result chi_square_gof(const std::vector<long long>& observed,
                          const std::vector<double>& expected_probs) {
  if (observed.size() != expected_probs.size() || observed.empty())
    throw DomainError("chi_square_gof: size mismatch or empty");
  long long total = 0;
  for (long long c : observed) total += c;
  if (total <= 0) throw DomainError("chi_square_gof: no observations");
  double stat = 0.0;
  int df = -1;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double e = expected_probs[i] * static_cast<double>(total);
    if (expected_probs[i] <= 0.0) {
      if (observed[i] != 0)
        throw DomainError("chi_square_gof: observation in zero-probability cell");
      continue;  // cell carries no information and no degree of freedom
    }
    const double diff = static_cast<double>(observed[i]) - e;
    stat += diff * diff / e;
    ++df;
  }
  if (df < 1) throw DomainError("chi_square_gof: fewer than two live cells");
  return {stat, chi_square_survival(stat, df), df};
}

MeanSe mean_se(const std::vector<double>& values) {
  const std::size_t n = values.size();
  if (n == 0) throw DomainError("mean_se: empty sample");
  CompensatedSum s;
  for (double v : values) s.add(v);
  const double mean = s.value() / static_cast<double>(n);
  if (n == 1) return {mean, 0.0, 1};
  CompensatedSum sq;
  for (double v : values) sq.add((v - mean) * (v - mean));
  const double var = sq.value() / static_cast<double>(n - 1);
  return {mean, std::sqrt(var / static_cast<double>(n)), n};
}

double log_binomial(int n, int k) {
  if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}
