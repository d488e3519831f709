#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

// Small statistical helpers for the simulation tests: Poisson pmf,
// regularized incomplete gamma (for chi-square p-values) and the two-sample
// Kolmogorov-Smirnov distance.

namespace test_stats {

inline double poisson_pmf(long k, double mean) {
  return std::exp(static_cast<double>(k) * std::log(mean) - mean -
                  std::lgamma(static_cast<double>(k) + 1.0));
}

/// Regularized lower incomplete gamma P(a, x), by series or continued
/// fraction depending on the regime.
inline double gamma_p(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_p domain");
  if (x == 0.0) return 0.0;
  const double log_prefactor = a * std::log(x) - x - std::lgamma(a);
  if (x < a + 1.0) {
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < 500; ++n) {
      term *= x / (a + n);
      sum += term;
      if (std::abs(term) < std::abs(sum) * 1e-15) break;
    }
    return sum * std::exp(log_prefactor);
  }
  // Lentz continued fraction for Q(a, x).
  double b = x + 1.0 - a;
  double c = 1e300;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < 1e-300) d = 1e-300;
    c = b + an / c;
    if (std::abs(c) < 1e-300) c = 1e-300;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-15) break;
  }
  return 1.0 - std::exp(log_prefactor) * h;
}

/// Upper-tail p-value of a chi-square statistic with the given degrees of
/// freedom.
inline double chi_square_pvalue(double statistic, int dof) {
  return 1.0 - gamma_p(0.5 * dof, 0.5 * statistic);
}

/// Chi-square goodness-of-fit p-value of observed integer samples against a
/// Poisson law, binning the tails so every bin expects at least min_expected.
inline double poisson_gof_pvalue(const std::vector<long>& samples, double mean,
                                 double min_expected = 5.0) {
  const double n = static_cast<double>(samples.size());
  long max_value = 0;
  for (long s : samples) max_value = std::max(max_value, s);

  std::vector<double> expected;
  std::vector<double> observed;
  std::vector<long> histogram(static_cast<std::size_t>(max_value) + 1, 0);
  for (long s : samples) ++histogram[static_cast<std::size_t>(s)];

  double expected_acc = 0.0;
  double observed_acc = 0.0;
  double tail_probability = 1.0;
  for (long k = 0; k <= max_value; ++k) {
    const double pk = poisson_pmf(k, mean);
    tail_probability -= pk;
    expected_acc += n * pk;
    observed_acc += static_cast<double>(histogram[static_cast<std::size_t>(k)]);
    if (expected_acc >= min_expected) {
      expected.push_back(expected_acc);
      observed.push_back(observed_acc);
      expected_acc = 0.0;
      observed_acc = 0.0;
    }
  }
  // Remaining tail mass (values above max_value plus any unflushed bin).
  expected_acc += n * std::max(0.0, tail_probability);
  if (!expected.empty() && expected_acc < min_expected) {
    expected.back() += expected_acc;
    observed.back() += observed_acc;
  } else {
    expected.push_back(expected_acc);
    observed.push_back(observed_acc);
  }

  double statistic = 0.0;
  for (std::size_t b = 0; b < expected.size(); ++b) {
    const double diff = observed[b] - expected[b];
    statistic += diff * diff / expected[b];
  }
  const int dof = static_cast<int>(expected.size()) - 1;
  return dof >= 1 ? chi_square_pvalue(statistic, dof) : 1.0;
}

/// Two-sample Kolmogorov-Smirnov distance between empirical distributions.
inline double ks_distance(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  double distance = 0.0;
  std::size_t ia = 0;
  std::size_t ib = 0;
  while (ia < a.size() && ib < b.size()) {
    const double value = std::min(a[ia], b[ib]);
    while (ia < a.size() && a[ia] <= value) ++ia;
    while (ib < b.size() && b[ib] <= value) ++ib;
    distance = std::max(distance,
                        std::abs(static_cast<double>(ia) / na - static_cast<double>(ib) / nb));
  }
  return distance;
}

/// Asymptotic two-sample KS critical value at the given level.
inline double ks_critical(double level, std::size_t na, std::size_t nb) {
  const double c = std::sqrt(-0.5 * std::log(level / 2.0));
  return c * std::sqrt(static_cast<double>(na + nb) /
                       (static_cast<double>(na) * static_cast<double>(nb)));
}

}  // namespace test_stats
