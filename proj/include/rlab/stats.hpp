#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

namespace rlab {

inline constexpr double kDefaultAlpha = 0.05;

/// Seven descriptive statistics of a metric sample, in table column order.
struct SampleSummary {
  std::size_t n = 0;
  double min = 0;
  double q1 = 0;
  double median = 0;
  double q3 = 0;
  double max = 0;
  double mean = 0;
  double sd = 0;

  friend bool operator==(const SampleSummary&, const SampleSummary&) = default;
};

enum class Method { ks_exact, shapiro_wilk, welch_t };

std::string_view to_string(Method m);
Method method_from_string(std::string_view name);

struct TestVerdict {
  double statistic = 0;
  double p_value = 1;
  bool significant = false;  // p_value < alpha
  Method method = Method::ks_exact;
  /// KS only: the p-value comes from the asymptotic Kolmogorov distribution
  /// because the pooled sample had ties.
  bool approximate = false;
  /// Welch only: Welch-Satterthwaite degrees of freedom.
  std::optional<double> df;

  friend bool operator==(const TestVerdict&, const TestVerdict&) = default;
};

/// Type-7 quantile of an ascending sample: linear interpolation at 1-based
/// position 1 + (n - 1) p.
double quantile_sorted(std::span<const double> sorted, double p);

/// Throws InvalidArgument on empty input. sd uses the n - 1 divisor and is 0
/// for a single value.
SampleSummary summarize(std::span<const double> values);

/// sup |F_a - F_b| over the pooled sample; ties are handled.
double ks_statistic(std::span<const double> a, std::span<const double> b);

/// Two-sided two-sample Kolmogorov-Smirnov test with the exact permutation
/// p-value P(D >= d_obs) under uniformly random interleaving, computed on the
/// (|a|+1) x (|b|+1) lattice. Throws TiesError when the pooled sample has
/// ties and InvalidArgument when either sample is empty.
TestVerdict ks_two_sample_exact(std::span<const double> a, std::span<const double> b,
                                double alpha = kDefaultAlpha);

/// Same statistic with the limiting Kolmogorov distribution; accepts ties.
/// The verdict is flagged approximate.
TestVerdict ks_two_sample_asymptotic(std::span<const double> a, std::span<const double> b,
                                     double alpha = kDefaultAlpha);

/// Exact test when possible, asymptotic fallback on ties.
TestVerdict ks_two_sample(std::span<const double> a, std::span<const double> b, double alpha = kDefaultAlpha);

/// Kolmogorov survival function Q(lambda) = 2 sum (-1)^(k-1) exp(-2 k^2 lambda^2).
double kolmogorov_survival(double lambda);

inline constexpr std::size_t kShapiroWilkMinN = 3;
inline constexpr std::size_t kShapiroWilkMaxN = 50;

/// Shapiro-Wilk W and p-value by Royston's AS R94 approximation.
/// 3 <= n <= 50; constant samples throw DegenerateSample.
TestVerdict shapiro_wilk(std::span<const double> values, double alpha = kDefaultAlpha);

/// Welch's unequal-variance t-test, two-tailed. Both samples need at least
/// two values; DegenerateSample when both variances are zero.
TestVerdict welch_t(std::span<const double> a, std::span<const double> b, double alpha = kDefaultAlpha);

// Special functions.

double normal_cdf(double x);
/// Inverse standard normal CDF (AS 241), 0 < p < 1.
double normal_quantile(double p);
/// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);
/// Regularized upper incomplete gamma Q(a, x).
double incomplete_gamma_q(double a, double x);
/// Two-sided Student-t tail probability P(|T| >= |t|).
double student_t_two_sided(double t, double df);
/// Upper tail of the chi-square distribution with k degrees of freedom.
double chi_square_sf(double x, double k);

}  // namespace rlab
