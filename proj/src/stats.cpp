#include "rlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "rlab/errors.hpp"

namespace rlab {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::ks_exact: return "ks_exact";
    case Method::shapiro_wilk: return "shapiro_wilk";
    case Method::welch_t: return "welch_t";
  }
  return "unknown";
}

Method method_from_string(std::string_view name) {
  for (Method m : {Method::ks_exact, Method::shapiro_wilk, Method::welch_t}) {
    if (to_string(m) == name) return m;
  }
  throw InvalidArgument("unknown method '" + std::string(name) + "'");
}

// --- Descriptive -----------------------------------------------------------

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw InvalidArgument("quantile of an empty sample");
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

SampleSummary summarize(std::span<const double> values) {
  if (values.empty()) throw InvalidArgument("summarize needs at least one value");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  SampleSummary s;
  s.n = v.size();
  s.min = v.front();
  s.max = v.back();
  s.q1 = quantile_sorted(v, 0.25);
  s.median = quantile_sorted(v, 0.5);
  s.q3 = quantile_sorted(v, 0.75);
  // Summing in sorted order keeps the result permutation-invariant.
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return s;
}

// --- Kolmogorov-Smirnov ----------------------------------------------------

namespace {

std::vector<double> sorted_copy(std::span<const double> x) {
  std::vector<double> v(x.begin(), x.end());
  std::sort(v.begin(), v.end());
  return v;
}

// max |i m - j n| over the merged order, i.e. D * n * m as an integer.
std::uint64_t ks_scaled_statistic(const std::vector<double>& a, const std::vector<double>& b) {
  const auto n = static_cast<std::int64_t>(a.size());
  const auto m = static_cast<std::int64_t>(b.size());
  std::int64_t i = 0;
  std::int64_t j = 0;
  std::int64_t best = 0;
  while (i < n || j < m) {
    double v;
    if (j >= m || (i < n && a[static_cast<std::size_t>(i)] <= b[static_cast<std::size_t>(j)])) {
      v = a[static_cast<std::size_t>(i)];
    } else {
      v = b[static_cast<std::size_t>(j)];
    }
    while (i < n && a[static_cast<std::size_t>(i)] == v) ++i;
    while (j < m && b[static_cast<std::size_t>(j)] == v) ++j;
    best = std::max(best, std::abs(i * m - j * n));
  }
  return static_cast<std::uint64_t>(best);
}

void require_nonempty(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw InvalidArgument("two-sample test needs non-empty samples");
}

}  // namespace

double ks_statistic(std::span<const double> a, std::span<const double> b) {
  require_nonempty(a, b);
  const auto k = ks_scaled_statistic(sorted_copy(a), sorted_copy(b));
  return static_cast<double>(k) / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

TestVerdict ks_two_sample_exact(std::span<const double> a, std::span<const double> b, double alpha) {
  require_nonempty(a, b);
  const auto sa = sorted_copy(a);
  const auto sb = sorted_copy(b);
  std::vector<double> pooled(sa);
  pooled.insert(pooled.end(), sb.begin(), sb.end());
  std::sort(pooled.begin(), pooled.end());
  if (std::adjacent_find(pooled.begin(), pooled.end()) != pooled.end()) {
    throw TiesError("pooled sample has ties; exact KS p-value unavailable");
  }

  const std::size_t n = sa.size();
  const std::size_t m = sb.size();
  const std::uint64_t k = ks_scaled_statistic(sa, sb);
  const auto outside = [&](std::size_t i, std::size_t j) {
    const auto d = static_cast<std::int64_t>(i * m) - static_cast<std::int64_t>(j * n);
    return static_cast<std::uint64_t>(std::abs(d)) >= k;
  };

  // Random interleaving as a Markov chain on the lattice: from (i, j) the next
  // pooled element comes from a with probability (n - i) / (n - i + m - j).
  // inside[j] holds the probability of sitting at (i, j) without having
  // reached the boundary; boundary arrivals accumulate into p.
  double p = 0;
  std::vector<double> inside(m + 1, 0.0);
  if (outside(0, 0)) {
    p = 1;
  } else {
    inside[0] = 1;
    for (std::size_t i = 0; i <= n; ++i) {
      std::vector<double> next(m + 1, 0.0);
      for (std::size_t j = 0; j <= m; ++j) {
        const double mass = inside[j];
        if (mass == 0) continue;
        const double left = static_cast<double>((n - i) + (m - j));
        if (left == 0) continue;
        if (i < n) {
          const double q = mass * static_cast<double>(n - i) / left;
          if (outside(i + 1, j)) p += q; else next[j] += q;
        }
        if (j < m) {
          const double q = mass * static_cast<double>(m - j) / left;
          if (outside(i, j + 1)) p += q; else inside[j + 1] += q;
        }
      }
      inside.swap(next);
    }
  }
  p = std::clamp(p, 0.0, 1.0);
  const double d = static_cast<double>(k) / (static_cast<double>(n) * static_cast<double>(m));
  return {d, p, p < alpha, Method::ks_exact, false, std::nullopt};
}

double kolmogorov_survival(double lambda) {
  if (lambda <= 0) return 1.0;
  double p;
  if (lambda < 1.18) {
    // Jacobi-theta form of the CDF converges fast for small lambda.
    const double y = std::numbers::pi * std::numbers::pi / (8 * lambda * lambda);
    double sum = 0;
    for (int k = 1; k <= 50; k += 2) sum += std::exp(-static_cast<double>(k * k) * y);
    p = 1.0 - std::sqrt(2 * std::numbers::pi) / lambda * sum;
  } else {
    double sum = 0;
    for (int k = 1; k <= 100; ++k) {
      const double term = std::exp(-2.0 * k * k * lambda * lambda);
      sum += (k % 2 ? term : -term);
      if (term < 1e-300) break;
    }
    p = 2 * sum;
  }
  return std::clamp(p, 0.0, 1.0);
}

TestVerdict ks_two_sample_asymptotic(std::span<const double> a, std::span<const double> b, double alpha) {
  const double d = ks_statistic(a, b);
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double p = kolmogorov_survival(std::sqrt(na * nb / (na + nb)) * d);
  return {d, p, p < alpha, Method::ks_exact, true, std::nullopt};
}

TestVerdict ks_two_sample(std::span<const double> a, std::span<const double> b, double alpha) {
  try {
    return ks_two_sample_exact(a, b, alpha);
  } catch (const TiesError&) {
    return ks_two_sample_asymptotic(a, b, alpha);
  }
}

// --- Shapiro-Wilk (AS R94) -------------------------------------------------

namespace {

double poly(const double* c, int nord, double x) {
  double result = c[0];
  if (nord > 1) {
    double p = x * c[nord - 1];
    for (int j = nord - 2; j > 0; --j) p = (p + c[j]) * x;
    result += p;
  }
  return result;
}

}  // namespace

TestVerdict shapiro_wilk(std::span<const double> values, double alpha) {
  const std::size_t n = values.size();
  if (n < kShapiroWilkMinN || n > kShapiroWilkMaxN) {
    throw InvalidArgument("shapiro_wilk needs 3 <= n <= 50, got " + std::to_string(n));
  }
  const auto x = sorted_copy(values);
  const double range = x.back() - x.front();
  if (!(range > 0) || range < 1e-19 * std::max(1.0, std::abs(x.front()))) {
    throw DegenerateSample("shapiro_wilk: all values are equal");
  }

  static constexpr double g[2] = {-2.273, 0.459};
  static constexpr double c1[6] = {0.0, 0.221157, -0.147981, -2.07119, 4.434685, -2.706056};
  static constexpr double c2[6] = {0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633};
  static constexpr double c3[4] = {0.544, -0.39978, 0.025054, -6.714e-4};
  static constexpr double c4[4] = {1.3822, -0.77857, 0.062767, -0.0020322};
  static constexpr double c5[4] = {-1.5861, -0.31082, -0.083751, 0.0038915};
  static constexpr double c6[3] = {-0.4803, -0.082676, 0.0030302};

  const std::size_t nn2 = n / 2;
  const double an = static_cast<double>(n);
  std::vector<double> a(nn2 + 1, 0.0);  // 1-based coefficients

  if (n == 3) {
    a[1] = std::sqrt(0.5);
  } else {
    const double an25 = an + 0.25;
    double summ2 = 0;
    for (std::size_t i = 1; i <= nn2; ++i) {
      a[i] = normal_quantile((static_cast<double>(i) - 0.375) / an25);
      summ2 += a[i] * a[i];
    }
    summ2 *= 2;
    const double ssumm2 = std::sqrt(summ2);
    const double rsn = 1 / std::sqrt(an);
    const double a1 = poly(c1, 6, rsn) - a[1] / ssumm2;
    std::size_t i1;
    double fac;
    if (n > 5) {
      i1 = 3;
      const double a2 = -a[2] / ssumm2 + poly(c2, 6, rsn);
      fac = std::sqrt((summ2 - 2 * (a[1] * a[1]) - 2 * (a[2] * a[2])) / (1 - 2 * (a1 * a1) - 2 * (a2 * a2)));
      a[2] = a2;
    } else {
      i1 = 2;
      fac = std::sqrt((summ2 - 2 * (a[1] * a[1])) / (1 - 2 * (a1 * a1)));
    }
    a[1] = a1;
    for (std::size_t i = i1; i <= nn2; ++i) a[i] /= -fac;
  }

  // Coefficient attached to order statistic i (0-based): antisymmetric.
  auto coef = [&](std::size_t i) -> double {
    const std::size_t j = n - 1 - i;
    if (i == j) return 0.0;
    return i < j ? -a[1 + i] : a[1 + j];
  };

  double sa = 0;
  double sx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sa += coef(i);
    sx += x[i] / range;
  }
  sa /= an;
  sx /= an;
  double ssa = 0;
  double ssx = 0;
  double sax = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double asa = coef(i) - sa;
    const double xsx = x[i] / range - sx;
    ssa += asa * asa;
    ssx += xsx * xsx;
    sax += asa * xsx;
  }
  // w1 = 1 - W, computed to limit rounding when W is near 1.
  const double ssassx = std::sqrt(ssa * ssx);
  const double w1 = (ssassx - sax) * (ssassx + sax) / (ssa * ssx);
  const double w = 1 - w1;

  double pw;
  if (n == 3) {
    constexpr double pi6 = 6 / std::numbers::pi;
    constexpr double stqr = std::numbers::pi / 3;
    pw = std::max(0.0, pi6 * (std::asin(std::sqrt(w)) - stqr));
  } else {
    double y = std::log(w1);
    const double xx = std::log(an);
    double m;
    double s;
    bool done = false;
    pw = 1;
    if (n <= 11) {
      const double gamma = poly(g, 2, an);
      if (y >= gamma) {
        pw = 1e-99;
        done = true;
      } else {
        y = -std::log(gamma - y);
        m = poly(c3, 4, an);
        s = std::exp(poly(c4, 4, an));
      }
    } else {
      m = poly(c5, 4, xx);
      s = std::exp(poly(c6, 3, xx));
    }
    if (!done) pw = 1 - normal_cdf((y - m) / s);
  }
  pw = std::clamp(pw, 0.0, 1.0);
  return {w, pw, pw < alpha, Method::shapiro_wilk, false, std::nullopt};
}

// --- Welch -----------------------------------------------------------------

TestVerdict welch_t(std::span<const double> a, std::span<const double> b, double alpha) {
  if (a.size() < 2 || b.size() < 2) throw InvalidArgument("welch_t needs at least two values per sample");
  auto moments = [](std::span<const double> v) {
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double ss = 0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::pair{mean, ss / static_cast<double>(v.size() - 1)};
  };
  const auto [ma, va] = moments(a);
  const auto [mb, vb] = moments(b);
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double sa = va / na;
  const double sb = vb / nb;
  if (sa + sb <= 0) throw DegenerateSample("welch_t: both samples have zero variance");
  const double t = (ma - mb) / std::sqrt(sa + sb);
  const double df = (sa + sb) * (sa + sb) / (sa * sa / (na - 1) + sb * sb / (nb - 1));
  const double p = student_t_two_sided(t, df);
  return {t, p, p < alpha, Method::welch_t, false, df};
}

// --- Special functions -----------------------------------------------------

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double p) {
  if (!(p > 0 && p < 1)) throw InvalidArgument("normal_quantile needs 0 < p < 1");
  const double q = p - 0.5;
  double r;
  double val;
  if (std::abs(q) <= 0.425) {
    r = 0.180625 - q * q;
    return q *
           (((((((r * 2509.0809287301226727 + 33430.575583588128105) * r + 67265.770927008700853) * r +
                45921.953931549871457) * r + 13731.693765509461125) * r + 1971.5909503065514427) * r +
             133.14166789178437745) * r + 3.387132872796366608) /
           (((((((r * 5226.495278852545925 + 28729.085735721942674) * r + 39307.89580009271061) * r +
                21213.794301586595867) * r + 5394.1960214247511077) * r + 687.1870074920579083) * r +
             42.313330701600911252) * r + 1.0);
  }
  r = q < 0 ? p : 1 - p;
  r = std::sqrt(-std::log(r));
  if (r <= 5) {
    r -= 1.6;
    val = (((((((r * 7.7454501427834140764e-4 + 0.0227238449892691845833) * r + 0.24178072517745061177) * r +
               1.27045825245236838258) * r + 3.64784832476320460504) * r + 5.7694972214606914055) * r +
            4.6303378461565452959) * r + 1.42343711074968357734) /
          (((((((r * 1.05075007164441684324e-9 + 5.475938084995344946e-4) * r + 0.0151986665636164571966) * r +
               0.14810397642748007459) * r + 0.68976733498510000455) * r + 1.6763848301838038494) * r +
            2.05319162663775882187) * r + 1.0);
  } else {
    r -= 5;
    val = (((((((r * 2.01033439929228813265e-7 + 2.71155556874348757815e-5) * r + 0.0012426609473880784386) * r +
               0.026532189526576123093) * r + 0.29656057182850489123) * r + 1.7848265399172913358) * r +
            5.4637849111641143699) * r + 6.6579046435011037772) /
          (((((((r * 2.04426310338993978564e-15 + 1.4215117583164458887e-7) * r + 1.8463183175100546818e-5) * r +
               7.868691311456132591e-4) * r + 0.0148753612908506148525) * r + 0.13692988092273580531) * r +
            0.59983220655588793769) * r + 1.0);
  }
  return q < 0 ? -val : val;
}

namespace {

// Continued fraction for the incomplete beta (modified Lentz).
double beta_cf(double a, double b, double x) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-16;
  const double qab = a + b;
  const double qap = a + 1;
  const double qam = a - 1;
  double c = 1;
  double d = 1 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1 / d;
  double h = d;
  for (int m = 1; m <= 10000; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1) < eps) break;
  }
  return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0) || !(b > 0)) throw InvalidArgument("incomplete_beta needs a, b > 0");
  if (x <= 0) return 0;
  if (x >= 1) return 1;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1) / (a + b + 2)) return front * beta_cf(a, b, x) / a;
  return 1 - front * beta_cf(b, a, 1 - x) / b;
}

double incomplete_gamma_q(double a, double x) {
  if (!(a > 0)) throw InvalidArgument("incomplete_gamma_q needs a > 0");
  if (x <= 0) return 1;
  const double log_front = -x + a * std::log(x) - std::lgamma(a);
  if (x < a + 1) {
    // Series for P, return 1 - P.
    double ap = a;
    double del = 1 / a;
    double sum = del;
    for (int n = 0; n < 10000; ++n) {
      ap += 1;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * 1e-16) break;
    }
    return std::clamp(1 - sum * std::exp(log_front), 0.0, 1.0);
  }
  constexpr double tiny = 1e-300;
  double b = x + 1 - a;
  double c = 1 / tiny;
  double d = 1 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -i * (i - a);
    b += 2;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1) < 1e-16) break;
  }
  return std::clamp(std::exp(log_front) * h, 0.0, 1.0);
}

double student_t_two_sided(double t, double df) {
  if (!(df > 0)) throw InvalidArgument("student_t_two_sided needs df > 0");
  if (!std::isfinite(t)) return 0;
  return std::clamp(incomplete_beta(df / 2, 0.5, df / (df + t * t)), 0.0, 1.0);
}

double chi_square_sf(double x, double k) { return incomplete_gamma_q(k / 2, x / 2); }

}  // namespace rlab
