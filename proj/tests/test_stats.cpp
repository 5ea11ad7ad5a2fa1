#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "rlab/errors.hpp"
#include "rlab/stats.hpp"

using namespace rlab;
using V = std::vector<double>;

// Reference values marked "scipy" were computed with scipy.stats 1.x
// (ks_2samp method="exact", shapiro, ttest_ind equal_var=False).

TEST_CASE("summaries") {
  SampleSummary s = summarize(V{5});
  CHECK(s.n == 1);
  CHECK(s.min == 5);
  CHECK(s.q1 == 5);
  CHECK(s.median == 5);
  CHECK(s.q3 == 5);
  CHECK(s.max == 5);
  CHECK(s.mean == 5);
  CHECK(s.sd == 0);

  s = summarize(V{5, 1, 4, 2, 3});
  CHECK(s.q1 == 2);
  CHECK(s.median == 3);
  CHECK(s.q3 == 4);
  CHECK(s.mean == 3);
  CHECK(s.sd == doctest::Approx(std::sqrt(2.5)).epsilon(1e-15));

  s = summarize(V{4, 3, 2, 1});
  CHECK(s.q1 == 1.75);
  CHECK(s.median == 2.5);
  CHECK(s.q3 == 3.25);

  s = summarize(V{7, 7, 7});
  CHECK(s.sd == 0);
  CHECK(s.min == s.max);
  CHECK_THROWS_AS(summarize(V{}), InvalidArgument);

  std::mt19937_64 rng(1);
  std::normal_distribution<double> nd;
  for (int t = 0; t < 50; ++t) {
    V v(1 + rng() % 30);
    for (double& x : v) x = nd(rng);
    const auto r = summarize(v);
    CHECK(r.min <= r.q1);
    CHECK(r.q1 <= r.median);
    CHECK(r.median <= r.q3);
    CHECK(r.q3 <= r.max);
    CHECK(r.sd >= 0);
  }
}

TEST_CASE("method names") {
  for (Method m : {Method::ks_exact, Method::shapiro_wilk, Method::welch_t}) CHECK(method_from_string(to_string(m)) == m);
  CHECK_THROWS_AS(method_from_string("anova"), InvalidArgument);
}

TEST_CASE("KS exact small cases") {
  auto v = ks_two_sample_exact(V{1, 3}, V{2, 4});
  CHECK(v.statistic == 0.5);
  const auto [d, p] = oracle::ks_enumerate({1, 3}, {2, 4});
  CHECK(d == 0.5);
  CHECK(v.p_value == doctest::Approx(p).epsilon(1e-12));
  CHECK(v.p_value == doctest::Approx(1.0));  // scipy
  CHECK(v.method == Method::ks_exact);
  CHECK_FALSE(v.approximate);

  V a(10);
  V b(10);
  for (int i = 0; i < 10; ++i) {
    a[static_cast<std::size_t>(i)] = i;
    b[static_cast<std::size_t>(i)] = 10 + i;
  }
  v = ks_two_sample_exact(a, b);
  CHECK(v.statistic == 1);
  CHECK(std::abs(v.p_value - 2 / oracle::choose(20, 10)) < 1e-12);
  CHECK(v.significant);

  v = ks_two_sample_exact(V{0.1, 0.5, 0.9, 1.3, 2.0}, V{0.2, 0.3, 1.1, 1.5, 1.7, 2.5, 3.0});
  CHECK(v.statistic == doctest::Approx(0.37142857142857144));  // scipy
  CHECK(v.p_value == doctest::Approx(0.7373737373737375));     // scipy

  CHECK_THROWS_AS(ks_two_sample_exact(V{1, 2}, V{2, 3}), TiesError);
  CHECK_THROWS_AS(ks_two_sample_exact(V{1, 1}, V{2, 3}), TiesError);
  CHECK_THROWS_AS(ks_two_sample_exact(V{}, V{2, 3}), InvalidArgument);
}

TEST_CASE("KS exact against interleaving enumeration") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0, 1);
  for (int n = 1; n <= 5; ++n) {
    for (int m = 1; m <= 5; ++m) {
      V a(static_cast<std::size_t>(n));
      V b(static_cast<std::size_t>(m));
      for (double& x : a) x = u(rng);
      for (double& x : b) x = u(rng) * 1.3;
      const auto [d, p] = oracle::ks_enumerate(a, b);
      const auto v = ks_two_sample_exact(a, b);
      CHECK(v.statistic == doctest::Approx(d).epsilon(1e-14));
      CHECK(std::abs(v.p_value - p) < 1e-12);
    }
  }
}

TEST_CASE("KS with ties falls back to the asymptotic distribution") {
  const auto v = ks_two_sample(V{1, 2, 2, 3}, V{2, 3, 4, 5});
  CHECK(v.approximate);
  CHECK(v.statistic == ks_statistic(V{1, 2, 2, 3}, V{2, 3, 4, 5}));
  CHECK(v.p_value >= 0);
  CHECK(v.p_value <= 1);
  CHECK_FALSE(ks_two_sample(V{1, 3}, V{2, 4}).approximate);

  // D with ties evaluated only at distinct values: F_a jumps to 1/2 at 1 and
  // 3/4 at 2, F_b is 1/4 at 2.
  CHECK(ks_statistic(V{1, 2, 2, 3}, V{2, 3, 4, 5}) == 0.5);

  CHECK(kolmogorov_survival(0) == 1);
  CHECK(kolmogorov_survival(1.0) == doctest::Approx(0.26999967167735456));
  CHECK(kolmogorov_survival(0.5) == doctest::Approx(0.9639452436648751));
}

TEST_CASE("KS p-values are super-uniform under the null") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0, 1);
  int rejections = 0;
  const int trials = 10000;
  for (int t = 0; t < trials; ++t) {
    V a(10);
    V b(10);
    for (double& x : a) x = u(rng);
    for (double& x : b) x = u(rng);
    rejections += ks_two_sample_exact(a, b).p_value < 0.05;
  }
  CHECK(rejections <= 0.05 * trials);
}

TEST_CASE("Shapiro-Wilk reference values") {
  const V blom = {-1.54663527139923,   -1.0004905456193152,  -0.6554235052344266, -0.3754617702355184,
                  -0.12258084388880242, 0.12258084388880242, 0.3754617702355184,  0.6554235052344266,
                  1.0004905456193152,  1.54663527139923};
  auto v = shapiro_wilk(blom);
  CHECK(v.statistic >= 0.99);
  CHECK(v.statistic == doctest::Approx(0.9965048684184032).epsilon(1e-6));  // scipy
  CHECK(v.p_value == doctest::Approx(0.999961373132172).epsilon(1e-4));     // scipy
  CHECK(v.method == Method::shapiro_wilk);

  v = shapiro_wilk(V{1, 1, 1, 1, 1, 1, 1, 1, 1, 100});
  CHECK(v.statistic == doctest::Approx(0.36572062769765235).epsilon(1e-6));  // scipy
  CHECK(v.p_value < 0.05);
  CHECK(v.p_value == doctest::Approx(1.0036928213864587e-07).epsilon(1e-3));  // scipy
  CHECK(v.significant);

  v = shapiro_wilk(V{2.1, 3.4, 1.9, 5.6, 4.4, 3.3, 2.8, 3.9, 4.1, 3.0});
  CHECK(v.statistic == doctest::Approx(0.9713906031045022).epsilon(1e-6));  // scipy
  CHECK(v.p_value == doctest::Approx(0.9034305013349915).epsilon(1e-4));    // scipy

  v = shapiro_wilk(V{1, 2, 4});
  CHECK(v.statistic == doctest::Approx(0.9642857142857142).epsilon(1e-6));  // scipy
  CHECK(v.p_value == doctest::Approx(0.6368868450289689).epsilon(1e-4));    // scipy

  V ramp;
  for (int i = 1; i <= 20; ++i) ramp.push_back(i);
  ramp.push_back(50);
  v = shapiro_wilk(ramp);
  CHECK(v.statistic == doctest::Approx(0.7706090227495636).epsilon(1e-5));     // scipy
  CHECK(v.p_value == doctest::Approx(0.00024105183965495033).epsilon(1e-2));  // scipy

  CHECK_THROWS_AS(shapiro_wilk(V{3, 3, 3, 3}), DegenerateSample);
  CHECK_THROWS_AS(shapiro_wilk(V{1, 2}), InvalidArgument);
  CHECK_THROWS_AS(shapiro_wilk(V(51, 1.0)), InvalidArgument);
}

TEST_CASE("Shapiro-Wilk W is affine invariant") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  for (int t = 0; t < 30; ++t) {
    V x(3 + rng() % 40);
    for (double& v : x) v = nd(rng);
    V y(x.size());
    const double c = 0.25 + static_cast<double>(t);
    const double d = -3.0 + t;
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = c * x[i] + d;
    CHECK(std::abs(shapiro_wilk(x).statistic - shapiro_wilk(y).statistic) < 1e-12);
  }
}

TEST_CASE("Welch t-test") {
  auto v = welch_t(V{1, 2, 3}, V{2, 3, 4});
  CHECK(std::abs(v.statistic - (-1.224744871391589)) < 1e-12);
  REQUIRE(v.df.has_value());
  CHECK(std::abs(*v.df - 4) < 1e-9);
  CHECK(std::abs(v.p_value - 0.2878641347266908) < 1e-12);  // scipy
  CHECK(std::abs(v.p_value - oracle::student_t_two_sided(v.statistic, *v.df)) < 1e-9);
  CHECK(v.method == Method::welch_t);

  const auto w = welch_t(V{2, 3, 4}, V{1, 2, 3});
  CHECK(w.statistic == -v.statistic);
  CHECK(w.p_value == v.p_value);

  v = welch_t(V{1.5, 2.5, 9}, V{1.5, 2.5, 9});
  CHECK(v.statistic == 0);
  CHECK(v.p_value == doctest::Approx(1.0).epsilon(1e-14));

  // Unequal sizes and variances; df from the Welch-Satterthwaite formula.
  const V a = {3.1, 2.2, 5.9, 4.4, 3.8};
  const V b = {10.0, 1.0, 7.5, 12.0, 0.5, 6.0, 9.9};
  v = welch_t(a, b);
  const auto sa = summarize(a);
  const auto sb = summarize(b);
  const double va = sa.sd * sa.sd / 5;
  const double vb = sb.sd * sb.sd / 7;
  CHECK(v.statistic == doctest::Approx((sa.mean - sb.mean) / std::sqrt(va + vb)));
  CHECK(*v.df == doctest::Approx((va + vb) * (va + vb) / (va * va / 4 + vb * vb / 6)));
  CHECK(std::abs(v.p_value - oracle::student_t_two_sided(v.statistic, *v.df)) < 1e-8);

  CHECK_THROWS_AS(welch_t(V{1, 1}, V{2, 2}), DegenerateSample);
  CHECK_THROWS_AS(welch_t(V{1}, V{2, 3}), InvalidArgument);
}

TEST_CASE("special functions") {
  CHECK(normal_cdf(0) == 0.5);
  CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-12));
  for (double p : {1e-10, 0.001, 0.025, 0.3, 0.5, 0.8, 0.975, 0.999999}) {
    CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-12));
  }
  CHECK_THROWS_AS(normal_quantile(0), InvalidArgument);
  CHECK_THROWS_AS(normal_quantile(1), InvalidArgument);

  // I_x(1, 1) = x; I_x(a, 1) = x^a; symmetry I_x(a, b) = 1 - I_{1-x}(b, a).
  CHECK(incomplete_beta(1, 1, 0.3) == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(incomplete_beta(2.5, 1, 0.4) == doctest::Approx(std::pow(0.4, 2.5)).epsilon(1e-13));
  CHECK(incomplete_beta(3.2, 7.1, 0.35) == doctest::Approx(1 - incomplete_beta(7.1, 3.2, 0.65)).epsilon(1e-13));
  CHECK(incomplete_beta(2, 3, 0) == 0);
  CHECK(incomplete_beta(2, 3, 1) == 1);

  // Q(1, x) = e^-x; chi-square with 2 dof has survival e^{-x/2}.
  CHECK(incomplete_gamma_q(1, 2.5) == doctest::Approx(std::exp(-2.5)).epsilon(1e-13));
  CHECK(chi_square_sf(3.0, 2) == doctest::Approx(std::exp(-1.5)).epsilon(1e-13));
  CHECK(chi_square_sf(3.841458820694124, 1) == doctest::Approx(0.05).epsilon(1e-10));
  CHECK(chi_square_sf(0, 3) == 1);

  for (double df : {1.0, 2.5, 4.0, 17.0}) {
    for (double t : {0.1, 1.0, 2.2, 5.0}) {
      CHECK(student_t_two_sided(t, df) == doctest::Approx(oracle::student_t_two_sided(t, df)).epsilon(1e-8));
    }
  }
}

TEST_CASE("invariances") {
  std::mt19937_64 rng(15);
  std::normal_distribution<double> nd;
  for (int t = 0; t < 50; ++t) {
    V a(2 + rng() % 15);
    V b(2 + rng() % 15);
    for (double& x : a) x = nd(rng);
    for (double& x : b) x = nd(rng) + 0.5;
    const double c = (t % 2 ? -1 : 1) * std::exp(nd(rng));
    const double d = 5 * nd(rng);
    V ta = a;
    V tb = b;
    for (double& x : ta) x = c * x + d;
    for (double& x : tb) x = c * x + d;
    CHECK(welch_t(ta, tb).p_value == doctest::Approx(welch_t(a, b).p_value).epsilon(1e-10));

    V shuffled = a;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(summarize(shuffled) == summarize(a));

    const double ks = ks_statistic(a, b);
    CHECK(ks >= 0);
    CHECK(ks <= 1);
    CHECK(ks_statistic(a, a) == 0);
  }
}
