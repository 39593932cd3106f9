#include <cmath>
#include <limits>

#include "doctest.h"
#include "tailent/common.hpp"
#include "tailent/special.hpp"

using namespace tailent::special;

// Reference values below were computed independently with 50-digit
// arbitrary-precision arithmetic and frozen; tolerances reflect what the
// double-precision algorithms are expected to deliver, not the oracle.

TEST_CASE("normal cdf at known points") {
  CHECK(norm_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(norm_cdf(1.0) ==
        doctest::Approx(0.841344746068542949).epsilon(1e-15));
  CHECK(norm_cdf(-1.0) ==
        doctest::Approx(1.0 - 0.841344746068542949).epsilon(1e-14));
  // deep tail: erfc keeps relative accuracy where a naive 1 - cdf would not
  CHECK(std::abs(norm_cdf(-8.0) / 6.22096057427178412e-16 - 1.0) < 1e-12);
  CHECK(norm_cdf(40.0) == 1.0);
  // symmetry
  for (double x : {0.3, 1.7, 2.9, 5.5})
    CHECK(norm_cdf(x) + norm_cdf(-x) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("normal quantile against frozen references") {
  CHECK(std::abs(norm_quantile(0.5)) < 1e-15);
  CHECK(norm_quantile(0.975) ==
        doctest::Approx(1.95996398454005386).epsilon(1e-14));
  CHECK(norm_quantile(0.0001) ==
        doctest::Approx(-3.71901648545568055).epsilon(1e-14));
  CHECK(norm_quantile(0.9999999) ==
        doctest::Approx(5.19933758229066109).epsilon(1e-13));
  CHECK(norm_quantile(0.3) ==
        doctest::Approx(-0.524400512708040816).epsilon(1e-14));
}

TEST_CASE("normal quantile inverts the cdf") {
  for (double p : {1e-10, 1e-4, 0.02, 0.3, 0.5, 0.77, 0.999, 1.0 - 1e-9}) {
    double x = norm_quantile(p);
    CHECK(norm_cdf(x) == doctest::Approx(p).epsilon(5e-13));
  }
  CHECK_THROWS_AS(norm_quantile(0.0), tailent::ValidationError);
  CHECK_THROWS_AS(norm_quantile(1.0), tailent::ValidationError);
  CHECK_THROWS_AS(norm_quantile(-0.5), tailent::ValidationError);
}

TEST_CASE("incomplete beta identities") {
  // complement identity I_x(a,b) + I_{1-x}(b,a) = 1
  for (double a : {0.4, 1.0, 3.5, 8.0})
    for (double b : {0.7, 2.0, 5.5})
      for (double x : {0.05, 0.3, 0.62, 0.94})
        CHECK(inc_beta(a, b, x) + inc_beta(b, a, 1.0 - x) ==
              doctest::Approx(1.0).epsilon(1e-13));
  // I_x(1,1) is the identity map
  CHECK(inc_beta(1.0, 1.0, 0.37) == doctest::Approx(0.37).epsilon(1e-14));
  // symmetry point
  CHECK(inc_beta(0.5, 0.5, 0.5) == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(inc_beta(2.0, 3.0, 0.0) == 0.0);
  CHECK(inc_beta(2.0, 3.0, 1.0) == 1.0);
}

TEST_CASE("student t cdf against frozen references") {
  // nu = 4 has the closed form 1/2 + (3/8)u(3 - u^2)/... giving exactly
  // 0.896 at x = 1.5.
  CHECK(t_cdf(1.5, 4.0) == doctest::Approx(0.896).epsilon(2e-15));
  CHECK(t_cdf(-2.3, 2.76733) ==
        doctest::Approx(0.0561844256131363975).epsilon(1e-13));
  CHECK(t_cdf(0.7, 7.5) ==
        doctest::Approx(0.747472189063074759).epsilon(1e-13));
  CHECK(t_cdf(10.0, 3.0) ==
        doctest::Approx(0.998935800470792925).epsilon(1e-13));
  CHECK(std::abs(t_cdf(-30.0, 2.76733) / 7.3100933826329884e-05 - 1.0) <
        1e-12);
  CHECK(t_cdf(0.25, 3.76733) ==
        doctest::Approx(0.592188741871432647).epsilon(1e-13));
  CHECK(t_cdf(-0.704813, 3.76733) ==
        doctest::Approx(0.261024875836477926).epsilon(1e-13));
}

TEST_CASE("student t cdf basic shape") {
  for (double nu : {0.7, 2.01, 4.0, 37.0}) {
    CHECK(t_cdf(0.0, nu) == doctest::Approx(0.5).epsilon(1e-14));
    for (double x : {0.4, 1.3, 6.0})
      CHECK(t_cdf(x, nu) + t_cdf(-x, nu) ==
            doctest::Approx(1.0).epsilon(1e-13));
  }
  // large nu approaches the normal
  CHECK(t_cdf(1.0, 1e6) == doctest::Approx(norm_cdf(1.0)).epsilon(1e-5));
  CHECK(t_cdf(std::numeric_limits<double>::infinity(), 3.0) == 1.0);
  CHECK_THROWS_AS(t_cdf(0.0, 0.0), tailent::ValidationError);
  CHECK_THROWS_AS(t_cdf(0.0, -2.0), tailent::ValidationError);
}

TEST_CASE("student t quantile against frozen references") {
  CHECK(t_quantile(0.975, 4.0) ==
        doctest::Approx(2.77644510519779349).epsilon(1e-12));
  CHECK(t_quantile(0.9999, 2.76733) ==
        doctest::Approx(26.7802418706156798).epsilon(1e-11));
  CHECK(std::abs(t_quantile(0.5, 7.5)) < 1e-14);
  CHECK(t_quantile(0.01, 3.0) ==
        doctest::Approx(-4.54070285856813352).epsilon(1e-12));
  CHECK(t_quantile(0.6, 2.01) ==
        doctest::Approx(0.288495304185504719).epsilon(1e-12));
}

TEST_CASE("student t quantile inverts the cdf") {
  for (double nu : {2.01, 2.76733, 4.0, 12.0, 80.0})
    for (double p : {1e-6, 1e-3, 0.2, 0.5, 0.9, 0.99999}) {
      double x = t_quantile(p, nu);
      CHECK(t_cdf(x, nu) == doctest::Approx(p).epsilon(1e-10));
    }
  CHECK_THROWS_AS(t_quantile(0.0, 4.0), tailent::ValidationError);
  CHECK_THROWS_AS(t_quantile(1.0, 4.0), tailent::ValidationError);
  CHECK_THROWS_AS(t_quantile(0.5, 0.0), tailent::ValidationError);
}

TEST_CASE("adaptive simpson on known integrals") {
  double third =
      adaptive_simpson([](double x) { return x * x; }, 0.0, 1.0, 1e-12);
  CHECK(third == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
  double two = adaptive_simpson([](double x) { return std::sin(x); }, 0.0,
                                std::acos(-1.0), 1e-11);
  CHECK(two == doctest::Approx(2.0).epsilon(1e-10));
  // a peaked integrand: normal density over [-8, 8]
  double one = adaptive_simpson([](double x) { return norm_pdf(x); }, -8.0,
                                8.0, 1e-11);
  CHECK(one == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("bivariate t cdf against frozen references") {
  // median point with rho = 1/2: closed form 1/4 + asin(rho)/(2 pi) = 1/3
  CHECK(t2_cdf(0.0, 0.0, 3.0, 0.5) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-9));
  CHECK(t2_cdf(0.5, 1.2, 3.76733, 0.624) ==
        doctest::Approx(0.6380450768903348).epsilon(1e-8));
  CHECK(t2_cdf(1.0, -0.3, 5.0, -0.4) ==
        doctest::Approx(0.2739076617897592).epsilon(1e-8));
  CHECK(t2_cdf(0.704813, 0.718442, 3.76733, 0.624) ==
        doctest::Approx(0.6300726612711568).epsilon(1e-8));
  CHECK(t2_cdf(2.0, 2.0, 2.76733, 0.767) ==
        doctest::Approx(0.8953985392046162).epsilon(1e-8));
}

TEST_CASE("bivariate t cdf properties") {
  // symmetry in the arguments
  CHECK(t2_cdf(0.4, 1.1, 5.0, 0.3) ==
        doctest::Approx(t2_cdf(1.1, 0.4, 5.0, 0.3)).epsilon(1e-9));
  // one argument at +infinity reduces to the univariate margin
  double inf = std::numeric_limits<double>::infinity();
  CHECK(t2_cdf(0.8, inf, 6.0, 0.45) ==
        doctest::Approx(t_cdf(0.8, 6.0)).epsilon(1e-8));
  CHECK(t2_cdf(inf, inf, 6.0, 0.45) == doctest::Approx(1.0).epsilon(1e-8));
  // rho = 0 with large nu is close to the product of normal margins
  CHECK(t2_cdf(0.5, 0.8, 500.0, 0.0) ==
        doctest::Approx(norm_cdf(0.5) * norm_cdf(0.8)).epsilon(1e-3));
  // comonotone and countermonotone limits
  CHECK(t2_cdf(0.6, 1.4, 4.0, 1.0) ==
        doctest::Approx(t_cdf(0.6, 4.0)).epsilon(1e-12));
  CHECK(t2_cdf(0.6, 1.4, 4.0, -1.0) ==
        doctest::Approx(t_cdf(0.6, 4.0) + t_cdf(1.4, 4.0) - 1.0)
            .epsilon(1e-12));
  // monotone in each argument
  CHECK(t2_cdf(0.2, 0.9, 4.0, 0.5) < t2_cdf(0.6, 0.9, 4.0, 0.5));
  CHECK(t2_cdf(0.2, 0.9, 4.0, 0.5) < t2_cdf(0.2, 1.3, 4.0, 0.5));
  CHECK_THROWS_AS(t2_cdf(0.0, 0.0, 4.0, 1.5), tailent::ValidationError);
}
