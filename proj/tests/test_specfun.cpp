#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "qtce/errors.hpp"
#include "qtce/oracles.hpp"
#include "qtce/specfun.hpp"

using namespace qtce;

namespace {

// Li_s(-1) = -eta(s): alternating partial sums smoothed by repeated averaging.
double alternating_oracle(double s) {
  const int n = 2000, depth = 30;
  std::vector<double> partial(depth + 1);
  double sum = 0.0;
  for (int k = 1; k <= n + depth; ++k) {
    sum += ((k % 2) ? 1.0 : -1.0) * std::pow(k, -s);
    if (k >= n) partial[k - n] = sum;
  }
  for (int level = 0; level < depth; ++level)
    for (int i = 0; i + 1 < static_cast<int>(partial.size()) - level; ++i) partial[i] = 0.5 * (partial[i] + partial[i + 1]);
  return -partial[0];
}

// zeta(s) by direct sum plus Euler-Maclaurin tail correction.
double zeta_oracle(double s) {
  const int n = 2000;
  double sum = 0.0;
  for (int k = 1; k < n; ++k) sum += std::pow(k, -s);
  const double N = n;
  sum += std::pow(N, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(N, -s) + s / 12.0 * std::pow(N, -s - 1.0) -
         s * (s + 1.0) * (s + 2.0) / 720.0 * std::pow(N, -s - 3.0);
  return sum;
}

}  // namespace

TEST_CASE("polylog trivial values") {
  CHECK(polylog(2.5, 0.0) == 0.0);
  CHECK(polylog(1.0, 0.5) == doctest::Approx(std::numbers::ln2).epsilon(1e-15));
  CHECK(zeta(2.0) == doctest::Approx(std::numbers::pi * std::numbers::pi / 6.0).epsilon(1e-14));
}

TEST_CASE("polylog at z = 1 and z = -1 against accelerated series") {
  const double z32 = zeta_oracle(1.5);
  CHECK(z32 == doctest::Approx(2.612375348685488).epsilon(1e-12));
  CHECK(polylog(1.5, 1.0) == doctest::Approx(z32).epsilon(1e-12));
  CHECK(zeta(2.5) == doctest::Approx(zeta_oracle(2.5)).epsilon(1e-12));
  CHECK(zeta(2.5) == doctest::Approx(1.341487257).epsilon(1e-9));
  const double alt = alternating_oracle(1.5);
  CHECK(alt == doctest::Approx(-0.7651470246).epsilon(1e-9));
  CHECK(polylog(1.5, -1.0) == doctest::Approx(alt).epsilon(1e-10));
  CHECK(polylog(1.5, -1.0) == doctest::Approx(-(1.0 - std::pow(2.0, -0.5)) * z32).epsilon(1e-12));
}

TEST_CASE("polylog domain errors") {
  CHECK_THROWS_AS(polylog(1.5, 1.01), DomainError);
  CHECK_THROWS_AS(polylog(1.0, 1.0), DivergenceError);
  CHECK_THROWS_AS(polylog(0.5, 1.0), DivergenceError);
  CHECK_THROWS_AS(zeta(1.0), DomainError);
}

TEST_CASE("series and integral representation agree") {
  for (double s : {0.5, 1.5, 2.5}) {
    for (double z : {-0.9, -0.6, -0.3, 0.1, 0.4, 0.6, 0.8, 0.9, 0.95, 0.99}) {
      CAPTURE(s);
      CAPTURE(z);
      const double ref = oracle::polylog_quadrature(s, z);
      CHECK(std::abs(polylog(s, z) - ref) <= 1e-10 * std::abs(ref));
    }
  }
}

TEST_CASE("polylog for strongly degenerate fermions") {
  for (double s : {0.5, 1.5, 2.5}) {
    for (double z : {-5.0, -8.0, -30.0, -400.0}) {
      CAPTURE(s);
      CAPTURE(z);
      const double ref = oracle::polylog_quadrature(s, z);
      CHECK(std::abs(polylog(s, z) - ref) <= 1e-10 * std::abs(ref));
    }
  }
}

TEST_CASE("negative integer orders are rational") {
  for (double z : {-0.7, 0.2, 0.45}) {
    double direct = 0.0;
    for (int k = 1; k < 400; ++k) direct += std::pow(z, k) * k * k * k;
    CHECK(polylog_negative_integer(3, z) == doctest::Approx(direct).epsilon(1e-12));
  }
  CHECK(polylog_negative_integer(0, 0.25) == doctest::Approx(1.0 / 3.0));
  CHECK(polylog_negative_integer(1, 0.5) == doctest::Approx(2.0));
}

TEST_CASE("small-mu expansion") {
  CHECK(polylog_small_mu(1.5, 0.0) == doctest::Approx(2.612375348685488).epsilon(1e-14));
  CHECK(polylog_small_mu(1.0, -0.01) == doctest::Approx(-std::log(-std::expm1(-0.01))).epsilon(1e-13));
  CHECK(polylog_small_mu(1.0, -0.01) == doctest::Approx(4.610166).epsilon(1e-6));
  CHECK(std::abs(polylog_small_mu(2.5, -0.05) - oracle::polylog_quadrature(2.5, std::exp(-0.05))) <= 1e-9);
  CHECK_THROWS_AS(polylog_small_mu(1.5, -1.5), DomainError);
  CHECK_THROWS_AS(polylog_small_mu(1.5, 0.1), DomainError);
}

TEST_CASE("small-mu expansion matches the direct evaluation") {
  for (double s : {0.5, 1.0, 1.5, 2.0, 2.5}) {
    for (double x : {-0.5, -0.1, -1e-2, -1e-4, -1e-8}) {
      CAPTURE(s);
      CAPTURE(x);
      const double z = std::exp(x);
      const double ref = z <= 0.5 ? polylog(s, z) : oracle::polylog_quadrature(s, z);
      CHECK(std::abs(polylog_small_mu(s, x) - ref) <= 1e-8 * std::abs(ref));
    }
  }
}

TEST_CASE("monotonicity and zeta bound") {
  for (double s : {0.5, 1.5, 2.5}) {
    double prev = polylog(s, -0.99);
    for (int i = 1; i < 199; ++i) {
      const double z = -0.99 + i * 0.01;
      const double cur = polylog(s, z);
      CHECK(cur > prev);
      prev = cur;
      if (s > 1.0) CHECK(cur < zeta(s));
    }
  }
}

TEST_CASE("inverse of Li_{3/2}") {
  CHECK(polylog_inverse_3_2(0.0) == 0.0);
  CHECK(polylog_inverse_3_2(zeta(1.5)) == 1.0);
  CHECK_THROWS_AS(polylog_inverse_3_2(2.7), DomainError);
  const double y = polylog(1.5, 0.3);
  CHECK(std::abs(polylog(1.5, polylog_inverse_3_2(y)) - y) <= 1e-12);
  CHECK(y == doctest::Approx(0.33831109554480627).epsilon(1e-13));
  double prev = -1e300;
  for (double z : {-50.0, -3.0, -1.0, -0.2, 0.0, 1e-6, 0.1, 0.5, 0.9, 0.999}) {
    const double yy = polylog(1.5, z);
    const double back = polylog_inverse_3_2(yy);
    CAPTURE(z);
    CHECK(std::abs(polylog(1.5, back) - yy) <= 1e-12 * std::max(1.0, std::abs(yy)));
    CHECK(back > prev);
    prev = back;
  }
  // fermionic density at z = 1
  const double rho = -alternating_oracle(1.5);
  CHECK(-polylog_inverse_3_2(-rho) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("upper incomplete gamma") {
  CHECK(gamma_upper(1.0, 0.5) == doctest::Approx(std::exp(-0.5)).epsilon(1e-14));
  CHECK(gamma_upper(1.0, 0.5) == doctest::Approx(0.60653066).epsilon(1e-8));
  CHECK(gamma_upper(2.5, 0.0) == doctest::Approx(std::tgamma(2.5)).epsilon(1e-15));
  CHECK(gamma_upper(1.5, 2.0) == doctest::Approx(oracle::gamma_upper_quadrature(1.5, 2.0)).epsilon(1e-10));
  for (double s : {-1.5, -1.0, -0.5, 0.0, 0.5, 1.5, 3.0}) {
    for (double x : {0.01, 0.3, 1.0, 2.0, 5.0, 20.0}) {
      CAPTURE(s);
      CAPTURE(x);
      const double ref = oracle::gamma_upper_quadrature(s, x);
      CHECK(std::abs(gamma_upper(s, x) - ref) <= 1e-10 * std::abs(ref));
      const double rec = s * gamma_upper(s, x) + std::pow(x, s) * std::exp(-x);
      CHECK(std::abs(gamma_upper(s + 1.0, x) - rec) <= 1e-10 * std::abs(rec));
      CHECK(gamma_upper(s, x * 1.1) < gamma_upper(s, x));
    }
  }
}

TEST_CASE("harmonic numbers") {
  CHECK(harmonic_number(0) == 0.0);
  CHECK(harmonic_number(3) == doctest::Approx(11.0 / 6.0));
}
