#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qtce/errors.hpp"
#include "qtce/ideal_gas.hpp"
#include "qtce/oracles.hpp"
#include "qtce/specfun.hpp"

using namespace qtce;

namespace {
const double kZ32 = 2.612375348685488;

BoxGeometry box_with_volume_over_lambda3(double v, double beta = 1.0) {
  const double lam = thermal_wavelength(beta);
  return BoxGeometry::cube(v * lam * lam * lam);
}
}  // namespace

TEST_CASE("dilute Bose gas particle number") {
  const auto tc = ThermoConditions::from_fugacity(1.0, 1e-6);
  const auto sf = state_functions(Species::bose, tc, box_with_volume_over_lambda3(1e6));
  const double two_term = 1.0 + 1e-6 / std::pow(2.0, 1.5);
  CHECK(sf.N == doctest::Approx(two_term).epsilon(1e-12));
  CHECK(sf.N == doctest::Approx(1.0000004).epsilon(1e-7));
}

TEST_CASE("thermal density at z = 1 is the critical density") {
  const double beta = 0.7;
  const auto tc = ThermoConditions{beta, 0.0, {}};
  const auto geo = BoxGeometry::cube(1000.0);
  const auto sf = state_functions(Species::bose, tc, geo);
  CHECK(sf.N / geo.volume() == doctest::Approx(critical_density(beta)).epsilon(1e-14));
  CHECK(critical_density(beta) * std::pow(thermal_wavelength(beta), 3) == doctest::Approx(kZ32).epsilon(1e-15));
}

TEST_CASE("classical equation of state") {
  for (Species sp : {Species::bose, Species::fermi}) {
    for (double z : {1e-4, 1e-5, 1e-7}) {
      const auto tc = ThermoConditions::from_fugacity(2.0, z);
      const auto geo = BoxGeometry::cube(50.0);
      const auto sf = state_functions(sp, tc, geo);
      const double ratio = sf.P * geo.volume() / (sf.N * tc.temperature());
      CHECK(std::abs(ratio - 1.0) <= 2.0 * z);
    }
  }
  const auto tc = ThermoConditions::from_fugacity(1.0, 0.3);
  const auto sf = state_functions(Species::classical, tc, BoxGeometry::cube(8.0));
  CHECK(sf.P * 8.0 == doctest::Approx(sf.N / tc.beta).epsilon(1e-15));
}

TEST_CASE("bosonic chemical potential must be nonpositive") {
  CHECK_THROWS_AS(state_functions(Species::bose, {1.0, 0.1, {}}, BoxGeometry::cube(1.0)), DomainError);
  CHECK_NOTHROW(state_functions(Species::fermi, {1.0, 3.0, {}}, BoxGeometry::cube(1.0)));
}

TEST_CASE("energy is three halves of PV and N grows with mu") {
  const auto geo = BoxGeometry::cube(123.0);
  for (Species sp : {Species::bose, Species::fermi}) {
    double prev = 0.0;
    for (double bmu : {-6.0, -2.0, -0.5, -0.1, -0.01, -1e-4}) {
      const ThermoConditions tc{1.3, bmu / 1.3, {}};
      const auto sf = state_functions(sp, tc, geo);
      CHECK(sf.U == doctest::Approx(1.5 * sf.P * geo.volume()).epsilon(1e-12));
      CHECK(sf.N > prev);
      CHECK(sf.S >= 0.0);
      prev = sf.N;
    }
  }
  double prev = 0.0;
  for (double bmu : {-1.0, 0.0, 1.0, 5.0, 20.0}) {
    const auto sf = state_functions(Species::fermi, {1.0, bmu, {}}, geo);
    CHECK(sf.N > prev);
    prev = sf.N;
  }
}

TEST_CASE("particle number is the mu derivative of lnZ") {
  const auto geo = BoxGeometry::cube(77.0);
  for (Species sp : {Species::bose, Species::fermi}) {
    for (double bmu : {-3.0, -0.4, -0.05}) {
      const double beta = 0.8, mu = bmu / beta, h = 1e-5 * std::abs(mu);
      const auto plus = state_functions(sp, {beta, mu + h, {}}, geo);
      const auto minus = state_functions(sp, {beta, mu - h, {}}, geo);
      const double fd = (plus.lnZ - minus.lnZ) / (2.0 * h) / beta;
      const auto sf = state_functions(sp, {beta, mu, {}}, geo);
      CHECK(fd == doctest::Approx(sf.N).epsilon(1e-6));
    }
  }
}

TEST_CASE("solve_mu round trip below the critical density") {
  const auto geo = BoxGeometry::cube(1000.0);
  for (Species sp : {Species::bose, Species::fermi}) {
    for (double y : {1e-3, 0.1, 1.0, 2.5}) {
      const double beta = 1.1;
      const double rho = y / std::pow(thermal_wavelength(beta), 3);
      const auto sol = solve_mu(sp, beta, rho, geo);
      const auto sf = state_functions(sp, {beta, sol.mu, {}}, geo);
      CHECK(sf.N / geo.volume() == doctest::Approx(rho).epsilon(1e-10));
      CHECK(sol.phase.bec_dim == BecDim::none);
    }
  }
  const auto sol = solve_mu(Species::fermi, 1.0, 10.0 / std::pow(thermal_wavelength(1.0), 3), geo);
  const auto sf = state_functions(Species::fermi, {1.0, sol.mu, {}}, geo);
  CHECK(sf.N / geo.volume() == doctest::Approx(10.0 / std::pow(thermal_wavelength(1.0), 3)).epsilon(1e-10));
}

TEST_CASE("solve_mu boundary and condensate fraction") {
  const auto geo = BoxGeometry::cube(1e4, Anisotropy::isotropic_0d);
  const double beta = 1.0;
  const auto at_c = solve_mu(Species::bose, beta, critical_density(beta), geo);
  CHECK(at_c.mu <= 0.0);
  CHECK(at_c.mu > -1e-12);
  CHECK(at_c.phase.f == 0.0);

  // T = T_c (1/2)^{2/3}
  const double rho = 0.05;
  const double T = critical_temperature(rho) * std::pow(0.5, 2.0 / 3.0);
  const auto half = solve_mu(Species::bose, 1.0 / T, rho, geo);
  CHECK(half.phase.f == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(half.phase.bec_dim == BecDim::d0);
  CHECK(half.phase.f == doctest::Approx(1.0 - std::pow(T / half.phase.T_c, 1.5)).epsilon(1e-12));

  // fermions at z = 1: density -Li_{3/2}(-1) / lambda^3
  const double y = 0.7651470246254078;
  const auto fz = solve_mu(Species::fermi, 1.0, y / std::pow(thermal_wavelength(1.0), 3), geo);
  CHECK(std::abs(fz.mu) < 1e-9);
}

TEST_CASE("condensate chemical potentials") {
  const double beta = 1.0;
  const ThermoConditions tc{beta, 0.0, {}};
  const double lam = tc.lambda_T();
  {
    const BoxGeometry geo{10.0, 10.0, 10.0, Anisotropy::isotropic_0d, 1.0};
    const double rho = 1000.0 / geo.volume();
    CHECK(mu_bec_asymptotic(0, 1.0, rho, tc, geo) * beta == doctest::Approx(-0.001).epsilon(1e-14));
  }
  {
    const BoxGeometry geo{1000.0, 2.0, 1.0, Anisotropy::quasi_1d, 1.0};
    const double rho = 10.0 / (geo.Ly * geo.Lz * lam);
    CHECK(mu_bec_asymptotic(1, 1.0, rho, tc, geo) * beta == doctest::Approx(-std::numbers::pi / 100.0).epsilon(1e-14));
  }
  {
    const BoxGeometry geo{1e6, 1e6, 1.0, Anisotropy::quasi_2d, 1.0};
    const double rho = 10.0 / (geo.Lz * lam * lam);
    CHECK(mu_bec_asymptotic(2, 1.0, rho, tc, geo) * beta == doctest::Approx(-std::exp(-10.0)).epsilon(1e-13));
    CHECK(mu_bec_asymptotic(2, 1.0, rho, tc, geo) == doctest::Approx(-4.54e-5).epsilon(1e-3));
  }
  CHECK_THROWS_AS(mu_bec_asymptotic(0, 0.0, 1.0, tc, BoxGeometry::cube(1.0)), DomainError);
}

TEST_CASE("condensed state returns the requested condensate") {
  const double beta = 1.0;
  const double lam = thermal_wavelength(beta);
  const BoxGeometry geo{4000.0 * lam, 3.0 * lam, 2.0 * lam, Anisotropy::quasi_1d, 1.0};
  const double rho = 3.0 * critical_density(beta);
  const auto sol = solve_mu(Species::bose, beta, rho, geo);
  CHECK(sol.phase.bec_dim == BecDim::d1);
  CHECK(sol.phase.warnings.empty());
  const auto sf = state_functions(Species::bose, {beta, sol.mu, {}}, geo);
  CHECK(sf.N_condensate == doctest::Approx(sol.phase.f * rho * geo.volume()).epsilon(1e-12));
  CHECK((sf.N - sf.N_condensate) / geo.volume() * lam * lam * lam <= kZ32 + 1e-10);
}

TEST_CASE("regime violations produce warnings only") {
  const BoxGeometry geo{5.0, 5.0, 5.0, Anisotropy::quasi_1d, 1.0};
  const auto sol = solve_mu(Species::bose, 1.0, 2.0 * critical_density(1.0), geo);
  CHECK_FALSE(sol.phase.warnings.empty());
}

TEST_CASE("condensate pressures") {
  const double beta = 1.0;
  const ThermoConditions tc{beta, 0.0, {}};
  const double lam = tc.lambda_T();
  const BoxGeometry geo{500.0, 40.0, 3.0, Anisotropy::quasi_1d, 1.0};
  const double bulk0 = zeta(2.5) / (beta * lam * lam * lam);
  CHECK(pressure_bec(1, tc, geo) == doctest::Approx(bulk0 + kZ32 / (beta * lam * geo.Ly * geo.Lz)).epsilon(1e-7));
  CHECK(pressure_bec(2, tc, geo) ==
        doctest::Approx(bulk0 + std::numbers::pi * std::numbers::pi / 6.0 / (beta * lam * lam * geo.Lz)).epsilon(1e-7));

  // 0D: the 1/V term vanishes for large boxes
  const ThermoConditions small{beta, -1e-6 / beta, {}};
  const auto big = BoxGeometry::cube(1e12);
  CHECK(pressure_bec(0, small, big) == doctest::Approx(polylog(2.5, std::exp(-1e-6)) / (beta * lam * lam * lam)).epsilon(1e-9));

  // 1D correction at -beta mu = 1e-4 against its leading square-root term
  const double x = 1e-4;
  const ThermoConditions near{beta, -x / beta, {}};
  const double bulk = polylog(2.5, std::exp(-x)) / (beta * lam * lam * lam);
  const double corr = pressure_bec(1, near, geo) - bulk - kZ32 / (beta * lam * geo.Ly * geo.Lz);
  const double lead = std::tgamma(-0.5) * std::sqrt(x / (beta * beta)) / (lam * geo.Ly * geo.Lz);
  CHECK(corr == doctest::Approx(lead).epsilon(5e-3));

  // the 1D condensate count is the mu derivative of the 1D pressure term times V
  const double h = 1e-9;
  auto term = [&](double mu) {
    const ThermoConditions t{beta, mu, {}};
    return (pressure_bec(1, t, geo) - polylog(2.5, std::exp(beta * mu)) / (beta * lam * lam * lam)) * geo.volume();
  };
  const double fd = (term(-x + h) - term(-x - h)) / (2.0 * h);
  CHECK(fd == doctest::Approx(geo.Lx / lam * polylog(0.5, std::exp(-x))).epsilon(1e-5));
  CHECK(fd == doctest::Approx(condensate_count(1, near, geo)).epsilon(0.01));
}

TEST_CASE("classicality ratio") {
  const double beta = 1.0;
  const double lam = thermal_wavelength(beta);
  const double V = 1000.0;
  const double N = 0.01 * V / (lam * lam * lam);
  const double K = 1.5 * N / beta;
  // 2 m K / (hbar^2 N) = 6 pi / lambda^2
  CHECK(classicality_ratio(N, V, K) == doctest::Approx(0.01 / std::pow(6.0 * std::numbers::pi, 1.5)).epsilon(1e-13));
  CHECK(classicality_ratio(3 * N, 3 * V, 3 * K) == doctest::Approx(classicality_ratio(N, V, K)).epsilon(1e-14));
  CHECK(classicality_ratio(1e-8, V, 1.5e-8) < 1e-10);
}
