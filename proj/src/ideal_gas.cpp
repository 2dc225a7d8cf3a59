#include "qtce/ideal_gas.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "qtce/errors.hpp"
#include "qtce/specfun.hpp"

namespace qtce {
namespace {

constexpr double kZeta32 = 2.612375348685488343348567567924071630571;

double clamped_minus_beta_mu(double beta_mu) { return std::max(-beta_mu, kMinMinusBetaMu); }

// Li_s(sigma z) with sigma = +1 for bosons and -1 for fermions; Li_s(z) -> z classically.
double signed_polylog(Species species, double s, double z) {
  switch (species) {
    case Species::bose: return polylog(s, z);
    case Species::fermi: return -polylog(s, -z);
    case Species::classical: return z;
  }
  return 0.0;
}

void check_species_mu(Species species, double mu) {
  if (species == Species::bose && mu > 0.0) throw DomainError("bosonic chemical potential must be <= 0");
}

}  // namespace

double ThermoConditions::lambda_T() const { return thermal_wavelength(beta, units); }
double ThermoConditions::fugacity() const { return std::exp(beta * mu); }
double ThermoConditions::temperature() const { return 1.0 / (units.k_B * beta); }

ThermoConditions ThermoConditions::from_fugacity(double beta, double z, UnitSystem units) {
  if (!(z > 0.0)) throw DomainError("fugacity must be positive");
  return {beta, std::log(z) / beta, units};
}

void BoxGeometry::validate() const {
  if (!(Lz > 0.0) || !(Ly >= Lz) || !(Lx >= Ly))
    throw DomainError("box sizes must satisfy Lx >= Ly >= Lz > 0");
}

BoxGeometry BoxGeometry::cube(double V, Anisotropy regime) {
  const double L = std::cbrt(V);
  return {L, L, L, regime, 1.0};
}

double thermal_wavelength(double beta, const UnitSystem& u) {
  if (!(beta > 0.0)) throw DomainError("beta must be positive");
  return std::sqrt(2.0 * std::numbers::pi * u.hbar * u.hbar * beta / u.mass);
}

double critical_density(double beta, const UnitSystem& units) {
  return kZeta32 / std::pow(thermal_wavelength(beta, units), 3);
}

double critical_temperature(double rho, const UnitSystem& u) {
  return 2.0 * std::numbers::pi * u.hbar * u.hbar / (u.mass * u.k_B) * std::pow(rho / kZeta32, 2.0 / 3.0);
}

double bulk_density(Species species, const ThermoConditions& tc) {
  check_species_mu(species, tc.mu);
  return signed_polylog(species, 1.5, tc.fugacity()) / std::pow(tc.lambda_T(), 3);
}

double bulk_pressure(Species species, const ThermoConditions& tc) {
  check_species_mu(species, tc.mu);
  return signed_polylog(species, 2.5, tc.fugacity()) / (tc.beta * std::pow(tc.lambda_T(), 3));
}

int bec_dimension(Anisotropy regime) {
  switch (regime) {
    case Anisotropy::isotropic_0d: return 0;
    case Anisotropy::quasi_1d: return 1;
    case Anisotropy::quasi_2d: return 2;
    case Anisotropy::continuum: break;
  }
  return -1;
}

double condensate_count(int d, const ThermoConditions& tc, const BoxGeometry& geo) {
  const double x = clamped_minus_beta_mu(tc.beta * tc.mu);
  const double lam = tc.lambda_T();
  switch (d) {
    case 0: return 1.0 / x;
    case 1: return geo.Lx / lam * std::sqrt(std::numbers::pi / x);
    case 2: return std::max(0.0, -geo.Lx * geo.Ly / (lam * lam) * std::log(x));
    default: throw DomainError("condensate dimension must be 0, 1 or 2");
  }
}

double pressure_bec(int d, const ThermoConditions& tc, const BoxGeometry& geo) {
  const double beta_mu = -clamped_minus_beta_mu(tc.beta * tc.mu);
  const double z = std::exp(beta_mu);
  const double lam = tc.lambda_T();
  const double bulk = polylog(2.5, z) / (tc.beta * lam * lam * lam);
  switch (d) {
    case 0: return bulk + polylog(1.0, z) / (tc.beta * geo.volume());
    case 1: return bulk + polylog(1.5, z) / (tc.beta * lam * geo.Ly * geo.Lz);
    case 2: return bulk + polylog(2.0, z) / (tc.beta * lam * lam * geo.Lz);
    default: throw DomainError("condensate dimension must be 0, 1 or 2");
  }
}

StateFunctions state_functions(Species species, const ThermoConditions& tc, const BoxGeometry& geo) {
  check_species_mu(species, tc.mu);
  const double V = geo.volume();
  const double T = tc.temperature();
  StateFunctions out;
  out.N = bulk_density(species, tc) * V;
  out.P = bulk_pressure(species, tc);
  out.U = 1.5 * out.P * V;
  const int d = bec_dimension(geo.regime);
  if (species == Species::bose && d >= 0) {
    const double p_total = pressure_bec(d, tc, geo);
    const double p_bulk = polylog(2.5, std::exp(-clamped_minus_beta_mu(tc.beta * tc.mu))) /
                          (tc.beta * std::pow(tc.lambda_T(), 3));
    out.N_condensate = condensate_count(d, tc, geo);
    out.N += out.N_condensate;
    out.U += 0.5 * d * (p_total - p_bulk) * V;
    out.P += p_total - p_bulk;
  }
  out.lnZ = tc.beta * out.P * V;
  out.S = (out.U + out.P * V - tc.mu * out.N) / T;
  return out;
}

double mu_bec_asymptotic(int d, double f, double rho, const ThermoConditions& tc, const BoxGeometry& geo) {
  if (!(f > 0.0)) throw DomainError("condensate fraction must be positive");
  const double lam = tc.lambda_T();
  double x = 0.0;  // -beta mu
  switch (d) {
    case 0: x = 1.0 / (f * rho * geo.volume()); break;
    case 1: {
      const double g = f * rho * geo.Ly * geo.Lz * lam;
      x = std::numbers::pi / (g * g);
      break;
    }
    case 2: x = std::exp(-f * rho * geo.Lz * lam * lam); break;
    default: throw DomainError("condensate dimension must be 0, 1 or 2");
  }
  return -std::max(x, kMinMinusBetaMu) / tc.beta;
}

std::vector<std::string> regime_warnings(const BoxGeometry& geo, const PhaseThresholds& th) {
  std::vector<std::string> out;
  const bool two_d = geo.Ly >= th.poly_coeff * std::exp(std::min(th.alpha * geo.Lz, 700.0));
  const bool one_d = geo.Lx >= th.alpha_prime * geo.Ly * geo.Lz;
  std::ostringstream msg;
  switch (geo.regime) {
    case Anisotropy::quasi_2d:
      if (!two_d) msg << "quasi-2D box has Ly < poly_coeff * exp(alpha * Lz)";
      break;
    case Anisotropy::quasi_1d:
      if (!one_d) msg << "quasi-1D box has Lx < alpha' * Ly * Lz";
      break;
    case Anisotropy::isotropic_0d:
      if (one_d || two_d) msg << "isotropic box also satisfies a lower-dimensional condensate condition";
      break;
    case Anisotropy::continuum: break;
  }
  if (!msg.str().empty()) out.push_back(msg.str());
  return out;
}

MuSolution solve_mu(Species species, double beta, double rho, const BoxGeometry& geo,
                    const PhaseThresholds& thresholds, const UnitSystem& units) {
  if (!(rho > 0.0)) throw DomainError("density must be positive");
  const double lam3 = std::pow(thermal_wavelength(beta, units), 3);
  MuSolution out;
  PhaseReport& ph = out.phase;
  ph.rho = rho;
  ph.rho_c = critical_density(beta, units);
  ph.T_c = critical_temperature(rho, units);
  const double y = lam3 * rho;
  switch (species) {
    case Species::classical:
      out.mu = std::log(y) / beta;
      return out;
    case Species::fermi:
      out.mu = std::log(-polylog_inverse_3_2(-y)) / beta;
      return out;
    case Species::bose: break;
  }
  if (rho < ph.rho_c) {
    out.mu = std::log(polylog_inverse_3_2(y)) / beta;
    return out;
  }
  ph.f = 1.0 - ph.rho_c / rho;
  const ThermoConditions tc{beta, 0.0, units};
  const int d = bec_dimension(geo.regime);
  ph.warnings = regime_warnings(geo, thresholds);
  if (d < 0 || ph.f == 0.0) {
    ph.bec_dim = ph.f > 0.0 ? BecDim::d0 : BecDim::none;
    out.mu = -kMinMinusBetaMu / beta;
    return out;
  }
  ph.bec_dim = static_cast<BecDim>(d);
  out.mu = mu_bec_asymptotic(d, ph.f, rho, tc, geo);
  return out;
}

double classicality_ratio(double N, double V, double K, const UnitSystem& u) {
  if (!(N > 0.0) || !(V > 0.0) || !(K > 0.0)) throw DomainError("classicality_ratio: arguments must be positive");
  return N / (V * std::pow(2.0 * u.mass * K / (u.hbar * u.hbar * N), 1.5));
}

}  // namespace qtce
