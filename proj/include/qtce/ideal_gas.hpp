#pragma once

// Grandcanonical ideal Bose and Fermi gases in a box, with the finite-size
// condensates that appear in strongly anisotropic boxes.

#include <string>
#include <vector>

namespace qtce {

enum class Species { bose, fermi, classical };

struct UnitSystem {
  double hbar = 1.0;
  double mass = 1.0;
  double k_B = 1.0;
};

struct ThermoConditions {
  double beta = 1.0;
  double mu = 0.0;
  UnitSystem units{};

  double lambda_T() const;
  double fugacity() const;
  double temperature() const;
  static ThermoConditions from_fugacity(double beta, double z, UnitSystem units = {});
};

// Which condensate the box supports once the density exceeds rho_c.
// `continuum` keeps only the bulk polylog terms.
enum class Anisotropy { continuum, isotropic_0d, quasi_1d, quasi_2d };

struct BoxGeometry {
  double Lx = 1.0;
  double Ly = 1.0;
  double Lz = 1.0;
  Anisotropy regime = Anisotropy::continuum;
  double chi = 1.0;  // Lx ~ (Ly Lz)^chi in quasi-1D boxes

  double volume() const { return Lx * Ly * Lz; }
  void validate() const;
  static BoxGeometry cube(double V, Anisotropy regime = Anisotropy::continuum);
};

struct StateFunctions {
  double N = 0.0;
  double U = 0.0;
  double P = 0.0;
  double S = 0.0;
  double lnZ = 0.0;
  double N_condensate = 0.0;
};

enum class BecDim { none = -1, d0 = 0, d1 = 1, d2 = 2 };

struct PhaseReport {
  double rho = 0.0;
  double rho_c = 0.0;
  double T_c = 0.0;
  double f = 0.0;
  BecDim bec_dim = BecDim::none;
  std::vector<std::string> warnings;
};

struct PhaseThresholds {
  double alpha = 1.0;
  double alpha_prime = 1.0;
  double poly_coeff = 1.0;
};

struct MuSolution {
  double mu = 0.0;
  PhaseReport phase;
};

// Smallest -beta mu used before taking logarithms.
inline constexpr double kMinMinusBetaMu = 1e-15;

double thermal_wavelength(double beta, const UnitSystem& units = {});
double critical_density(double beta, const UnitSystem& units = {});
double critical_temperature(double rho, const UnitSystem& units = {});

/// Bulk density and pressure, without any condensate term.
double bulk_density(Species species, const ThermoConditions& tc);
double bulk_pressure(Species species, const ThermoConditions& tc);

StateFunctions state_functions(Species species, const ThermoConditions& tc, const BoxGeometry& geo);

MuSolution solve_mu(Species species, double beta, double rho, const BoxGeometry& geo,
                    const PhaseThresholds& thresholds = {}, const UnitSystem& units = {});

/// Condensate chemical potential for a d-dimensional BEC with fraction f.
double mu_bec_asymptotic(int d, double f, double rho, const ThermoConditions& tc, const BoxGeometry& geo);

/// Particles held by the d-dimensional condensate at chemical potential tc.mu
/// (inverse of mu_bec_asymptotic).
double condensate_count(int d, const ThermoConditions& tc, const BoxGeometry& geo);

/// Bulk pressure plus the d-dimensional condensate pressure.
double pressure_bec(int d, const ThermoConditions& tc, const BoxGeometry& geo);

double classicality_ratio(double N, double V, double K, const UnitSystem& units = {});

/// Human-readable notes when the box does not satisfy the declared regime.
std::vector<std::string> regime_warnings(const BoxGeometry& geo, const PhaseThresholds& thresholds);

int bec_dimension(Anisotropy regime);

}  // namespace qtce
