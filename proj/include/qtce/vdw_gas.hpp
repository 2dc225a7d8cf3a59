#pragma once

// Classical and quantum van der Waals gases.

#include "qtce/ideal_gas.hpp"

namespace qtce {

struct VdwParams {
  double a = 0.0;    // mean-field attraction (a > 0) or repulsion (a < 0)
  double b = 0.0;    // excluded volume per particle
  double phi = 0.0;  // potential energy scale, informational
};

struct ClassicalVdw {
  double P = 0.0;
  double mu = 0.0;
};

struct QuantumVdw {
  double P = 0.0;
  double rho = 0.0;
  double mu_prime = 0.0;
};

/// Throws DomainError unless 0 < b rho < 1 (rho > 0 when b = 0).
ClassicalVdw classical_vdw(double rho, double T, const VdwParams& p, const UnitSystem& units = {});

/// Solves mu' = mu - b P_id(mu') + 2 a rho with rho = rho_id / (1 + b rho_id).
/// Throws ConvergenceError when no admissible mu' is found.
QuantumVdw quantum_vdw_state(Species species, double beta, double mu, const VdwParams& p,
                             const UnitSystem& units = {});

double quantum_vdw_critical_density(double beta, const VdwParams& p, const UnitSystem& units = {});

/// State functions of the quantum vdW gas in volume V; S = V dP/dT at fixed mu.
StateFunctions quantum_vdw_state_functions(Species species, const ThermoConditions& tc, double V,
                                           const VdwParams& p);

/// Chemical potential of the quantum vdW gas at density rho.
double quantum_vdw_solve_mu(Species species, double beta, double rho, const VdwParams& p,
                            const UnitSystem& units = {});

}  // namespace qtce
