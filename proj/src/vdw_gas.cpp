#include "qtce/vdw_gas.hpp"

#include <algorithm>
#include <cmath>

#include "qtce/errors.hpp"
#include "qtce/specfun.hpp"

namespace qtce {
namespace {

constexpr double kZeta32 = 2.612375348685488343348567567924071630571;
constexpr double kMuTol = 1e-11;

struct Ideal {
  double P, rho;
};

Ideal ideal_at(Species species, double beta, double mu_prime, const UnitSystem& units) {
  const ThermoConditions tc{beta, mu_prime, units};
  return {bulk_pressure(species, tc), bulk_density(species, tc)};
}

}  // namespace

ClassicalVdw classical_vdw(double rho, double T, const VdwParams& p, const UnitSystem& units) {
  if (!(rho > 0.0) || !(T > 0.0)) throw DomainError("classical_vdw: rho and T must be positive");
  const double x = p.b * rho;
  if (!(x < 1.0)) throw DomainError("classical_vdw: requires b rho < 1");
  const double kT = units.k_B * T;
  const double lam = thermal_wavelength(1.0 / kT, units);
  ClassicalVdw out;
  out.P = rho * kT / (1.0 - x) - p.a * rho * rho;
  out.mu = kT * std::log(lam * lam * lam * rho) - kT * std::log1p(-x) + kT * x / (1.0 - x) - 2.0 * p.a * rho;
  return out;
}

double quantum_vdw_critical_density(double beta, const VdwParams& p, const UnitSystem& units) {
  if (p.b < 0.0) throw DomainError("quantum_vdw_critical_density: b must be >= 0");
  const double rho_c = kZeta32 / std::pow(thermal_wavelength(beta, units), 3);
  return rho_c / (1.0 + p.b * rho_c);
}

QuantumVdw quantum_vdw_state(Species species, double beta, double mu, const VdwParams& p,
                             const UnitSystem& units) {
  // residual F(mu') = mu' + b P_id(mu') - 2 a rho(mu') - mu
  auto residual = [&](double mp) {
    const Ideal id = ideal_at(species, beta, mp, units);
    const double rho = id.rho / (1.0 + p.b * id.rho);
    return mp + p.b * id.P - 2.0 * p.a * rho - mu;
  };
  auto finish = [&](double mp) {
    const Ideal id = ideal_at(species, beta, mp, units);
    QuantumVdw out;
    out.mu_prime = mp;
    out.rho = id.rho / (1.0 + p.b * id.rho);
    out.P = id.P - p.a * out.rho * out.rho;
    return out;
  };
  const double upper_cap = species == Species::bose ? 0.0 : INFINITY;

  // damped fixed point
  double mp = std::min(mu, upper_cap);
  for (int it = 0; it < 200; ++it) {
    const Ideal id = ideal_at(species, beta, mp, units);
    const double rho = id.rho / (1.0 + p.b * id.rho);
    const double target = mu - p.b * id.P + 2.0 * p.a * rho;
    double next = 0.5 * mp + 0.5 * target;
    if (next > upper_cap) break;
    if (std::abs(next - mp) <= kMuTol) return finish(next);
    mp = next;
    if (!std::isfinite(mp)) break;
  }

  // bisection fallback on [lo, hi]
  double lo = std::min(mu, 0.0) - 1.0 / beta;
  for (int it = 0; residual(lo) > 0.0; ++it) {
    if (it > 60) throw ConvergenceError("quantum_vdw_state: no lower bracket");
    lo -= 2.0 * (std::abs(lo) + 1.0 / beta);
  }
  double hi = 0.0;
  if (species == Species::bose) {
    if (residual(0.0) < 0.0) throw ConvergenceError("quantum_vdw_state: no solution with mu' <= 0 (condensed)");
  } else {
    hi = std::max(mu, 0.0) + 1.0 / beta;
    for (int it = 0; residual(hi) < 0.0; ++it) {
      if (it > 60) throw ConvergenceError("quantum_vdw_state: no upper bracket");
      hi += 2.0 * (std::abs(hi) + 1.0 / beta);
    }
  }
  for (int it = 0; it < 400 && hi - lo > kMuTol; ++it) {
    const double mid = 0.5 * (lo + hi);
    (residual(mid) < 0.0 ? lo : hi) = mid;
  }
  if (hi - lo > kMuTol) throw ConvergenceError("quantum_vdw_state: bisection did not converge");
  return finish(0.5 * (lo + hi));
}

double quantum_vdw_solve_mu(Species species, double beta, double rho, const VdwParams& p,
                            const UnitSystem& units) {
  if (!(rho > 0.0) || !(p.b * rho < 1.0)) throw DomainError("quantum_vdw_solve_mu: requires 0 < b rho < 1");
  const double rho_id = rho / (1.0 - p.b * rho);
  const double mu_prime = solve_mu(species, beta, rho_id, BoxGeometry{}, {}, units).mu;
  const Ideal id = ideal_at(species, beta, mu_prime, units);
  return mu_prime + p.b * id.P - 2.0 * p.a * rho;
}

StateFunctions quantum_vdw_state_functions(Species species, const ThermoConditions& tc, double V,
                                           const VdwParams& p) {
  const QuantumVdw st = quantum_vdw_state(species, tc.beta, tc.mu, p, tc.units);
  const double T = tc.temperature();
  const double h = 1e-5 * T;
  auto pressure_at = [&](double temp) {
    return quantum_vdw_state(species, 1.0 / (tc.units.k_B * temp), tc.mu, p, tc.units).P;
  };
  StateFunctions out;
  out.P = st.P;
  out.N = st.rho * V;
  out.S = V * (pressure_at(T + h) - pressure_at(T - h)) / (2.0 * h);
  out.U = T * out.S - out.P * V + tc.mu * out.N;
  out.lnZ = tc.beta * out.P * V;
  return out;
}

}  // namespace qtce
