#pragma once

// Reversible isothermal chemical cycles: four strokes at fixed temperature,
// each keeping one of mu, N or V constant.

#include <array>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "qtce/ideal_gas.hpp"
#include "qtce/vdw_gas.hpp"

namespace qtce {

enum class StrokeKind { iso_T_mu, iso_T_N, iso_T_V };

struct Substance {
  Species species = Species::fermi;
  std::optional<VdwParams> vdw;  // classical species selects the classical vdW gas
};

// Box shape as a function of volume: L_i = L_i(ref) * (V / V_ref)^e_i with
// e_x + e_y + e_z = 1.
struct GeometryRule {
  BoxGeometry reference = BoxGeometry::cube(1.0);
  double ex = 1.0 / 3.0;
  double ey = 1.0 / 3.0;
  double ez = 1.0 / 3.0;

  BoxGeometry at(double V) const;
};

inline constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

// Exactly two of the three targets are set.
struct Endpoint {
  double mu = kUnset;
  double N = kUnset;
  double V = kUnset;
};

struct StrokeSpec {
  StrokeKind kind = StrokeKind::iso_T_N;
  Endpoint start;
  Endpoint end;
};

struct CycleSpec {
  Substance substance;
  double beta = 1.0;
  UnitSystem units;
  GeometryRule geometry;
  std::array<StrokeSpec, 4> strokes;
  int samples = 200;  // per stroke, for P-V sampling
};

struct StatePoint {
  double mu = 0.0;
  double N = 0.0;
  double V = 0.0;
  double P = 0.0;
  double U = 0.0;
  double S = 0.0;
  BoxGeometry geo;
};

struct StrokeEnergy {
  double WM = 0.0;
  double WC = 0.0;
  double Q = 0.0;
  double dU = 0.0;
};

struct EnergyLedger {
  std::array<StatePoint, 4> states;  // state at the start of each stroke
  std::array<StrokeEnergy, 4> strokes;
  StrokeEnergy total;
  double W_in = 0.0;
  double W_out = 0.0;
  double eta_rev = std::numeric_limits<double>::quiet_NaN();
  double load_per_volume = 0.0;
  double v = 0.0;        // V_3 / V_1
  double r = std::numeric_limits<double>::quiet_NaN();        // L_x3 / L_x1 = v^r
  double r_prime = std::numeric_limits<double>::quiet_NaN();  // (L_x L_y)_3 / (L_x L_y)_1 = v^r'
};

/// Equilibrium state for two of (mu, N, V); the box follows the geometry rule.
StatePoint resolve_state(const Substance& sub, double beta, const Endpoint& target,
                         const GeometryRule& geometry = {}, const UnitSystem& units = {});

StrokeEnergy stroke_energy(StrokeKind kind, const StatePoint& initial, const StatePoint& final, double T);

/// Throws ClosureError when consecutive strokes do not share endpoints.
EnergyLedger run_cycle(const CycleSpec& spec);

/// Stroke 1 releases particles at mu1 (N1 -> N3), stroke 3 injects them at mu3.
CycleSpec make_carnot(const Substance& sub, double beta, double mu1, double mu3, double N1, double N3,
                      const GeometryRule& geometry = {}, const UnitSystem& units = {});

/// Particle exchange at fixed V1 and V3, volume change at fixed N3 and N1.
CycleSpec make_otto(const Substance& sub, double beta, double N1, double N3, double V1, double V3,
                    const GeometryRule& geometry = {}, const UnitSystem& units = {});

struct EfficiencySplit {
  double W_in = 0.0;
  double W_out = 0.0;
  double eta = std::numeric_limits<double>::quiet_NaN();
};

/// Heaviside partition of chemical works with Theta(0) = 0.
EfficiencySplit split_chemical_work(std::span<const double> WC);

struct CarnotClosedForm {
  double W_in = 0.0;
  double W_out = 0.0;
  double eta = 0.0;
  double load_per_volume = 0.0;  // W^M / V1
};

CarnotClosedForm carnot_closed_form(double mu1, double mu3, double N1, double N2, double N3, double N4,
                                    double rho1);

struct ChemicalWorkPair {
  double W1 = 0.0;
  double W3 = 0.0;
};

/// Chemical work of the Otto particle-exchange strokes without condensate,
/// with rho1 = v rho4, rho2 = v rho3 and V1 = V3 / v.
ChemicalWorkPair otto_chemical_work(Species species, double beta, double rho3, double rho4, double v,
                                    double V3, const UnitSystem& units = {});

struct OttoBecGeometry {
  double V1 = 0.0;
  double V3 = 0.0;
  double Lx1 = 0.0;
  double Lx3 = 0.0;
  double Lz1 = 0.0;
  double Lz3 = 0.0;
};

/// Otto chemical work with a d-dimensional condensate in every state.
ChemicalWorkPair otto_bec_chemical_work(int d, double beta, const std::array<double, 4>& rho,
                                        const OttoBecGeometry& geo, const UnitSystem& units = {});

/// Carnot efficiency with a d1-dimensional condensate in stroke 1 and a
/// d3-dimensional one in stroke 3. d3 < d1 gives the large-box limit 1.
double carnot_bec_efficiency(int d1, int d3, double beta, double N2, const BoxGeometry& geo2,
                             const BoxGeometry& geo3, const UnitSystem& units = {});

struct PvPoint {
  int stroke = 0;
  double V_over_lambda3 = 0.0;
  double beta_P_lambda3 = 0.0;
};

struct PvDiagram {
  std::vector<PvPoint> points;
  double enclosed_area = 0.0;  // closed-loop integral of (beta P lambda^3) d(V / lambda^3) = beta W^M
};

/// Samples every stroke at `samples` points, geometric in z for iso-T-V
/// strokes and in V otherwise.
PvDiagram pv_diagram(const CycleSpec& spec, int samples);

}  // namespace qtce
