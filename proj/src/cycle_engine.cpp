#include "qtce/cycle_engine.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qtce/errors.hpp"
#include "qtce/specfun.hpp"

namespace qtce {
namespace {

constexpr double kClosureTol = 1e-9;
constexpr double kZeta32 = 2.612375348685488343348567567924071630571;

bool is_set(double x) { return !std::isnan(x); }

bool close_rel(double a, double b, double tol, double scale = 0.0) {
  return std::abs(a - b) <= tol * std::max({std::abs(a), std::abs(b), scale});
}

bool bec_geometry(const Substance& sub, const BoxGeometry& geo) {
  return !sub.vdw && sub.species == Species::bose && bec_dimension(geo.regime) >= 0;
}

StatePoint from_functions(double mu, double V, const BoxGeometry& geo, const StateFunctions& sf) {
  return {mu, sf.N, V, sf.P, sf.U, sf.S, geo};
}

// Pins N to the requested count and keeps S = (U + PV - mu N) / T.
void pin_count(StatePoint& st, double N, double T) {
  st.N = N;
  st.S = (st.U + st.P * st.V - st.mu * st.N) / T;
}

StatePoint classical_vdw_state(double rho, double V, const BoxGeometry& geo, double beta, const VdwParams& p,
                               const UnitSystem& units) {
  const double T = 1.0 / (units.k_B * beta);
  const ClassicalVdw c = classical_vdw(rho, T, p, units);
  StatePoint st{c.mu, rho * V, V, c.P, 0.0, 0.0, geo};
  st.U = 1.5 * st.N / beta - p.a * rho * st.N;
  st.S = (st.U + st.P * V - st.mu * st.N) / T;
  return st;
}

// Density of the classical vdW gas at chemical potential mu, by bisection in
// ln(b rho) on (0, 1).
double classical_vdw_density(double mu, double beta, const VdwParams& p, const UnitSystem& units) {
  if (!(p.b > 0.0)) throw DomainError("classical vdW at fixed mu needs b > 0");
  const double T = 1.0 / (units.k_B * beta);
  double lo = -700.0, hi = std::log1p(-1e-15);
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    (classical_vdw(std::exp(mid) / p.b, T, p, units).mu < mu ? lo : hi) = mid;
  }
  return std::exp(0.5 * (lo + hi)) / p.b;
}

StatePoint state_at_mu(const Substance& sub, double beta, double mu, const BoxGeometry& geo,
                       const UnitSystem& units) {
  const double V = geo.volume();
  const ThermoConditions tc{beta, mu, units};
  if (sub.vdw) {
    if (sub.species == Species::classical)
      return classical_vdw_state(classical_vdw_density(mu, beta, *sub.vdw, units), V, geo, beta, *sub.vdw, units);
    return from_functions(mu, V, geo, quantum_vdw_state_functions(sub.species, tc, V, *sub.vdw));
  }
  return from_functions(mu, V, geo, state_functions(sub.species, tc, geo));
}

// Condensed ideal bosons: -beta mu chosen so that bulk plus condensate hold N.
StatePoint bose_condensed_at_count(double beta, double N, const BoxGeometry& geo, const UnitSystem& units) {
  auto count = [&](double ln_x) {
    return state_functions(Species::bose, {beta, -std::exp(ln_x) / beta, units}, geo).N;
  };
  double lo = std::log(kMinMinusBetaMu);
  if (count(lo) < N)
    throw DomainError("condensate cannot hold N particles in this box at -beta mu >= 1e-15");
  double hi = 0.0;
  for (int it = 0; count(hi) > N; ++it) {
    if (it > 20) throw ConvergenceError("no upper bracket for the condensed chemical potential");
    hi += 1.0;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
    const double mid = 0.5 * (lo + hi);
    (count(mid) > N ? lo : hi) = mid;
  }
  return state_at_mu({Species::bose, std::nullopt}, beta, -std::exp(0.5 * (lo + hi)) / beta, geo, units);
}

StatePoint state_at_count(const Substance& sub, double beta, double N, const BoxGeometry& geo,
                          const UnitSystem& units) {
  const double V = geo.volume();
  const double rho = N / V;
  if (sub.vdw) {
    if (sub.species == Species::classical) return classical_vdw_state(rho, V, geo, beta, *sub.vdw, units);
    return state_at_mu(sub, beta, quantum_vdw_solve_mu(sub.species, beta, rho, *sub.vdw, units), geo, units);
  }
  if (bec_geometry(sub, geo)) return bose_condensed_at_count(beta, N, geo, units);
  if (sub.species == Species::bose && rho >= critical_density(beta, units))
    throw DomainError("bosonic density at or above rho_c needs a condensate geometry");
  const double mu = solve_mu(sub.species, beta, rho, BoxGeometry{}, {}, units).mu;
  return state_at_mu(sub, beta, mu, geo, units);
}

double volume_for(const Substance& sub, double beta, double mu, double N, const GeometryRule& rule,
                  const UnitSystem& units) {
  if (!bec_geometry(sub, rule.reference)) {
    const double rho = state_at_mu(sub, beta, mu, rule.at(1.0), units).N;
    if (!(rho > 0.0)) throw DomainError("density at this chemical potential is not positive");
    return N / rho;
  }
  auto count = [&](double ln_V) { return state_at_mu(sub, beta, mu, rule.at(std::exp(ln_V)), units).N; };
  double hi = std::log(N / bulk_density(Species::bose, {beta, mu, units}));
  double lo = hi;
  for (int it = 0; count(lo) > N; ++it) {
    if (it > 200) throw DomainError("no box volume holds N particles at this chemical potential");
    lo -= std::numbers::ln2;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    (count(mid) < N ? lo : hi) = mid;
  }
  return std::exp(0.5 * (lo + hi));
}

struct Resolved {
  StatePoint start, end;
};

void check_kind(const StrokeSpec& s, int j) {
  auto fail = [&](const char* what) {
    throw DomainError("stroke " + std::to_string(j + 1) + ": " + what);
  };
  switch (s.kind) {
    case StrokeKind::iso_T_mu:
      if (!is_set(s.start.mu) || s.start.mu != s.end.mu) fail("iso-T-mu stroke needs equal mu at both ends");
      break;
    case StrokeKind::iso_T_N:
      if (!is_set(s.start.N) || s.start.N != s.end.N) fail("iso-T-N stroke needs equal N at both ends");
      break;
    case StrokeKind::iso_T_V:
      if (!is_set(s.start.V) || s.start.V != s.end.V) fail("iso-T-V stroke needs equal V at both ends");
      break;
  }
}

std::array<Resolved, 4> resolve_strokes(const CycleSpec& spec) {
  if (!(spec.beta > 0.0)) throw DomainError("beta must be positive");
  std::array<Resolved, 4> out;
  for (int j = 0; j < 4; ++j) {
    check_kind(spec.strokes[j], j);
    out[j].start = resolve_state(spec.substance, spec.beta, spec.strokes[j].start, spec.geometry, spec.units);
    out[j].end = resolve_state(spec.substance, spec.beta, spec.strokes[j].end, spec.geometry, spec.units);
  }
  for (int j = 0; j < 4; ++j) {
    const StatePoint& a = out[j].end;
    const StatePoint& b = out[(j + 1) % 4].start;
    const double mu_scale = 1.0 / (spec.units.k_B * spec.beta);
    if (!close_rel(a.mu, b.mu, kClosureTol, mu_scale) || !close_rel(a.N, b.N, kClosureTol) ||
        !close_rel(a.V, b.V, kClosureTol))
      throw ClosureError("stroke " + std::to_string(j + 1) + " does not end where stroke " +
                         std::to_string((j + 1) % 4 + 1) + " starts");
  }
  return out;
}

// Integral of y dx around the closed polyline.
double loop_integral(const std::vector<PvPoint>& pts) {
  double area = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const PvPoint& a = pts[i];
    const PvPoint& b = pts[(i + 1) % pts.size()];
    area += 0.5 * (a.beta_P_lambda3 + b.beta_P_lambda3) * (b.V_over_lambda3 - a.V_over_lambda3);
  }
  return area;
}

}  // namespace

BoxGeometry GeometryRule::at(double V) const {
  if (!(V > 0.0)) throw DomainError("volume must be positive");
  if (std::abs(ex + ey + ez - 1.0) > 1e-12) throw DomainError("geometry exponents must sum to 1");
  const double s = V / reference.volume();
  BoxGeometry g = reference;
  g.Lx = reference.Lx * std::pow(s, ex);
  g.Ly = reference.Ly * std::pow(s, ey);
  g.Lz = reference.Lz * std::pow(s, ez);
  return g;
}

StatePoint resolve_state(const Substance& sub, double beta, const Endpoint& target, const GeometryRule& geometry,
                         const UnitSystem& units) {
  const int given = is_set(target.mu) + is_set(target.N) + is_set(target.V);
  if (given != 2) throw DomainError("an endpoint needs exactly two of mu, N, V");
  if (is_set(target.N) && !(target.N > 0.0)) throw DomainError("particle number must be positive");
  const double T = 1.0 / (units.k_B * beta);
  if (!is_set(target.V)) {
    const double V = volume_for(sub, beta, target.mu, target.N, geometry, units);
    StatePoint st = state_at_mu(sub, beta, target.mu, geometry.at(V), units);
    pin_count(st, target.N, T);
    return st;
  }
  const BoxGeometry geo = geometry.at(target.V);
  if (is_set(target.mu)) return state_at_mu(sub, beta, target.mu, geo, units);
  StatePoint st = state_at_count(sub, beta, target.N, geo, units);
  pin_count(st, target.N, T);
  return st;
}

StrokeEnergy stroke_energy(StrokeKind kind, const StatePoint& i, const StatePoint& f, double T) {
  StrokeEnergy e;
  e.Q = T * (f.S - i.S);
  switch (kind) {
    case StrokeKind::iso_T_mu:
      e.WC = -i.mu * (f.N - i.N);
      e.WM = f.P * f.V - i.P * i.V;
      break;
    case StrokeKind::iso_T_N:
      e.WC = 0.0;
      e.WM = f.P * f.V - i.P * i.V - (f.mu - i.mu) * i.N;
      break;
    case StrokeKind::iso_T_V:
      e.WM = 0.0;
      e.WC = (f.P - i.P) * i.V - f.mu * f.N + i.mu * i.N;
      break;
  }
  e.dU = f.U - i.U;
  return e;
}

EfficiencySplit split_chemical_work(std::span<const double> WC) {
  EfficiencySplit out;
  for (double w : WC) {
    if (w < 0.0) out.W_in -= w;
    if (w > 0.0) out.W_out += w;
  }
  if (out.W_in > 0.0) out.eta = 1.0 - out.W_out / out.W_in;
  return out;
}

EnergyLedger run_cycle(const CycleSpec& spec) {
  const auto res = resolve_strokes(spec);
  const double T = 1.0 / (spec.units.k_B * spec.beta);
  EnergyLedger led;
  std::array<double, 4> wc{};
  double max_V = 0.0;
  for (int j = 0; j < 4; ++j) {
    led.states[j] = res[j].start;
    led.strokes[j] = stroke_energy(spec.strokes[j].kind, res[j].start, res[j].end, T);
    const StrokeEnergy& e = led.strokes[j];
    led.total.WM += e.WM;
    led.total.WC += e.WC;
    led.total.Q += e.Q;
    led.total.dU += e.dU;
    wc[j] = e.WC;
    max_V = std::max({max_V, res[j].start.V, res[j].end.V});
  }
  const EfficiencySplit split = split_chemical_work(wc);
  led.W_in = split.W_in;
  led.W_out = split.W_out;
  led.eta_rev = split.eta;
  led.load_per_volume = led.total.WM / max_V;

  const StatePoint& s1 = led.states[0];
  const StatePoint& s3 = led.states[2];
  led.v = s3.V / s1.V;
  if (led.v != 1.0) {
    const double lv = std::log(led.v);
    led.r = std::log(s3.geo.Lx / s1.geo.Lx) / lv;
    led.r_prime = std::log(s3.geo.Lx * s3.geo.Ly / (s1.geo.Lx * s1.geo.Ly)) / lv;
  }
  return led;
}

CycleSpec make_carnot(const Substance& sub, double beta, double mu1, double mu3, double N1, double N3,
                      const GeometryRule& geometry, const UnitSystem& units) {
  CycleSpec c{sub, beta, units, geometry, {}, 200};
  c.strokes[0] = {StrokeKind::iso_T_mu, {mu1, N1, kUnset}, {mu1, N3, kUnset}};
  c.strokes[1] = {StrokeKind::iso_T_N, {mu1, N3, kUnset}, {mu3, N3, kUnset}};
  c.strokes[2] = {StrokeKind::iso_T_mu, {mu3, N3, kUnset}, {mu3, N1, kUnset}};
  c.strokes[3] = {StrokeKind::iso_T_N, {mu3, N1, kUnset}, {mu1, N1, kUnset}};
  return c;
}

CycleSpec make_otto(const Substance& sub, double beta, double N1, double N3, double V1, double V3,
                    const GeometryRule& geometry, const UnitSystem& units) {
  CycleSpec c{sub, beta, units, geometry, {}, 200};
  c.strokes[0] = {StrokeKind::iso_T_V, {kUnset, N1, V1}, {kUnset, N3, V1}};
  c.strokes[1] = {StrokeKind::iso_T_N, {kUnset, N3, V1}, {kUnset, N3, V3}};
  c.strokes[2] = {StrokeKind::iso_T_V, {kUnset, N3, V3}, {kUnset, N1, V3}};
  c.strokes[3] = {StrokeKind::iso_T_N, {kUnset, N1, V3}, {kUnset, N1, V1}};
  return c;
}

CarnotClosedForm carnot_closed_form(double mu1, double mu3, double N1, double N2, double N3, double N4,
                                    double rho1) {
  if (!close_rel(N2, N3, 1e-12) || !close_rel(N4, N1, 1e-12))
    throw DomainError("Carnot cycle needs N2 = N3 and N4 = N1");
  if (!(N3 < N1)) throw DomainError("Carnot cycle needs particle release in stroke 1 (N3 < N1)");
  CarnotClosedForm out;
  if (mu1 < 0.0 && mu3 < 0.0) {
    out.W_in = mu1 * (N2 - N1);
    out.W_out = mu3 * (N3 - N4);
    out.eta = 1.0 - mu3 / mu1;
  } else if (mu1 >= 0.0 && mu3 > 0.0) {
    out.W_in = mu3 * (N4 - N3);
    out.W_out = mu1 * (N1 - N2);
    out.eta = 1.0 - mu1 / mu3;
  } else if (mu1 < 0.0 && mu3 >= 0.0) {
    out.W_in = mu1 * (N2 - N1) + mu3 * (N4 - N3);
    out.W_out = 0.0;
    out.eta = 1.0;
  } else {
    throw DegenerateError("no chemical work is absorbed for mu1 >= 0 and mu3 <= 0");
  }
  out.load_per_volume = (mu3 - mu1) * (1.0 - N3 / N1) * rho1;
  return out;
}

ChemicalWorkPair otto_chemical_work(Species species, double beta, double rho3, double rho4, double v, double V3,
                                    const UnitSystem& units) {
  if (!(v > 0.0) || !(V3 > 0.0) || !(rho3 > 0.0) || !(rho4 > 0.0))
    throw DomainError("otto_chemical_work: v, V3 and densities must be positive");
  const double lam3 = std::pow(thermal_wavelength(beta, units), 3);
  const std::array<double, 4> y{lam3 * v * rho4, lam3 * v * rho3, lam3 * rho3, lam3 * rho4};
  if (species == Species::bose && *std::max_element(y.begin(), y.end()) > kZeta32)
    throw DomainError("bosonic density above rho_c: use the condensate closed forms");
  // beta lambda^3 (P - mu rho) as a function of lambda^3 rho
  auto g = [&](double yy) {
    switch (species) {
      case Species::bose: {
        const double z = polylog_inverse_3_2(yy);
        return polylog(2.5, z) - yy * std::log(z);
      }
      case Species::fermi: {
        const double z = -polylog_inverse_3_2(-yy);
        return -polylog(2.5, -z) - yy * std::log(z);
      }
      case Species::classical: break;
    }
    return yy - yy * std::log(yy);
  };
  const double V1 = V3 / v;
  return {V1 / (beta * lam3) * (g(y[1]) - g(y[0])), V3 / (beta * lam3) * (g(y[3]) - g(y[2]))};
}

ChemicalWorkPair otto_bec_chemical_work(int d, double beta, const std::array<double, 4>& rho,
                                        const OttoBecGeometry& geo, const UnitSystem& units) {
  const double rc = critical_density(beta, units);
  for (double r : rho)
    if (!(r > rc)) throw DomainError("otto_bec_chemical_work: every density must exceed rho_c");
  const double lam2 = std::pow(thermal_wavelength(beta, units), 2);
  const auto [r1, r2, r3, r4] = rho;
  switch (d) {
    case 0: return {std::log((r2 - rc) / (r1 - rc)) / beta, std::log((r4 - rc) / (r3 - rc)) / beta};
    case 1: {
      const double c1 = std::numbers::pi * geo.Lx1 * geo.Lx1 / (beta * lam2 * geo.V1);
      const double c3 = std::numbers::pi * geo.Lx3 * geo.Lx3 / (beta * lam2 * geo.V3);
      return {c1 * (r2 - r1) / ((r2 - rc) * (r1 - rc)), c3 * (r4 - r3) / ((r3 - rc) * (r4 - rc))};
    }
    case 2: {
      const double k1 = lam2 * geo.Lz1, k3 = lam2 * geo.Lz3;
      return {geo.V1 / (beta * k1) * (std::exp((rc - r1) * k1) - std::exp((rc - r2) * k1)),
              geo.V3 / (beta * k3) * (std::exp((rc - r3) * k3) - std::exp((rc - r4) * k3))};
    }
    default: throw DomainError("condensate dimension must be 0, 1 or 2");
  }
}

double carnot_bec_efficiency(int d1, int d3, double beta, double N2, const BoxGeometry& geo2,
                             const BoxGeometry& geo3, const UnitSystem& units) {
  const double V2 = geo2.volume(), V3 = geo3.volume();
  if (V3 > V2) throw DomainError("carnot_bec_efficiency: stroke 2 must compress (V3 <= V2)");
  const double rc = critical_density(beta, units);
  const double f2 = N2 - rc * V2, f3 = N2 - rc * V3;
  if (!(f2 > 0.0)) throw DomainError("carnot_bec_efficiency: no condensate at state 2");
  if (d1 < 0 || d1 > 2 || d3 < 0 || d3 > 2) throw DomainError("condensate dimension must be 0, 1 or 2");
  if (d3 < d1) return 1.0;
  if (d3 > d1) throw DomainError("carnot_bec_efficiency: stroke 3 condensate of higher dimension");
  switch (d1) {
    case 0: return 1.0 - f2 / f3;
    case 1: {
      const double q = f2 * geo3.Lx / (f3 * geo2.Lx);
      return 1.0 - q * q;
    }
    default: {
      const double lam2 = std::pow(thermal_wavelength(beta, units), 2);
      const double rho2 = N2 / V2, rho3 = N2 / V3;
      return -std::expm1((rc - rho3) * geo3.Lz * lam2 - (rc - rho2) * geo2.Lz * lam2);
    }
  }
}

PvDiagram pv_diagram(const CycleSpec& spec, int samples) {
  if (samples < 2) throw DomainError("pv_diagram needs at least 2 samples per stroke");
  const auto res = resolve_strokes(spec);
  const double lam3 = std::pow(thermal_wavelength(spec.beta, spec.units), 3);
  const bool classical_vdw_gas = spec.substance.vdw && spec.substance.species == Species::classical;
  PvDiagram out;
  out.points.reserve(4 * static_cast<std::size_t>(samples));
  for (int j = 0; j < 4; ++j) {
    const StatePoint& a = res[j].start;
    const StatePoint& b = res[j].end;
    for (int k = 0; k < samples; ++k) {
      const double t = static_cast<double>(k) / (samples - 1);
      StatePoint st = k == 0 ? a : b;
      if (k != 0 && k != samples - 1) {
        Endpoint e;
        switch (spec.strokes[j].kind) {
          case StrokeKind::iso_T_mu: e = {a.mu, kUnset, a.V * std::pow(b.V / a.V, t)}; break;
          case StrokeKind::iso_T_N: e = {kUnset, a.N, a.V * std::pow(b.V / a.V, t)}; break;
          case StrokeKind::iso_T_V:
            // geometric in z is linear in mu; the classical vdW gas steps in N
            e = classical_vdw_gas ? Endpoint{kUnset, a.N * std::pow(b.N / a.N, t), a.V}
                                  : Endpoint{a.mu + t * (b.mu - a.mu), kUnset, a.V};
            break;
        }
        st = resolve_state(spec.substance, spec.beta, e, spec.geometry, spec.units);
      }
      out.points.push_back({j + 1, st.V / lam3, spec.beta * st.P * lam3});
    }
  }
  out.enclosed_area = loop_integral(out.points);
  return out;
}

}  // namespace qtce
