#include "qtce/irreversible.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include <boost/math/special_functions/ellint_2.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "qtce/errors.hpp"
#include "qtce/specfun.hpp"

namespace qtce {
namespace {

using std::numbers::pi;

constexpr double kSeriesTol = 1e-16;
constexpr long kSeriesMaxTerms = 2000;
constexpr double kZeta32 = 2.612375348685488343348567567924071630571;

double sqr(double x) { return x * x; }

double gk_integrate(auto f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 12, 1e-12);
}

// Terms of the gamma expansion with the constant kappa as the alpha = 0 entry.
std::vector<std::pair<double, double>> expansion(const BathSpec& bath) {
  std::vector<std::pair<double, double>> out{{bath.kappa, 0.0}};
  out.insert(out.end(), bath.terms.begin(), bath.terms.end());
  return out;
}

double series_integral(double a, double A, double beta, double mu) {
  const double r = std::exp(beta * (mu - A));
  const double scale = std::pow(beta, -(a + 1.0));
  double sum = 0.0;
  for (long j = 1; j <= kSeriesMaxTerms; ++j) {
    const double jd = static_cast<double>(j);
    const double term = std::exp(jd * beta * mu) * gamma_upper(a + 1.0, jd * beta * A) * std::pow(jd, -a) * scale;
    sum += term;
    const double tail = term * r / (1.0 - r);
    if (j > 2 && tail <= kSeriesTol * std::abs(sum)) return sum;
  }
  throw DivergenceError("prototypical_integral: image series does not meet its tail bound");
}

// int_A^inf eps^a (n^2 + n) in the variable u = ln(eps - mu), which spreads the
// peak at eps -> mu over a smooth range.
double quadrature_integral(double a, double A, double beta, double mu) {
  auto g = [&](double u) {
    const double x = std::exp(u);
    const double s = std::sinh(0.5 * beta * x);
    return std::pow(mu + x, a) * x / (4.0 * s * s);
  };
  const double u0 = std::log(A - mu);
  const double u1 = std::log(A - mu + 80.0 / beta);
  boost::math::quadrature::tanh_sinh<double> ts;
  return ts.integrate(g, u0, u1, 1e-13);
}

BecDim phase_of(const StatePoint& st, const Substance& sub, double beta, const UnitSystem& units) {
  if (sub.vdw || sub.species != Species::bose) return BecDim::none;
  const int d = bec_dimension(st.geo.regime);
  if (d < 0 || st.N / st.V <= critical_density(beta, units)) return BecDim::none;
  return static_cast<BecDim>(d);
}

void require_ideal_bose(const Substance& sub) {
  if (sub.vdw || sub.species != Species::bose)
    throw DomainError("irreversible corrections are available for the ideal Bose gas only");
}

double simpson(std::span<const double> f, double h) {
  const std::size_t n = f.size();
  double s = f.front() + f.back();
  for (std::size_t i = 1; i + 1 < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f[i];
  return s * h / 3.0;
}

}  // namespace

double BathSpec::gamma(double eps) const {
  switch (preset) {
    case BathPreset::lorentzian: return 1.0 / (kappa + decay * eps);
    case BathPreset::exponential: return std::exp(-decay * eps) / kappa;
    case BathPreset::constant: break;
  }
  double inv = kappa;
  for (const auto& [k, a] : terms) inv += k * std::pow(eps, a);
  return 1.0 / inv;
}

void BathSpec::validate() const {
  if (!(coupling_lambda > 0.0) || !std::isfinite(coupling_lambda)) throw DomainError("bath coupling must be positive");
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw DomainError("kappa must be positive and finite (gamma_0 finite)");
  for (const auto& [k, a] : terms) {
    if (!std::isfinite(k)) throw DomainError("kappa_j must be finite");
    if (!(a > 0.0)) throw DomainError("alpha_j must be positive");
  }
  if (decay < 0.0) throw DomainError("bath decay constant must be nonnegative");
}

BathSpec BathSpec::constant(double kappa, double coupling) {
  BathSpec b;
  b.kappa = kappa;
  b.coupling_lambda = coupling;
  return b;
}

BathSpec BathSpec::lorentzian(double kappa, double kappa_prime, double coupling) {
  BathSpec b = constant(kappa, coupling);
  b.preset = BathPreset::lorentzian;
  b.decay = kappa_prime;
  b.terms = {{kappa_prime, 1.0}};
  return b;
}

BathSpec BathSpec::exponential(double kappa, double kappa_prime, int order, double coupling) {
  BathSpec b = constant(kappa, coupling);
  b.preset = BathPreset::exponential;
  b.decay = kappa_prime;
  double c = kappa;
  for (int n = 1; n <= order; ++n) {
    c *= kappa_prime / n;
    b.terms.emplace_back(c, static_cast<double>(n));
  }
  return b;
}

double bath_occupation(double eps, const ThermoConditions& tc) {
  if (!(eps > tc.mu)) throw DomainError("bath_occupation: requires eps > mu");
  return 1.0 / std::expm1(tc.beta * (eps - tc.mu));
}

GeometryFactors geometry_factors(const BoxGeometry& geo) {
  const double zx = sqr(geo.Lz / geo.Lx), zy = sqr(geo.Lz / geo.Ly), yx = sqr(geo.Ly / geo.Lx);
  // u = cos(theta); the azimuthal integral is 4 sqrt(P) E(k) with k^2 = Q / P
  auto f = [&](double u) {
    const double s2 = 1.0 - u * u;
    const double P = u * u + zy * s2;
    const double Q = (zy - zx) * s2;
    return 4.0 * std::sqrt(P) * boost::math::ellint_2(std::sqrt(std::clamp(Q / P, 0.0, 1.0)));
  };
  // u = e sinh(w) resolves the kink of width e = L_z / L_y at u = 0
  const double e = std::sqrt(zy);
  auto g = [&](double w) { return f(e * std::sinh(w)) * e * std::cosh(w); };
  GeometryFactors out;
  out.C = 2.0 * gk_integrate(g, 0.0, std::asinh(1.0 / e));
  out.G = 4.0 * boost::math::ellint_2(std::sqrt(1.0 - yx));
  return out;
}

double energy_threshold(double L, double beta, const UnitSystem& units) {
  return sqr(thermal_wavelength(beta, units) / L) / beta;
}

double relaxation_time(double p, const BoxGeometry& geo, const BathSpec& bath, double beta, const UnitSystem& units) {
  const double eps = p * p / (2.0 * units.mass);
  if (eps < energy_threshold(geo.Lz, beta, units))
    throw DomainError("relaxation_time: momentum below the surface-regime threshold");
  const double C = geometry_factors(geo).C;
  const double h2 = sqr(units.hbar);
  return 4.0 * pi * pi * h2 * h2 / (sqr(bath.coupling_lambda) * bath.gamma(eps) * p * p * geo.Lx * geo.Ly * C);
}

double thermal_relaxation_time(const BoxGeometry& geo, const BathSpec& bath, double beta, const UnitSystem& units) {
  return relaxation_time(std::sqrt(2.0 * units.mass / beta), geo, bath, beta, units);
}

DriveCoefficients drive_coefficients(const DriveRates& r) {
  if (!(r.V > 0.0)) throw DomainError("drive_coefficients: volume must be positive");
  DriveCoefficients d;
  d.xi_tilde = r.beta / r.V * r.dV + r.dbeta;
  d.xi_mu = -r.mu * d.xi_tilde - r.beta * r.dmu;
  if (r.mu == 0.0) {
    d.singular = r.dmu != 0.0;
    d.xi = d.singular ? std::numeric_limits<double>::quiet_NaN() : -d.xi_tilde;
  } else {
    d.xi = d.xi_mu / r.mu;
  }
  return d;
}

double degenerate_gamma_sum(double p, const BoxGeometry& geo, const BathSpec& bath, double beta,
                            const UnitSystem& units) {
  if (p == 0.0) return bath.gamma0();
  const double eps = p * p / (2.0 * units.mass);
  const double two_pi_hbar = 2.0 * pi * units.hbar;
  const double g = bath.gamma(eps);
  if (eps >= energy_threshold(geo.Lz, beta, units))
    return geo.Lx * geo.Ly * p * p / sqr(two_pi_hbar) * geometry_factors(geo).C * g;
  if (eps >= energy_threshold(geo.Ly, beta, units)) return geo.Lx * p / two_pi_hbar * geometry_factors(geo).G * g;
  if (eps >= energy_threshold(geo.Lx, beta, units)) return 2.0 * g;
  throw DomainError("degenerate_gamma_sum: no mode below lambda_T^2 / (beta Lx^2) other than p = 0");
}

double chi_coefficient(double p, const DriveCoefficients& drive, const BoxGeometry& geo, const BathSpec& bath,
                       const ThermoConditions& tc, double theta_bar) {
  const double eps = p * p / (2.0 * tc.units.mass);
  const double num = drive.xi_mu + drive.xi_tilde * eps;
  if (num == 0.0) return 0.0;
  const double sum = degenerate_gamma_sum(p, geo, bath, tc.beta, tc.units);
  return 2.0 * sqr(tc.units.hbar) / (sqr(bath.coupling_lambda) * tc.beta * theta_bar) * num / sum;
}

double prototypical_integral(double a, double A, const ThermoConditions& tc) {
  const double beta = tc.beta, mu = tc.mu;
  if (A < 0.0) throw DomainError("prototypical_integral: A must be nonnegative");
  if (A == 0.0) {
    if (mu > 0.0) throw DomainError("prototypical_integral: mu > 0 with A = 0");
    if (mu == 0.0) {
      if (!(a > 1.0)) throw DivergenceError("prototypical_integral: needs a > 1 at mu = 0");
      return std::tgamma(a + 1.0) * zeta(a) / std::pow(beta, a + 1.0);
    }
    if (!(a > -1.0)) throw DivergenceError("prototypical_integral: needs a > -1 at A = 0");
    return std::tgamma(a + 1.0) * polylog(a, std::exp(beta * mu)) / std::pow(beta, a + 1.0);
  }
  if (!(mu < A)) throw DivergenceError("prototypical_integral: requires mu < A");
  // image series converges like e^{j beta (mu - A)}
  if (beta * (A - mu) > 0.5) return series_integral(a, A, beta, mu);
  return quadrature_integral(a, A, beta, mu);
}

double prototypical_integral(double a, double A, double B, const ThermoConditions& tc) {
  if (A == B) return 0.0;
  return prototypical_integral(a, A, tc) - prototypical_integral(a, B, tc);
}

double prototypical_integral_minus_one(double A, const ThermoConditions& tc) {
  const double b = tc.beta, mu = tc.mu;
  if (!(A > 0.0) || !(mu < 0.0)) throw DomainError("prototypical_integral_minus_one: needs A > 0 and mu < 0");
  const double bracket = mu * std::exp(b * (mu - A)) +
                         (A - mu) * ((1.0 - b * mu) * std::exp(b * mu) * gamma_upper(0.0, b * A) -
                                     gamma_upper(0.0, b * (A - mu)));
  return bracket / (b * b * mu * mu * (A - mu));
}

double prototypical_integral_asymptotic(double a, double A, const ThermoConditions& tc) {
  const double b = tc.beta, mu = tc.mu;
  if (!(mu < 0.0) || A < 0.0) throw DomainError("prototypical_integral_asymptotic: needs mu < 0 and A >= 0");
  const double b2 = b * b;
  const double cut = std::pow(A, a + 1.0) / ((a + 1.0) * b2 * sqr(A - mu));
  if (a > 1.0 && a < 2.0)
    return std::tgamma(a + 1.0) * zeta(a) / std::pow(b, a + 1.0) + pi * a / std::sin(pi * a) * std::pow(-mu, a - 1.0) / b2 -
           cut;
  if (a == 1.0) return -std::log(-b * mu) / b2 - 1.0 / (2.0 * b2 * sqr(1.0 - mu / A));
  if (a == -1.0) {
    if (!(A > 0.0)) throw DomainError("prototypical_integral_asymptotic: a = -1 needs A > 0");
    return -mu > A ? std::log(-mu / A) / (b2 * mu * mu) : 1.0 / (2.0 * b2 * A * A);
  }
  if (a < 1.0 && !(a < 0.0 && a == std::floor(a))) {
    const double lead = a == 0.0 ? 1.0 : pi * a / std::sin(pi * a);
    return lead * std::pow(-mu, a - 1.0) / b2 - cut;
  }
  throw DomainError("prototypical_integral_asymptotic: no tabulated form for this a");
}

TraceCorrections trace_corrections(const ThermoConditions& tc, const BoxGeometry& geo, const BathSpec& bath,
                                   const DriveCoefficients& drive, double theta_bar, BecDim bec) {
  TraceCorrections out;
  if (drive.xi_mu == 0.0 && drive.xi_tilde == 0.0) return out;
  if (!(theta_bar > 0.0)) throw DomainError("trace_corrections: theta_bar must be positive");
  const double hbar = tc.units.hbar, m = tc.units.mass, lam2 = sqr(bath.coupling_lambda);
  const auto terms = expansion(bath);
  const int d = static_cast<int>(bec);
  const GeometryFactors gf = geometry_factors(geo);

  // adds P sum_t kappa_t (xi mu I_{alpha_t + a} + xi~ I_{alpha_t + a + 1}) to trN
  // and the same with a + 1 to trH, over (A, B)
  auto add = [&](double P, double a, double A, double B) {
    for (const auto& [k, alpha] : terms) {
      auto I = [&](double order) {
        return B == INFINITY ? prototypical_integral(order, A, tc) : prototypical_integral(order, A, B, tc);
      };
      const double i0 = drive.xi_mu != 0.0 ? I(alpha + a) : 0.0;
      const double i1 = I(alpha + a + 1.0);
      const double i2 = drive.xi_tilde != 0.0 ? I(alpha + a + 2.0) : 0.0;
      out.trN += P * k * (drive.xi_mu * i0 + drive.xi_tilde * i1);
      out.trH += P * k * (drive.xi_mu * i1 + drive.xi_tilde * i2);
    }
  };

  const double Az = d >= 0 ? energy_threshold(geo.Lz, tc.beta, tc.units) : 0.0;
  add(2.0 * hbar * std::sqrt(2.0 * m) * geo.Lz / (lam2 * theta_bar * gf.C), -0.5, Az, INFINITY);

  if (d == 1 || d == 2) {
    const double Ay = energy_threshold(geo.Ly, tc.beta, tc.units);
    const double Vd = d == 2 ? geo.Lx * geo.Ly : geo.Lx;
    const double half = 0.5 * d;
    const double g = std::tgamma(half);
    const double two_pi_hbar = 2.0 * pi * hbar;
    add(Vd * std::pow(2.0 * pi * m, half) * std::pow(two_pi_hbar, 2.0 - d) * hbar * hbar /
            (g * lam2 * theta_bar * geo.Lx * geo.Ly * m * gf.C),
        half - 2.0, Az, INFINITY);
    add(Vd * std::pow(2.0 * pi * m, half) * 2.0 * hbar * hbar * two_pi_hbar /
            (std::pow(two_pi_hbar, d) * g * lam2 * theta_bar * geo.Lx * std::sqrt(2.0 * m) * gf.G),
        0.5 * (d - 3), Ay, Az);
    if (d == 1) {
      const double Ax = energy_threshold(geo.Lx, tc.beta, tc.units);
      add(geo.Lx * std::sqrt(2.0 * pi * m) * hbar / (two_pi_hbar * std::sqrt(pi) * lam2 * theta_bar), -0.5, Ax, Ay);
    }
  }
  if (d == 0) {
    const double em = std::expm1(tc.beta * tc.mu);
    out.trN += 2.0 * hbar * hbar * drive.xi_mu * std::exp(tc.beta * tc.mu) / (lam2 * bath.gamma0() * theta_bar * em * em);
  }
  return out;
}

IrrCorrections irr_energy_corrections(std::span<const PathSample> path) {
  const std::size_t n = path.size();
  if (n < 3 || n % 2 == 0) throw DomainError("irr_energy_corrections: needs an odd number (>= 3) of samples");
  const double h = 1.0 / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(path[i].t - h * static_cast<double>(i)) > 1e-12)
      throw DomainError("irr_energy_corrections: samples must be uniform on [0, 1]");
  std::vector<double> fM(n), fC(n), fQ(n);
  for (std::size_t i = 0; i < n; ++i) {
    const PathSample& p = path[i];
    const double vr = p.dV / p.V;
    fM[i] = -(p.trH - p.mu * p.trN) * vr;
    fC[i] = p.dmu * p.trN;
    fQ[i] = p.trH * vr - p.dmu * p.trN - p.mu * p.trN * vr;
  }
  const PathSample& a = path.front();
  const PathSample& b = path.back();
  IrrCorrections out;
  out.WM = simpson(fM, h);
  out.WC = a.mu * a.trN - b.mu * b.trN + simpson(fC, h);
  out.Q = (b.trH - b.mu * b.trN) - (a.trH - a.mu * a.trN) - simpson(fQ, h);
  out.dU = out.Q - out.WM - out.WC;
  return out;
}

TauStar optimal_times(double W_rev, const std::array<double, 4>& dissipation, double theta_bar, double s) {
  if (!(W_rev > 0.0)) throw InvalidEngineError("reversible load must be positive");
  if (!(theta_bar > 0.0)) throw DomainError("theta_bar must be positive");
  if (!(s > 0.0 && s < 1.0)) throw DomainError("s must lie in (0, 1)");
  double root_sum = 0.0;
  for (double d : dissipation) {
    if (!(d >= 0.0)) throw InvalidEngineError("W^C_irr - Q_irr must be nonnegative for every stroke");
    root_sum += std::sqrt(d);
  }
  TauStar out;
  const double floor = theta_bar / s;
  for (int j = 0; j < 4; ++j) {
    out.tau[j] = 2.0 * theta_bar * std::sqrt(dissipation[j]) * root_sum / W_rev;
    if (out.tau[j] <= floor) {
      out.tau[j] = floor;
      out.clamped[j] = true;
    }
  }
  return out;
}

double cycle_power(double W_rev, const std::array<double, 4>& dissipation, double theta_bar,
                   const std::array<double, 4>& tau) {
  double loss = 0.0, total = 0.0;
  for (int j = 0; j < 4; ++j) {
    loss += dissipation[j] * theta_bar / tau[j];
    total += tau[j];
  }
  return (W_rev - loss) / total;
}

namespace {

std::array<StatePoint, 5> corners(const CycleSpec& spec) {
  std::array<StatePoint, 5> c;
  for (int j = 0; j < 4; ++j)
    c[j] = resolve_state(spec.substance, spec.beta, spec.strokes[j].start, spec.geometry, spec.units);
  c[4] = resolve_state(spec.substance, spec.beta, spec.strokes[3].end, spec.geometry, spec.units);
  return c;
}

// Free coordinate of a stroke: V for iso-T-mu and iso-T-N, mu for iso-T-V.
struct StrokeLine {
  StrokeKind kind;
  double fixed;
  double x0, x1;
};

StrokeLine stroke_line(const CycleSpec& spec, int j, const StatePoint& i, const StatePoint& f) {
  switch (spec.strokes[j].kind) {
    case StrokeKind::iso_T_mu: return {StrokeKind::iso_T_mu, i.mu, i.V, f.V};
    case StrokeKind::iso_T_N: return {StrokeKind::iso_T_N, i.N, i.V, f.V};
    case StrokeKind::iso_T_V: return {StrokeKind::iso_T_V, i.V, i.mu, f.mu};
  }
  return {};
}

StatePoint state_on(const CycleSpec& spec, const StrokeLine& line, double t) {
  const double x = line.x0 + (line.x1 - line.x0) * t;
  Endpoint e;
  switch (line.kind) {
    case StrokeKind::iso_T_mu: e = {line.fixed, kUnset, x}; break;
    case StrokeKind::iso_T_N: e = {kUnset, line.fixed, x}; break;
    case StrokeKind::iso_T_V: e = {x, kUnset, line.fixed}; break;
  }
  return resolve_state(spec.substance, spec.beta, e, spec.geometry, spec.units);
}

}  // namespace

double cycle_theta_bar(const CycleSpec& spec, const BathSpec& bath, int samples) {
  if (samples < 4) throw DomainError("cycle_theta_bar: needs at least 4 samples");
  const auto c = corners(spec);
  const int per = samples / 4;
  double best = 0.0;
  for (int j = 0; j < 4; ++j) {
    for (int k = 0; k < per; ++k) {
      const double t = static_cast<double>(k) / per;
      const double V = c[j].V + (c[j + 1].V - c[j].V) * t;
      best = std::max(best, thermal_relaxation_time(spec.geometry.at(V), bath, spec.beta, spec.units));
    }
  }
  return best;
}

std::vector<PathSample> stroke_path(const CycleSpec& spec, int stroke, const BathSpec& bath, double theta_bar,
                                    int samples) {
  require_ideal_bose(spec.substance);
  if (samples < 3 || samples % 2 == 0) throw DomainError("stroke_path: needs an odd number (>= 3) of samples");
  if (stroke < 0 || stroke > 3) throw DomainError("stroke index must be 0..3");
  const StatePoint i = resolve_state(spec.substance, spec.beta, spec.strokes[stroke].start, spec.geometry, spec.units);
  const StatePoint f = resolve_state(spec.substance, spec.beta, spec.strokes[stroke].end, spec.geometry, spec.units);
  const StrokeLine line = stroke_line(spec, stroke, i, f);
  const double h = 1.0 / (samples - 1);
  const double dt = 1e-4;

  std::vector<PathSample> out(samples);
  for (int k = 0; k < samples; ++k) {
    const double t = k * h;
    const StatePoint st = k == 0 ? i : k == samples - 1 ? f : state_on(spec, line, t);
    PathSample& p = out[k];
    p.t = t;
    p.mu = st.mu;
    p.V = st.V;
    switch (line.kind) {
      case StrokeKind::iso_T_mu: p.dV = line.x1 - line.x0; break;
      case StrokeKind::iso_T_V: p.dmu = line.x1 - line.x0; break;
      case StrokeKind::iso_T_N: {
        p.dV = line.x1 - line.x0;
        auto mu_at = [&](double tt) { return state_on(spec, line, tt).mu; };
        if (k == 0)
          p.dmu = (-3.0 * st.mu + 4.0 * mu_at(dt) - mu_at(2.0 * dt)) / (2.0 * dt);
        else if (k == samples - 1)
          p.dmu = (3.0 * st.mu - 4.0 * mu_at(1.0 - dt) + mu_at(1.0 - 2.0 * dt)) / (2.0 * dt);
        else
          p.dmu = (mu_at(t + dt) - mu_at(t - dt)) / (2.0 * dt);
        break;
      }
    }
    const DriveCoefficients drive = drive_coefficients({spec.beta, p.mu, p.V, 0.0, p.dmu, p.dV});
    const TraceCorrections tr = trace_corrections({spec.beta, st.mu, spec.units}, st.geo, bath, drive, theta_bar,
                                                  phase_of(st, spec.substance, spec.beta, spec.units));
    p.trN = tr.trN;
    p.trH = tr.trH;
  }
  return out;
}

CycleSpec classical_counterpart(const CycleSpec& spec, double z_cl) {
  require_ideal_bose(spec.substance);
  if (!(z_cl > 0.0 && z_cl < 1.0)) throw DomainError("classical fugacity must lie in (0, 1)");
  auto z_max = [&](const CycleSpec& c) {
    double z = 0.0;
    for (const StatePoint& st : corners(c)) z = std::max(z, std::exp(c.beta * st.mu));
    return z;
  };
  auto mapped = [&](double k) {
    CycleSpec out = spec;
    out.geometry.reference.regime = Anisotropy::continuum;
    auto map = [&](Endpoint& e) {
      if (!std::isnan(e.mu)) e.mu += std::log(k) / spec.beta;
      if (!std::isnan(e.N)) e.N *= k;
    };
    for (auto& st : out.strokes) {
      map(st.start);
      map(st.end);
    }
    return out;
  };
  // fugacities at fixed V are close to linear in k once the gas is dilute
  double k = z_cl / z_max(spec);
  for (int it = 0; it < 60; ++it) {
    const CycleSpec out = mapped(k);
    const double z = z_max(out);
    if (std::abs(z / z_cl - 1.0) < 1e-13) return out;
    k *= z_cl / z;
  }
  throw ConvergenceError("classical_counterpart: fugacity scaling did not converge");
}

IrrPerformance performance(const CycleSpec& spec, const BathSpec& bath, const IrrSettings& settings,
                           bool with_classical) {
  require_ideal_bose(spec.substance);
  bath.validate();
  const EnergyLedger ledger = run_cycle(spec);
  IrrPerformance out;
  out.W_rev = ledger.total.WM;
  out.eta_rev = ledger.eta_rev;
  out.theta_bar = cycle_theta_bar(spec, bath, settings.theta_samples);

  std::array<double, 4> diss{};
  double scale = 0.0;
  for (int j = 0; j < 4; ++j) {
    const auto path = stroke_path(spec, j, bath, out.theta_bar, settings.samples_per_stroke);
    out.strokes[j] = irr_energy_corrections(path);
    diss[j] = out.strokes[j].WC - out.strokes[j].Q;
    scale = std::max({scale, std::abs(out.strokes[j].WC), std::abs(out.strokes[j].Q)});
  }
  // rounding noise on strokes without dissipation
  for (double& d : diss)
    if (d < 0.0 && -d <= 1e-10 * scale) d = 0.0;

  out.tau_star = optimal_times(out.W_rev, diss, out.theta_bar, settings.s);
  out.pi_star = cycle_power(out.W_rev, diss, out.theta_bar, out.tau_star.tau);

  std::array<double, 4> wc{};
  double Q = 0.0;
  for (int j = 0; j < 4; ++j) {
    const double f = out.theta_bar / out.tau_star.tau[j];
    wc[j] = ledger.strokes[j].WC + f * out.strokes[j].WC;
    Q += f * out.strokes[j].Q;
  }
  const EfficiencySplit split = split_chemical_work(wc);
  out.eta_star = split.W_in > 0.0 ? 1.0 - (split.W_out - Q) / split.W_in : std::numeric_limits<double>::quiet_NaN();

  out.power_ratio = std::numeric_limits<double>::quiet_NaN();
  if (with_classical) {
    const IrrPerformance cl = performance(classical_counterpart(spec, settings.z_classical), bath, settings, false);
    out.classical = BaselinePerformance{cl.tau_star.tau, cl.pi_star, cl.eta_star};
    out.power_ratio = out.pi_star / cl.pi_star;
  }
  return out;
}

// ---------------------------------------------------------------- scaling

namespace {

struct Predicted {
  std::optional<double> W_rev, theta_bar, pi_class;
  std::array<std::optional<double>, 4> tau;
};

Predicted predictions(const ScalingRequest& r) {
  Predicted p;
  const double c = r.chi;
  const bool carnot = r.family == CycleFamily::carnot;
  const bool all = r.placement == BecPlacement::all_strokes;
  double lz = 0.0;  // exponent of L_z in V
  auto set_tau = [&](double t124, double t3) { p.tau = {t124, t124, t3, t124}; };
  auto set_tau_otto = [&](double t13, double t24) { p.tau = {t13, t24, t13, t24}; };
  switch (r.regime) {
    case ScalingRegime::no_bec:
    case ScalingRegime::classical:
      p.W_rev = 1.0;
      set_tau(-1.0, -1.0);
      break;
    case ScalingRegime::bec0d:
      lz = 1.0 / 3.0;
      if (carnot && all) p.W_rev = 0.0, set_tau(1.0 / 3.0, 1.0 / 3.0);
      else if (carnot) p.W_rev = 1.0, set_tau(-2.0 / 3.0, -2.0 / 3.0);
      else if (all) p.W_rev = 0.0, set_tau_otto(1.0 / 12.0, 1.0 / 3.0);
      else p.W_rev = 1.0, set_tau(-2.0 / 3.0, -11.0 / 12.0);
      break;
    case ScalingRegime::bec1d:
      lz = 1.0 / (2.0 * c + 2.0);
      if (carnot && all) p.W_rev = (c - 1.0) / (c + 1.0), set_tau(lz, lz);
      else if (carnot) p.W_rev = 1.0, set_tau(-(c + 2.0) / (2.0 * c + 2.0), -3.0 / (2.0 * c + 2.0));
      else if (all) p.W_rev = (c - 1.0) / (c + 1.0), set_tau_otto(c <= 2.0 ? (2.0 - c) / (2.0 * c + 2.0) : 0.0, lz);
      else if (c <= 2.0) p.W_rev = 1.0, set_tau(-(2.0 * c + 1.0) / (2.0 * c + 2.0), -(2.0 * c + 1.0) / (2.0 * c + 2.0));
      else p.W_rev = 1.0, set_tau(-(c + 3.0) / (2.0 * c + 2.0), -5.0 / (2.0 * c + 2.0));
      break;
    case ScalingRegime::bec2d:
      // logarithmic factors are dropped from the predictions
      if (carnot && all) p.W_rev = 0.0, set_tau(0.5, 0.5);
      else if (carnot) p.W_rev = 1.0, set_tau(-0.75, -0.5);
      else if (all) p.W_rev = 0.0, set_tau_otto(0.25, 0.5);
      else p.W_rev = 1.0, set_tau(-1.0, -1.0);
      break;
  }
  p.theta_bar = lz - 1.0;
  if (!all) p.pi_class = 2.0 - lz;
  return p;
}

double lambda3() { return std::pow(thermal_wavelength(1.0), 3); }

}  // namespace

CycleSpec scaling_cycle(const ScalingRequest& req, double V) {
  if (!(V > 0.0)) throw DomainError("scaling volume must be positive");
  const double beta = 1.0;
  const double lam = thermal_wavelength(beta);
  const double Vabs = V * lam * lam * lam;
  const double rc = critical_density(beta);
  const Substance bose{Species::bose, std::nullopt};
  const bool carnot = req.family == CycleFamily::carnot;
  const bool all = req.placement == BecPlacement::all_strokes;

  GeometryRule rule;
  int d = -1;
  switch (req.regime) {
    case ScalingRegime::no_bec:
    case ScalingRegime::classical:
      // fixed L_z, square cross-section
      rule.reference = {std::sqrt(Vabs / lam), std::sqrt(Vabs / lam), lam, Anisotropy::continuum, 1.0};
      rule.ex = rule.ey = 0.5;
      rule.ez = 0.0;
      break;
    case ScalingRegime::bec0d:
      d = 0;
      rule.reference = BoxGeometry::cube(Vabs, Anisotropy::isotropic_0d);
      break;
    case ScalingRegime::bec1d: {
      d = 1;
      const double e = 1.0 / (2.0 * req.chi + 2.0);
      const double Lyz = 0.5 * lam * std::pow(V, e);
      rule.reference = {Vabs / (Lyz * Lyz), Lyz, Lyz, Anisotropy::quasi_1d, req.chi};
      rule.ex = req.chi / (req.chi + 1.0);
      rule.ey = rule.ez = e;
      break;
    }
    case ScalingRegime::bec2d: {
      d = 2;
      const double Lz = 0.25 * lam * std::log(V);
      const double Lxy = std::sqrt(Vabs / Lz);
      rule.reference = {Lxy, Lxy, Lz, Anisotropy::quasi_2d, 1.0};
      rule.ez = 1.0 / std::log(V);  // local power law for L_z ~ ln V
      rule.ex = rule.ey = 0.5 * (1.0 - rule.ez);
      break;
    }
  }

  if (d < 0) {
    if (carnot) {
      const double mu1 = std::log(0.2) / beta, mu3 = std::log(0.6) / beta;
      const double N1 = bulk_density(Species::bose, {beta, mu1, {}}) * Vabs;
      CycleSpec c = make_carnot(bose, beta, mu1, mu3, N1, 0.5 * N1, rule);
      return req.regime == ScalingRegime::classical ? classical_counterpart(c, req.settings.z_classical) : c;
    }
    const double V3 = Vabs, V1 = 3.0 * Vabs;
    CycleSpec c = make_otto(bose, beta, 2.0 * V3 / (lam * lam * lam), 1.0 * V3 / (lam * lam * lam), V1, V3, rule);
    return req.regime == ScalingRegime::classical ? classical_counterpart(c, req.settings.z_classical) : c;
  }

  const BoxGeometry geo = rule.at(Vabs);
  const ThermoConditions tc{beta, 0.0, {}};
  if (carnot) {
    if (all) {
      const double mu1 = mu_bec_asymptotic(d, 0.25, 2.0 * rc, tc, geo);
      const double mu3 = mu_bec_asymptotic(d, 0.5, 2.0 * rc, tc, geo);
      return make_carnot(bose, beta, mu1, mu3, 2.5 * rc * Vabs, 1.5 * rc * Vabs, rule);
    }
    const double mu1 = std::log(0.5) / beta;
    const double mu3 = mu_bec_asymptotic(d, 0.5, 2.0 * rc, tc, geo);
    return make_carnot(bose, beta, mu1, mu3, 3.0 * rc * Vabs, 2.0 * rc * Vabs, rule);
  }
  if (all) return make_otto(bose, beta, 4.0 * rc * Vabs, 2.4 * rc * Vabs, 1.5 * Vabs, Vabs, rule);
  return make_otto(bose, beta, 2.5 * rc * Vabs, 1.5 * rc * Vabs, 3.0 * Vabs, Vabs, rule);
}

ScalingFit fit_exponent(std::span<const double> x, std::span<const double> y, std::string quantity) {
  if (x.size() != y.size() || x.size() < 2) throw FitError("fit_exponent: needs at least two matching points");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0) || !std::isfinite(y[i]))
      throw FitError("fit_exponent: log-log fit needs positive finite data (" + quantity + ")");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  const double n = static_cast<double>(lx.size());
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (!(sxx > 1e-12)) throw FitError("fit_exponent: abscissae do not span a range");
  ScalingFit f;
  f.quantity = std::move(quantity);
  f.exponent = sxy / sxx;
  double ss = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) ss += sqr(ly[i] - my - f.exponent * (lx[i] - mx));
  f.rms_residual = std::sqrt(ss / n);
  return f;
}

ScalingPoint scaling_point(const ScalingRequest& req, double V) {
  const CycleSpec spec = scaling_cycle(req, V);
  const bool classical = req.regime == ScalingRegime::classical;
  const IrrPerformance perf = performance(spec, req.bath, req.settings, !classical);
  const BoxGeometry geo = spec.geometry.at(V * lambda3());
  ScalingPoint p;
  p.V = V;
  p.Lx = geo.Lx;
  p.Ly = geo.Ly;
  p.Lz = geo.Lz;
  p.W_rev = perf.W_rev;
  p.theta_bar = perf.theta_bar;
  p.tau = perf.tau_star.tau;
  p.pi_star = perf.pi_star;
  p.eta_star = perf.eta_star;
  p.eta_rev = perf.eta_rev;
  p.pi_class = classical ? perf.pi_star : perf.classical->pi;
  p.power_ratio = classical ? 1.0 : perf.power_ratio;
  return p;
}

ScalingReport scaling_report(const ScalingRequest& req, std::span<const ScalingPoint> points) {
  if (points.size() < 4) throw FitError("scaling_report: needs at least 4 volumes");
  ScalingReport rep;
  rep.points.assign(points.begin(), points.end());
  std::sort(rep.points.begin(), rep.points.end(), [](const auto& a, const auto& b) { return a.V < b.V; });
  const double span = rep.points.back().V / rep.points.front().V;
  if (!(span >= 100.0 * (1.0 - 1e-12))) throw FitError("scaling_report: volumes must span at least two decades");

  std::vector<double> V;
  for (const auto& p : rep.points) V.push_back(p.V);
  auto column = [&](auto get) {
    std::vector<double> y;
    for (const auto& p : rep.points) y.push_back(get(p));
    return y;
  };
  const Predicted pr = predictions(req);
  auto fit = [&](const std::string& name, const std::vector<double>& y, std::optional<double> predicted) {
    ScalingFit f = fit_exponent(V, y, name);
    f.predicted = predicted;
    rep.fits.push_back(std::move(f));
  };
  fit("W_rev", column([](const ScalingPoint& p) { return std::abs(p.W_rev); }), pr.W_rev);
  fit("theta_bar", column([](const ScalingPoint& p) { return p.theta_bar; }), pr.theta_bar);
  double max_tau = -INFINITY;
  for (int j = 0; j < 4; ++j) {
    fit("tau" + std::to_string(j + 1), column([j](const ScalingPoint& p) { return p.tau[j]; }), pr.tau[j]);
    if (pr.tau[j]) max_tau = std::max(max_tau, *pr.tau[j]);
  }
  std::optional<double> pi_pred;
  if (pr.W_rev) pi_pred = *pr.W_rev - max_tau;
  fit("pi_star", column([](const ScalingPoint& p) { return p.pi_star; }), pi_pred);
  fit("pi_class", column([](const ScalingPoint& p) { return p.pi_class; }), pr.pi_class);
  std::optional<double> ratio_pred;
  if (pi_pred && pr.pi_class) ratio_pred = *pi_pred - *pr.pi_class;
  if (req.regime == ScalingRegime::classical) ratio_pred = 0.0;
  fit("power_ratio", column([](const ScalingPoint& p) { return p.power_ratio; }), ratio_pred);
  return rep;
}

ScalingReport scaling_report(const ScalingRequest& req) {
  std::vector<ScalingPoint> pts;
  for (double V : req.volumes) pts.push_back(scaling_point(req, V));
  return scaling_report(req, pts);
}

}  // namespace qtce
