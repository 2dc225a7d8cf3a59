#pragma once

// First-order irreversible corrections to isothermal chemical cycles of an
// ideal Bose gas weakly coupled to a bosonic bath, and the resulting optimal
// stroke times, maximum power and efficiency at maximum power.

#include <array>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qtce/cycle_engine.hpp"
#include "qtce/ideal_gas.hpp"

namespace qtce {

enum class BathPreset { constant, lorentzian, exponential };

// gamma_p^{-1} = kappa + sum_j kappa_j eps^{alpha_j}.
struct BathSpec {
  double coupling_lambda = 1.0;
  double kappa = 1.0;
  std::vector<std::pair<double, double>> terms;  // (kappa_j, alpha_j)
  BathPreset preset = BathPreset::constant;
  double decay = 0.0;  // kappa' of the lorentzian and exponential presets

  double gamma(double eps) const;
  double gamma0() const { return 1.0 / kappa; }
  void validate() const;

  static BathSpec constant(double kappa, double coupling = 1.0);
  /// gamma = 1 / (kappa + kappa' eps).
  static BathSpec lorentzian(double kappa, double kappa_prime, double coupling = 1.0);
  /// gamma = e^{-kappa' eps} / kappa; the expansion keeps `order` terms.
  static BathSpec exponential(double kappa, double kappa_prime, int order = 12, double coupling = 1.0);
};

struct GeometryFactors {
  double C = 0.0;
  double G = 0.0;
};

struct DriveCoefficients {
  double xi = 0.0;
  double xi_tilde = 0.0;
  double xi_mu = 0.0;     // xi * mu, finite even when mu = 0
  bool singular = false;  // mu = 0 with a moving mu: only xi_mu is meaningful
};

// A point of a driven path with its derivatives in normalized time t' = t / tau.
struct DriveRates {
  double beta = 1.0;
  double mu = 0.0;
  double V = 1.0;
  double dbeta = 0.0;
  double dmu = 0.0;
  double dV = 0.0;
};

struct IrrSettings {
  double s = 0.01;
  double z_classical = 1e-3;
  int samples_per_stroke = 33;  // odd, Simpson rule in t'
  int theta_samples = 64;       // path points for the maximum relaxation time
};

struct TraceCorrections {
  double trN = 0.0;
  double trH = 0.0;
};

struct PathSample {
  double t = 0.0;
  double mu = 0.0;
  double V = 1.0;
  double dmu = 0.0;
  double dV = 0.0;
  double trN = 0.0;
  double trH = 0.0;
};

struct IrrCorrections {
  double WM = 0.0;
  double WC = 0.0;
  double Q = 0.0;
  double dU = 0.0;
};

struct TauStar {
  std::array<double, 4> tau{};
  std::array<bool, 4> clamped{};
};

struct BaselinePerformance {
  std::array<double, 4> tau{};
  double pi = 0.0;
  double eta = 0.0;
};

struct IrrPerformance {
  std::array<IrrCorrections, 4> strokes;
  double theta_bar = 0.0;
  double W_rev = 0.0;
  double eta_rev = 0.0;
  TauStar tau_star;
  double pi_star = 0.0;
  double eta_star = 0.0;
  std::optional<BaselinePerformance> classical;
  double power_ratio = 0.0;  // pi_star / pi_class, NaN without a baseline
};

/// Bose occupation 1 / (e^{beta (eps - mu)} - 1); DomainError for eps <= mu.
double bath_occupation(double eps, const ThermoConditions& tc);

GeometryFactors geometry_factors(const BoxGeometry& geo);

/// Lower energy of the surface regime, lambda_T^2 / (beta L^2).
double energy_threshold(double L, double beta, const UnitSystem& units = {});

/// Relaxation time of the modes with momentum p; p must lie in the surface regime.
double relaxation_time(double p, const BoxGeometry& geo, const BathSpec& bath, double beta,
                       const UnitSystem& units = {});

/// Relaxation time at the thermal momentum, eps = k_B T.
double thermal_relaxation_time(const BoxGeometry& geo, const BathSpec& bath, double beta,
                               const UnitSystem& units = {});

DriveCoefficients drive_coefficients(const DriveRates& r);

/// Sum of gamma over the modes degenerate with p, from the four energy branches.
double degenerate_gamma_sum(double p, const BoxGeometry& geo, const BathSpec& bath, double beta,
                            const UnitSystem& units = {});

double chi_coefficient(double p, const DriveCoefficients& drive, const BoxGeometry& geo, const BathSpec& bath,
                       const ThermoConditions& tc, double theta_bar);

/// I_a^A = int_A^inf eps^a (n^2 + n) d eps.
double prototypical_integral(double a, double A, const ThermoConditions& tc);

/// I_a^{A,B} = I_a^A - I_a^B.
double prototypical_integral(double a, double A, double B, const ThermoConditions& tc);

/// a = -1 with the sum over images replaced by an integral.
double prototypical_integral_minus_one(double A, const ThermoConditions& tc);

/// Leading behaviour for A << -mu << k_B T; for a = -1 also -mu << A.
double prototypical_integral_asymptotic(double a, double A, const ThermoConditions& tc);

/// Tr(N rho_irr) and Tr(H rho_irr) for an ideal Bose gas. `bec` is the
/// dimension of the condensate present, or BecDim::none.
TraceCorrections trace_corrections(const ThermoConditions& tc, const BoxGeometry& geo, const BathSpec& bath,
                                   const DriveCoefficients& drive, double theta_bar, BecDim bec);

/// First-order work and heat corrections from traces sampled on a uniform,
/// odd-sized grid over t' in [0, 1].
IrrCorrections irr_energy_corrections(std::span<const PathSample> path);

/// Optimal stroke times; each time below theta_bar / s is raised to it.
TauStar optimal_times(double W_rev, const std::array<double, 4>& dissipation, double theta_bar, double s);

/// pi = (W_rev - sum_j d_j theta_bar / tau_j) / sum_j tau_j with d_j = W^C_irr - Q_irr.
double cycle_power(double W_rev, const std::array<double, 4>& dissipation, double theta_bar,
                   const std::array<double, 4>& tau);

/// Maximum relaxation time over the geometry of the cycle path.
double cycle_theta_bar(const CycleSpec& spec, const BathSpec& bath, int samples = 64);

/// Sampled stroke path with traces, for ideal bosons.
std::vector<PathSample> stroke_path(const CycleSpec& spec, int stroke, const BathSpec& bath, double theta_bar,
                                    int samples);

/// Same cycle with every N scaled by k and every mu shifted by k_B T ln k,
/// with k chosen so that the largest fugacity is z_cl. No condensate geometry.
CycleSpec classical_counterpart(const CycleSpec& spec, double z_cl);

IrrPerformance performance(const CycleSpec& spec, const BathSpec& bath, const IrrSettings& settings = {},
                           bool with_classical = true);

enum class ScalingRegime { no_bec, classical, bec0d, bec1d, bec2d };
enum class CycleFamily { carnot, otto };
enum class BecPlacement { third_stroke, all_strokes };

struct ScalingRequest {
  ScalingRegime regime = ScalingRegime::no_bec;
  CycleFamily family = CycleFamily::carnot;
  BecPlacement placement = BecPlacement::third_stroke;
  double chi = 1.0;
  std::vector<double> volumes;  // in units of lambda_T^3
  BathSpec bath;
  IrrSettings settings;
};

struct ScalingPoint {
  double V = 0.0;
  double Lx = 0.0, Ly = 0.0, Lz = 0.0;
  double W_rev = 0.0;
  double theta_bar = 0.0;
  std::array<double, 4> tau{};
  double pi_star = 0.0;
  double eta_star = 0.0;
  double eta_rev = 0.0;
  double pi_class = 0.0;
  double power_ratio = 0.0;
};

struct ScalingFit {
  std::string quantity;
  double exponent = 0.0;
  std::optional<double> predicted;
  double rms_residual = 0.0;  // of the log-log fit
};

struct ScalingReport {
  std::vector<ScalingPoint> points;
  std::vector<ScalingFit> fits;
};

/// Cycle used at volume scale V (in lambda_T^3) for a scaling run.
CycleSpec scaling_cycle(const ScalingRequest& req, double V);

/// Least-squares slope of log y against log x; FitError on degenerate input.
ScalingFit fit_exponent(std::span<const double> x, std::span<const double> y, std::string quantity = {});

ScalingPoint scaling_point(const ScalingRequest& req, double V);

/// Runs every volume (points may be computed in any order) and fits exponents.
ScalingReport scaling_report(const ScalingRequest& req, std::span<const ScalingPoint> points);
ScalingReport scaling_report(const ScalingRequest& req);

}  // namespace qtce
