#pragma once

// Reference computations for tests. Nothing here calls into the closed-form
// library code; only plain function values are exchanged.

#include <functional>

namespace qtce::oracle {

struct QuadratureSpec {
  double abs_tol = 1e-14;
  double rel_tol = 1e-13;
  int max_subdivisions = 20000;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
};

/// Adaptive Gauss-Kronrod (7/15) on [a, b]; b may be +infinity.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureSpec& spec = {});

/// Li_s(z) from 1/Gamma(s) int_0^inf t^{s-1} / (e^t / z - 1) dt, s > 0, z <= 1.
double polylog_quadrature(double s, double z, const QuadratureSpec& spec = {});

/// int_x^inf t^{s-1} e^{-t} dt for x > 0.
double gamma_upper_quadrature(double s, double x, const QuadratureSpec& spec = {});

/// int_A^inf eps^a (n^2 + n) deps with n = 1 / (e^{beta (eps - mu)} - 1).
double prototypical_integral_quadrature(double a, double A, double beta, double mu,
                                        const QuadratureSpec& spec = {});

struct ChemicalWork {
  double value = 0.0;
  double error = 0.0;
  int levels = 0;
};

/// -int mu dN along a path s in [0, 1] given mu(s) and N(s).
/// Stieltjes trapezoid sums refined by halving and Romberg extrapolation.
/// Throws ConvergenceError when the extrapolation table does not settle.
ChemicalWork chemical_work_quadrature(const std::function<double(double)>& mu,
                                      const std::function<double(double)>& N,
                                      int initial_samples = 16, double rel_tol = 1e-11);

struct LindbladDecay {
  double analytic = 0.0;
  double ode = 0.0;
  int steps = 0;
};

/// Single mode relaxing as dn/dt = -(n - n_eq) / theta.
LindbladDecay lindblad_single_mode(double n0, double n_eq, double theta, double t, double tol = 1e-12);

/// Fixed-step RK4 for the single-mode decay, exposed for order checks.
double lindblad_rk4(double n0, double n_eq, double theta, double t, int steps);

struct SlowDrive {
  double lag_coefficient = 0.0;  // n(1) ~ n_eq(1) - lag_coefficient / tau
  double lag_at_tau = 0.0;       // n_eq(1) - n(1) at the given tau
  double halving_ratio = 0.0;    // lag(tau) / lag(2 tau)
};

/// Integrates dn/dt' = -tau (n - n_eq(t')) / theta(t') on [0, 1] from n_eq(0).
/// Throws FitError when doubling tau does not halve the lag within 1%.
SlowDrive slow_drive_ode(const std::function<double(double)>& theta,
                         const std::function<double(double)>& n_eq, double tau);

/// Excess chemical work -int mu dn of the same driven mode over the
/// equilibrium value -int mu dn_eq, extrapolated as tau * excess for tau -> inf.
/// Starts from the lagged state n_eq(0) - theta(0) n_eq'(0) / tau.
double slow_drive_chemical_work(const std::function<double(double)>& theta,
                                const std::function<double(double)>& n_eq,
                                const std::function<double(double)>& dn_eq,
                                const std::function<double(double)>& mu, double tau);

}  // namespace qtce::oracle
