#pragma once

// Real special functions: polylogarithm and its order-3/2 inverse,
// Riemann zeta, upper incomplete gamma, harmonic numbers.

namespace qtce {

struct EvalAccuracy {
  double rel_tol = 1e-12;
  double abs_tol = 1e-14;
  long max_terms = 1000000;
};

/// Li_s(z) = sum_{k>=1} z^k / k^s for real z <= 1.
/// Throws DomainError for z > 1 and DivergenceError for s <= 1 at z = 1.
double polylog(double s, double z, const EvalAccuracy& acc = {});

/// Inverse of Li_{3/2} on (-inf, zeta(3/2)].
/// Nonnegative y gives the bosonic fugacity in [0, 1]; negative y gives a
/// negative argument, so the fermionic fugacity for density y' is
/// -polylog_inverse_3_2(-y').
double polylog_inverse_3_2(double y, const EvalAccuracy& acc = {});

/// Li_s(e^x) from the expansion around x = 0, for -1 < x <= 0.
/// Integer s uses the harmonic-number form.
double polylog_small_mu(double s, double beta_mu, const EvalAccuracy& acc = {});

/// Riemann zeta for s > 1.
double zeta(double s);

/// Gamma(s, x) = int_x^inf t^{s-1} e^{-t} dt.
double gamma_upper(double s, double x, const EvalAccuracy& acc = {});

/// H_n = 1 + 1/2 + ... + 1/n, H_0 = 0.
double harmonic_number(int n);

/// Li_{-n}(z) for n >= 0, a rational function of z (z != 1).
double polylog_negative_integer(int n, double z);

}  // namespace qtce
