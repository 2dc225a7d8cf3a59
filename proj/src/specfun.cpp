#include "qtce/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/zeta.hpp>

#include "qtce/errors.hpp"

namespace qtce {
namespace {

constexpr double kZeta32 = 2.612375348685488343348567567924071630571;

// Radius in u = ln(-z) up to which the Dirichlet-eta expansion is used for
// negative arguments. The expansion converges for |u| < pi.
constexpr double kEtaRadius = 2.0;

bool is_integer(double s) { return std::isfinite(s) && s == std::floor(s); }

// zeta on the whole real line except s = 1
double zeta_any(double s) { return boost::math::zeta(s); }

double eta_any(double s) {
  if (s == 1.0) return std::numbers::ln2;
  return -std::expm1((1.0 - s) * std::numbers::ln2) * zeta_any(s);
}

double direct_series(double s, double z, const EvalAccuracy& acc) {
  double sum = 0.0;
  double zk = 1.0;
  const double shrink = 1.0 - std::abs(z);
  for (long k = 1; k <= acc.max_terms; ++k) {
    zk *= z;
    const double term = zk * std::pow(static_cast<double>(k), -s);
    sum += term;
    if (std::abs(term) <= shrink * (1e-3 * acc.rel_tol * std::abs(sum) + acc.abs_tol * 1e-3)) return sum;
  }
  throw ConvergenceError("polylog: direct series did not converge");
}

// Li_s(e^x), x < 0, expansion around x = 0.
double bose_expansion(double s, double x, const EvalAccuracy& acc) {
  double sum = 0.0;
  int start_check = 0;
  if (is_integer(s)) {
    const int n = static_cast<int>(s);
    double lead = 1.0;
    for (int j = 1; j <= n - 1; ++j) lead *= x / j;
    sum += lead * (harmonic_number(n - 1) - std::log(-x));
    start_check = n + 1;
  } else {
    sum += std::tgamma(1.0 - s) * std::pow(-x, s - 1.0);
    start_check = static_cast<int>(std::max(0.0, std::ceil(s))) + 1;
  }
  double xk = 1.0;  // x^k / k!
  int small_run = 0;
  for (long k = 0; k <= acc.max_terms; ++k) {
    if (k > 0) xk *= x / static_cast<double>(k);
    const double arg = s - static_cast<double>(k);
    if (arg == 1.0) continue;
    const double term = zeta_any(arg) * xk;
    sum += term;
    if (k >= start_check) {
      small_run = std::abs(term) <= 1e-3 * acc.rel_tol * std::abs(sum) + 1e-3 * acc.abs_tol ? small_run + 1 : 0;
      if (small_run >= 3) return sum;
    }
  }
  throw ConvergenceError("polylog: small-mu expansion did not converge");
}

// Li_s(-e^u) = -sum_k eta(s - k) u^k / k!
double eta_expansion(double s, double u, const EvalAccuracy& acc) {
  double sum = 0.0;
  double uk = 1.0;
  int small_run = 0;
  const int start_check = static_cast<int>(std::max(0.0, std::ceil(s))) + 1;
  for (long k = 0; k <= acc.max_terms; ++k) {
    if (k > 0) uk *= u / static_cast<double>(k);
    const double term = -eta_any(s - static_cast<double>(k)) * uk;
    sum += term;
    if (k >= start_check) {
      small_run = std::abs(term) <= 1e-3 * acc.rel_tol * std::abs(sum) + 1e-3 * acc.abs_tol ? small_run + 1 : 0;
      if (small_run >= 3) return sum;
    }
  }
  throw ConvergenceError("polylog: eta expansion did not converge");
}

// Li_s(-e^u) for u > kEtaRadius and s > 0 from the Fermi-Dirac integral.
double fermi_integral(double s, double u, const EvalAccuracy& acc) {
  const double tol = std::max(acc.rel_tol * 1e-2, 1e-15);
  // int_0^u t^{s-1} / (e^{t-u} + 1) = u^s / s - int_0^u t^{s-1} / (e^{u-t} + 1)
  boost::math::quadrature::tanh_sinh<double> ts;
  auto below = [s, u](double t) {
    if (t <= 0.0) return 0.0;
    return std::pow(t, s - 1.0) / (std::exp(u - t) + 1.0);
  };
  const double lower = std::pow(u, s) / s - ts.integrate(below, 0.0, u, tol);
  boost::math::quadrature::exp_sinh<double> es;
  auto above = [s, u](double w) { return std::pow(u + w, s - 1.0) / (std::exp(w) + 1.0); };
  const double upper = es.integrate(above, 0.0, std::numeric_limits<double>::infinity(), tol);
  return -(lower + upper) / std::tgamma(s);
}

// Safeguarded Newton for an increasing function on [lo, hi] with g(lo) <= 0 <= g(hi).
template <class F>
double bracketed_newton(F&& g, double lo, double hi, double tol) {
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 300; ++it) {
    auto [val, der] = g(x);
    if (val == 0.0) return x;
    if (val < 0.0) lo = x; else hi = x;
    double next = (der > 0.0 && std::isfinite(der)) ? x - val / der : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - x);
    x = next;
    if (step <= tol * std::max(1.0, std::abs(x)) || hi - lo <= tol * std::max(1.0, std::abs(x))) return x;
  }
  throw ConvergenceError("polylog_inverse_3_2: root iteration did not converge");
}

}  // namespace

double harmonic_number(int n) {
  if (n < 0) throw DomainError("harmonic_number: negative index");
  double h = 0.0;
  for (int k = n; k >= 1; --k) h += 1.0 / k;
  return h;
}

double polylog_negative_integer(int n, double z) {
  if (n < 0) throw DomainError("polylog_negative_integer: n must be >= 0");
  if (z == 1.0) throw DivergenceError("polylog_negative_integer: pole at z = 1");
  if (n == 0) return z / (1.0 - z);
  if (n > 160) throw DomainError("polylog_negative_integer: order too large");
  // Eulerian numbers A(n, k)
  std::vector<double> row{1.0};
  for (int m = 2; m <= n; ++m) {
    std::vector<double> next(m, 0.0);
    for (int k = 0; k < m; ++k) {
      const double keep = k < m - 1 ? (k + 1) * row[k] : 0.0;
      const double grow = k > 0 ? (m - k) * row[k - 1] : 0.0;
      next[k] = keep + grow;
    }
    row.swap(next);
  }
  double poly = 0.0;
  for (int k = n - 1; k >= 0; --k) poly = poly * z + row[k];
  return z * poly / std::pow(1.0 - z, n + 1);
}

double zeta(double s) {
  if (!(s > 1.0)) throw DomainError("zeta: requires s > 1");
  if (s == 1.5) return kZeta32;
  return zeta_any(s);
}

double polylog(double s, double z, const EvalAccuracy& acc) {
  if (!std::isfinite(s) || !std::isfinite(z)) throw DomainError("polylog: non-finite argument");
  if (z > 1.0) throw DomainError("polylog: z > 1");
  if (z == 1.0) {
    if (s <= 1.0) throw DivergenceError("polylog: s <= 1 diverges at z = 1");
    return zeta(s);
  }
  if (z == 0.0) return 0.0;
  if (s == 1.0) return -std::log1p(-z);
  if (s <= 0.0 && is_integer(s)) return polylog_negative_integer(static_cast<int>(-s), z);
  if (std::abs(z) <= 0.5) return direct_series(s, z, acc);
  if (z > 0.0) return bose_expansion(s, std::log(z), acc);
  const double u = std::log(-z);
  if (u <= kEtaRadius) return eta_expansion(s, u, acc);
  if (s > 0.0) return fermi_integral(s, u, acc);
  throw DomainError("polylog: z < -e^2 requires s > 0");
}

double polylog_small_mu(double s, double beta_mu, const EvalAccuracy& acc) {
  if (!(beta_mu > -1.0 && beta_mu <= 0.0)) throw DomainError("polylog_small_mu: requires -1 < beta_mu <= 0");
  if (s <= 0.0 && is_integer(s)) throw DomainError("polylog_small_mu: nonpositive integer order");
  if (beta_mu == 0.0) {
    if (s <= 1.0) throw DivergenceError("polylog_small_mu: s <= 1 diverges at mu = 0");
    return zeta(s);
  }
  return bose_expansion(s, beta_mu, acc);
}

double polylog_inverse_3_2(double y, const EvalAccuracy& acc) {
  if (!std::isfinite(y)) throw DomainError("polylog_inverse_3_2: non-finite argument");
  if (y > kZeta32 * (1.0 + 4.0 * std::numeric_limits<double>::epsilon()))
    throw DomainError("polylog_inverse_3_2: y above zeta(3/2)");
  if (y >= kZeta32) return 1.0;
  if (y == 0.0) return 0.0;
  const double tol = std::max(acc.rel_tol * 1e-4, 4.0 * std::numeric_limits<double>::epsilon());
  if (y > 0.0) {
    // x = ln z in [ln(y/(1+y)), min(0, ln y)]
    auto g = [&](double x) {
      const double z = std::exp(x);
      return std::pair{polylog(1.5, z, acc) - y, polylog(0.5, z, acc)};
    };
    const double lo = std::log(y / (1.0 + y));
    const double hi = std::min(0.0, std::log(y));
    return std::exp(bracketed_newton(g, lo, hi, tol));
  }
  // negative branch: u = ln(-z), h(u) = y - Li_{3/2}(-e^u) increasing in u
  const double w = -y;
  auto h = [&](double u) {
    const double z = -std::exp(u);
    return std::pair{y - polylog(1.5, z, acc), -polylog(0.5, z, acc)};
  };
  const double lo = std::log(w);
  double hi = lo + 1.0;
  for (int it = 0; h(hi).first < 0.0; ++it) {
    if (it > 60) throw ConvergenceError("polylog_inverse_3_2: bracket search failed");
    hi = lo + 2.0 * (hi - lo);
  }
  return -std::exp(bracketed_newton(h, lo, hi, tol));
}

double gamma_upper(double s, double x, const EvalAccuracy& acc) {
  if (!(x >= 0.0) || !std::isfinite(s)) throw DomainError("gamma_upper: requires x >= 0");
  if (x == 0.0) {
    if (s <= 0.0) throw DomainError("gamma_upper: Gamma(s, 0) diverges for s <= 0");
    return std::tgamma(s);
  }
  const double eps = std::max(acc.rel_tol * 1e-3, std::numeric_limits<double>::epsilon());
  if (x >= 1.5 && x >= s + 1.0) {
    // Legendre continued fraction, modified Lentz
    const double tiny = 1e-300;
    double b = x + 1.0 - s;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (long i = 1; i <= acc.max_terms; ++i) {
      const double an = -static_cast<double>(i) * (static_cast<double>(i) - s);
      b += 2.0;
      d = an * d + b;
      if (std::abs(d) < tiny) d = tiny;
      c = b + an / c;
      if (std::abs(c) < tiny) c = tiny;
      d = 1.0 / d;
      const double del = d * c;
      h *= del;
      if (std::abs(del - 1.0) <= eps) return std::exp(-x + s * std::log(x)) * h;
    }
    throw ConvergenceError("gamma_upper: continued fraction did not converge");
  }
  if (s <= 0.0 && is_integer(s)) {
    double g = -std::expint(-x);  // Gamma(0, x) = E1(x)
    for (int m = -1; m >= static_cast<int>(s); --m) g = (g - std::pow(x, m) * std::exp(-x)) / m;
    return g;
  }
  // Gamma(s) - x^s e^{-x} / s * sum_k x^k / ((s+1)...(s+k))
  double sum = 1.0;
  double t = 1.0;
  for (long k = 1; k <= acc.max_terms; ++k) {
    t *= x / (s + static_cast<double>(k));
    sum += t;
    if (std::abs(t) <= eps * std::abs(sum)) return std::tgamma(s) - std::exp(s * std::log(x) - x) / s * sum;
  }
  throw ConvergenceError("gamma_upper: series did not converge");
}

}  // namespace qtce
