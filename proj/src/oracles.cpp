#include "qtce/oracles.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "qtce/errors.hpp"

namespace qtce::oracle {
namespace {

constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment gk15(F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kron = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double x = h * kXgk[j];
    const double fsum = f(c - x) + f(c + x);
    kron += kWgk[j] * fsum;
    if (j % 2 == 1) gauss += kWg[j / 2] * fsum;
  }
  return {a, b, kron * h, std::abs((kron - gauss) * h)};
}

double bose_occupation_sum(double w) {
  // e^w / (e^w - 1)^2 = n^2 + n for w = beta (eps - mu) > 0
  const double s = std::sinh(0.5 * w);
  return 0.25 / (s * s);
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureSpec& spec) {
  std::function<double(double)> g = f;
  double lo = a, hi = b;
  if (std::isinf(b)) {
    g = [&f, a](double x) {
      if (x >= 1.0) return 0.0;
      const double om = 1.0 - x;
      return f(a + x / om) / (om * om);
    };
    lo = 0.0;
    hi = 1.0;
  }
  std::priority_queue<Segment> heap;
  Segment first = gk15(g, lo, hi);
  double total = first.value, err = first.error;
  heap.push(first);
  int count = 1;
  while (err > std::max(spec.abs_tol, spec.rel_tol * std::abs(total))) {
    if (count >= spec.max_subdivisions) throw ConvergenceError("oracle::integrate: subdivision limit reached");
    Segment s = heap.top();
    heap.pop();
    const double m = 0.5 * (s.a + s.b);
    if (m <= s.a || m >= s.b) break;
    Segment l = gk15(g, s.a, m), r = gk15(g, m, s.b);
    total += l.value + r.value - s.value;
    err += l.error + r.error - s.error;
    heap.push(l);
    heap.push(r);
    ++count;
  }
  // recompute sums to remove accumulated rounding from the running totals
  double v = 0.0, e = 0.0;
  while (!heap.empty()) {
    v += heap.top().value;
    e += heap.top().error;
    heap.pop();
  }
  return {v, e};
}

double polylog_quadrature(double s, double z, const QuadratureSpec& spec) {
  // t = u^2 removes the t^{s-1} endpoint behaviour for s >= 1/2
  auto f = [s, z](double u) {
    if (u <= 0.0) return 0.0;
    const double t = u * u;
    const double denom = std::expm1(t) + (1.0 - z);
    return 2.0 * std::pow(u, 2.0 * s - 1.0) * z / denom;
  };
  const double head = integrate(f, 0.0, 1.0, spec).value;
  const double tail = integrate(f, 1.0, std::numeric_limits<double>::infinity(), spec).value;
  return (head + tail) / std::tgamma(s);
}

double gamma_upper_quadrature(double s, double x, const QuadratureSpec& spec) {
  // e^{-x} int_0^inf (x + w)^{s-1} e^{-w} dw
  auto f = [s, x](double w) { return std::exp((s - 1.0) * std::log(x + w) - w); };
  return std::exp(-x) * integrate(f, 0.0, std::numeric_limits<double>::infinity(), spec).value;
}

double prototypical_integral_quadrature(double a, double A, double beta, double mu,
                                        const QuadratureSpec& spec) {
  auto f = [a, beta, mu](double eps) {
    if (eps <= 0.0 && a < 0.0) return 0.0;
    return std::pow(eps, a) * bose_occupation_sum(beta * (eps - mu));
  };
  const double knee = A + 1.0 / beta;
  const double head = integrate(f, A, knee, spec).value;
  const double tail = integrate(f, knee, std::numeric_limits<double>::infinity(), spec).value;
  return head + tail;
}

ChemicalWork chemical_work_quadrature(const std::function<double(double)>& mu,
                                      const std::function<double(double)>& N, int initial_samples,
                                      double rel_tol) {
  constexpr int kMaxLevels = 12;
  std::vector<double> mus, ns;
  auto sample = [&](int n) {
    std::vector<double> m(n + 1), q(n + 1);
    for (int i = 0; i <= n; ++i) {
      // reuse every other point from the previous level
      if (!mus.empty() && i % 2 == 0) {
        m[i] = mus[i / 2];
        q[i] = ns[i / 2];
      } else {
        const double s = static_cast<double>(i) / n;
        m[i] = mu(s);
        q[i] = N(s);
      }
    }
    mus.swap(m);
    ns.swap(q);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum -= 0.5 * (mus[i] + mus[i + 1]) * (ns[i + 1] - ns[i]);
    return sum;
  };
  std::vector<std::vector<double>> table;
  int n = initial_samples;
  for (int level = 0; level < kMaxLevels; ++level, n *= 2) {
    std::vector<double> row{sample(n)};
    double factor = 1.0;
    for (int j = 1; j <= level; ++j) {
      factor *= 4.0;
      row.push_back(row[j - 1] + (row[j - 1] - table[level - 1][j - 1]) / (factor - 1.0));
    }
    table.push_back(row);
    if (level >= 2) {
      const double best = row.back();
      const double prev = table[level - 1].back();
      const double err = std::abs(best - prev);
      if (err <= rel_tol * std::abs(best) || err <= 1e-14) return {best, err, level};
    }
  }
  throw ConvergenceError("chemical_work_quadrature: Romberg table did not settle");
}

double lindblad_rk4(double n0, double n_eq, double theta, double t, int steps) {
  using State = std::array<double, 1>;
  boost::numeric::odeint::runge_kutta4<State> stepper;
  State x{n0};
  auto rhs = [n_eq, theta](const State& y, State& dy, double) { dy[0] = -(y[0] - n_eq) / theta; };
  boost::numeric::odeint::integrate_n_steps(stepper, rhs, x, 0.0, t / steps, steps);
  return x[0];
}

LindbladDecay lindblad_single_mode(double n0, double n_eq, double theta, double t, double tol) {
  if (!(theta > 0.0)) throw DomainError("lindblad_single_mode: theta must be positive");
  LindbladDecay out;
  out.analytic = n_eq + (n0 - n_eq) * std::exp(-t / theta);
  if (t == 0.0) {
    out.ode = n0;
    return out;
  }
  int steps = 8;
  double prev = lindblad_rk4(n0, n_eq, theta, t, steps);
  for (int it = 0; it < 20; ++it) {
    steps *= 2;
    const double cur = lindblad_rk4(n0, n_eq, theta, t, steps);
    if (std::abs(cur - prev) <= tol * std::max(1.0, std::abs(cur))) {
      out.ode = cur;
      out.steps = steps;
      return out;
    }
    prev = cur;
  }
  throw ConvergenceError("lindblad_single_mode: step halving did not converge");
}

SlowDrive slow_drive_ode(const std::function<double(double)>& theta,
                         const std::function<double(double)>& n_eq, double tau) {
  using State = std::array<double, 1>;
  auto lag = [&](double t) {
    State x{n_eq(0.0)};
    auto rhs = [&](const State& y, State& dy, double s) { dy[0] = -t * (y[0] - n_eq(s)) / theta(s); };
    auto stepper = boost::numeric::odeint::make_controlled(1e-13, 1e-13,
                                                           boost::numeric::odeint::runge_kutta_dopri5<State>());
    boost::numeric::odeint::integrate_adaptive(stepper, rhs, x, 0.0, 1.0, 1e-4);
    return n_eq(1.0) - x[0];
  };
  const double l1 = lag(tau);
  const double l2 = lag(2.0 * tau);
  SlowDrive out;
  out.lag_at_tau = l1;
  const double floor = 1e-14 * std::max(1.0, std::abs(n_eq(1.0)));
  if (std::abs(l1) <= floor && std::abs(l2) <= floor) {
    out.halving_ratio = 2.0;
    return out;
  }
  out.halving_ratio = l1 / l2;
  if (std::abs(out.halving_ratio - 2.0) > 0.02) throw FitError("slow_drive_ode: lag does not scale as 1/tau");
  // Richardson on tau * lag = c + O(1/tau)
  out.lag_coefficient = 2.0 * (2.0 * tau * l2) - tau * l1;
  return out;
}

double slow_drive_chemical_work(const std::function<double(double)>& theta,
                                const std::function<double(double)>& n_eq,
                                const std::function<double(double)>& dn_eq,
                                const std::function<double(double)>& mu, double tau) {
  // state: n, -int mu dn, -int mu dn_eq
  using State = std::array<double, 3>;
  auto excess = [&](double t) {
    State x{n_eq(0.0) - theta(0.0) * dn_eq(0.0) / t, 0.0, 0.0};
    auto rhs = [&](const State& y, State& dy, double s) {
      dy[0] = -t * (y[0] - n_eq(s)) / theta(s);
      dy[1] = -mu(s) * dy[0];
      dy[2] = -mu(s) * dn_eq(s);
    };
    auto stepper = boost::numeric::odeint::make_controlled(1e-13, 1e-13,
                                                           boost::numeric::odeint::runge_kutta_dopri5<State>());
    boost::numeric::odeint::integrate_adaptive(stepper, rhs, x, 0.0, 1.0, 1e-4);
    return t * (x[1] - x[2]);
  };
  // tau * excess = c + O(1/tau)
  return 2.0 * excess(2.0 * tau) - excess(tau);
}

}  // namespace qtce::oracle
