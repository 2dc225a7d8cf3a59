#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "qtce/cycle_engine.hpp"
#include "qtce/errors.hpp"
#include "qtce/oracles.hpp"

using namespace qtce;

namespace {

const double kLam3 = std::pow(2.0 * std::numbers::pi, 1.5);  // lambda_T^3 at beta = 1
const double kZ32 = 2.612375348685488;

const Substance kFermi{Species::fermi, std::nullopt};
const Substance kBose{Species::bose, std::nullopt};
const Substance kClassical{Species::classical, std::nullopt};

// -int mu dN along an ideal-gas iso-T-V stroke, N from the oracle polylog.
double oracle_isochoric_work(double sign, double z0, double z1, double V_over_lam3) {
  auto z = [&](double s) { return z0 * std::pow(z1 / z0, s); };
  auto mu = [&](double s) { return std::log(z(s)); };
  auto N = [&](double s) { return sign * V_over_lam3 * oracle::polylog_quadrature(1.5, sign * z(s)); };
  return oracle::chemical_work_quadrature(mu, N).value;
}

// Fugacity with sign * Li_{3/2}(sign * z) = y, by bisection in ln z.
double oracle_fugacity(double sign, double y) {
  double lo = -40.0, hi = sign > 0 ? 0.0 : 40.0;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    (sign * oracle::polylog_quadrature(1.5, sign * std::exp(mid)) < y ? lo : hi) = mid;
  }
  return std::exp(0.5 * (lo + hi));
}

GeometryRule cube_rule(Anisotropy regime) {
  GeometryRule g;
  g.reference = BoxGeometry::cube(1.0, regime);
  return g;
}

void check_first_law(const EnergyLedger& led) {
  for (const auto& e : led.strokes) {
    const double scale = std::max({std::abs(e.Q), std::abs(e.WM), std::abs(e.WC), std::abs(e.dU), 1e-300});
    CHECK(std::abs(e.dU - (e.Q - e.WM - e.WC)) <= 1e-10 * scale);
  }
}

}  // namespace

TEST_CASE("iso-T-N stroke between identical states") {
  const StatePoint s = resolve_state(kFermi, 1.0, {0.3, 100.0, kUnset});
  const StrokeEnergy e = stroke_energy(StrokeKind::iso_T_N, s, s, 1.0);
  CHECK(e.WM == 0.0);
  CHECK(e.WC == 0.0);
  CHECK(e.Q == 0.0);
  CHECK(e.dU == 0.0);
}

TEST_CASE("iso-T-V bosonic stroke against path quadrature") {
  const double V = 5000.0 * kLam3;
  const StatePoint a = resolve_state(kBose, 1.0, {std::log(0.1), kUnset, V});
  const StatePoint b = resolve_state(kBose, 1.0, {std::log(0.6), kUnset, V});
  const StrokeEnergy e = stroke_energy(StrokeKind::iso_T_V, a, b, 1.0);
  const double ref = oracle_isochoric_work(1.0, 0.1, 0.6, 5000.0);
  CHECK(e.WC == doctest::Approx(ref).epsilon(1e-7));
  CHECK(e.WM == 0.0);
  CHECK(e.dU == doctest::Approx(e.Q - e.WC).epsilon(1e-12));
}

TEST_CASE("iso-T-mu chemical work is -mu dN for every substance") {
  const std::vector<std::pair<Substance, double>> cases{
      {kFermi, 0.7},
      {kBose, -0.4},
      {kClassical, -2.0},
      {Substance{Species::fermi, VdwParams{0.3, 0.5, 0.0}}, -0.5},
      {Substance{Species::classical, VdwParams{0.1, 0.2, 0.0}}, -2.0},
  };
  for (const auto& [sub, mu] : cases) {
    const StatePoint a = resolve_state(sub, 1.0, {mu, 500.0, kUnset});
    const StatePoint b = resolve_state(sub, 1.0, {mu, 300.0, kUnset});
    const StrokeEnergy e = stroke_energy(StrokeKind::iso_T_mu, a, b, 1.0);
    CHECK(e.WC == -mu * (300.0 - 500.0));
    CHECK(e.WM == doctest::Approx(b.P * b.V - a.P * a.V).epsilon(1e-15));
    CHECK(e.dU == doctest::Approx(e.Q - e.WM - e.WC).epsilon(1e-10));
  }
}

TEST_CASE("Carnot efficiency branches") {
  SUBCASE("mu1 < 0 <= mu3 gives exactly one") {
    for (double mu3 : {0.0, 0.3, 1.5}) {
      const auto led = run_cycle(make_carnot(kFermi, 1.0, -1.0, mu3, 1000.0, 500.0));
      CHECK(led.eta_rev == 1.0);
      CHECK(led.W_out == 0.0);
    }
  }
  SUBCASE("both negative") {
    const auto led = run_cycle(make_carnot(kFermi, 1.0, -2.0, -1.0, 1000.0, 500.0));
    CHECK(led.eta_rev == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("both positive") {
    const auto led = run_cycle(make_carnot(kFermi, 1.0, 0.5, 2.0, 1000.0, 500.0));
    CHECK(led.eta_rev == doctest::Approx(0.75).epsilon(1e-12));
  }
}

TEST_CASE("Carnot closed form") {
  CHECK(carnot_closed_form(-1.0, -1.0, 10.0, 5.0, 5.0, 10.0, 1.0).eta == 0.0);
  const auto cf = carnot_closed_form(-2.0, -1.0, 10.0, 5.0, 5.0, 10.0, 0.3);
  CHECK(cf.load_per_volume == doctest::Approx(1.0 * 0.3 / 2.0).epsilon(1e-15));
  CHECK_THROWS_AS(carnot_closed_form(0.0, 0.0, 10.0, 5.0, 5.0, 10.0, 1.0), DegenerateError);
  CHECK_THROWS_AS(carnot_closed_form(-1.0, -0.5, 10.0, 5.0, 6.0, 10.0, 1.0), DomainError);

  for (double bm1 : {-3.0, -0.7, 0.2}) {
    for (double d : {0.4, 1.0, 2.5}) {
      const auto led = run_cycle(make_carnot(kFermi, 1.0, bm1, bm1 + d, 1000.0, 500.0));
      const StatePoint& s1 = led.states[0];
      const auto c = carnot_closed_form(bm1, bm1 + d, s1.N, led.states[1].N, led.states[2].N, led.states[3].N,
                                        s1.N / s1.V);
      CHECK(led.eta_rev == doctest::Approx(c.eta).epsilon(1e-9));
      CHECK(led.W_in == doctest::Approx(c.W_in).epsilon(1e-9));
      CHECK(led.W_out == doctest::Approx(c.W_out).epsilon(1e-9).scale(c.W_in));
      CHECK(led.load_per_volume == doctest::Approx(c.load_per_volume).epsilon(1e-9));
    }
  }
}

TEST_CASE("Otto closed forms against path quadrature") {
  const double V1 = 5000.0;
  for (double V3 : {500.0, 2000.0, 3500.0}) {
    const double rho3 = 500.0 / V3, rho4 = 1000.0 / V3, v = V3 / V1;
    for (Species sp : {Species::bose, Species::fermi}) {
      const double sign = sp == Species::bose ? 1.0 : -1.0;
      // closed form in units lambda_T = 1, so beta W carries V / lambda^3 directly
      UnitSystem u;
      u.mass = 2.0 * std::numbers::pi;
      const auto w = otto_chemical_work(sp, 1.0, rho3, rho4, v, V3, u);
      auto z_of = [&](double y) { return oracle_fugacity(sign, y); };
      const double ref1 = oracle_isochoric_work(sign, z_of(v * rho4), z_of(v * rho3), V1);
      const double ref3 = oracle_isochoric_work(sign, z_of(rho3), z_of(rho4), V3);
      CAPTURE(V3);
      CHECK(w.W1 == doctest::Approx(ref1).epsilon(1e-7));
      CHECK(w.W3 == doctest::Approx(ref3).epsilon(1e-7));

      const auto led = run_cycle(make_otto({sp, std::nullopt}, 1.0, 1000.0, 500.0, V1 * kLam3, V3 * kLam3));
      CHECK(led.strokes[0].WC == doctest::Approx(w.W1).epsilon(1e-9));
      CHECK(led.strokes[2].WC == doctest::Approx(w.W3).epsilon(1e-9));
    }
  }
}

TEST_CASE("Otto closed form edge cases") {
  CHECK(otto_chemical_work(Species::fermi, 1.0, 0.01, 0.01, 0.5, 100.0).W3 == 0.0);
  CHECK_THROWS_AS(otto_chemical_work(Species::bose, 1.0, 0.1, 3.0 / kLam3, 0.5, 100.0), DomainError);
  CHECK_NOTHROW(otto_chemical_work(Species::bose, 1.0, 0.1, kZ32 / kLam3, 0.5, 100.0));
}

TEST_CASE("classical Otto efficiency falls like 1 / |ln z|") {
  std::vector<double> scaled;
  for (double z : {1e-3, 1e-4, 1e-5}) {
    const auto w = otto_chemical_work(Species::classical, 1.0, z / kLam3, 2.0 * z / kLam3, 1.0 / 3.0, 1e6);
    const double wc[] = {w.W1, w.W3};
    const double eta = split_chemical_work(wc).eta;
    CHECK(eta > 0.0);
    scaled.push_back(eta * std::abs(std::log(z)));
  }
  for (double s : scaled) CHECK(s == doctest::Approx(scaled.front()).epsilon(0.2));
}

TEST_CASE("Otto ledger depends only on lambda^3 rho and v") {
  auto run = [](double beta) {
    const double lam3 = std::pow(thermal_wavelength(beta), 3);
    return run_cycle(make_otto(kFermi, beta, 1000.0, 500.0, 5000.0 * lam3, 2000.0 * lam3));
  };
  const auto a = run(1.0), b = run(2.7);
  CHECK(a.eta_rev == doctest::Approx(b.eta_rev).epsilon(1e-11));
  for (int j = 0; j < 4; ++j) CHECK(a.strokes[j].WC == doctest::Approx(2.7 * b.strokes[j].WC).epsilon(1e-10));
}

TEST_CASE("BEC Otto closed forms") {
  const double rc = kZ32 / kLam3;
  OttoBecGeometry g{3.0, 1.0, 3.0, 1.0, 1.0, 1.0};
  SUBCASE("0D: equal injection densities give zero work") {
    const auto w = otto_bec_chemical_work(0, 1.0, {2 * rc, 1.5 * rc, 3 * rc, 3 * rc}, g);
    CHECK(w.W3 == 0.0);
  }
  SUBCASE("0D: efficiency vanishes deep in the condensate") {
    const double v = 1.0 / 3.0;
    const double r3 = 1e4 * rc, r4 = 2e4 * rc;
    const auto w = otto_bec_chemical_work(0, 1.0, {v * r4, v * r3, r3, r4}, g);
    const double wc[] = {w.W1, w.W3};
    CHECK(std::abs(split_chemical_work(wc).eta) < 1e-3);
  }
  SUBCASE("1D: efficiency approaches 1 - v^(2r)") {
    const double v = 1.0 / 3.0;
    for (double r : {0.5, 1.0}) {
      const double r3 = 300 * rc, r4 = 600 * rc;
      const OttoBecGeometry g1{1.0, v, 1.0, std::pow(v, r), 1.0, 1.0};
      const auto w = otto_bec_chemical_work(1, 1.0, {v * r4, v * r3, r3, r4}, g1);
      const double wc[] = {w.W1, w.W3};
      CHECK(split_chemical_work(wc).eta == doctest::Approx(1.0 - std::pow(v, 2 * r)).epsilon(0.05));
    }
  }
  SUBCASE("0D closed form against the condensed ledger") {
    const double V3 = 1e8 * kLam3, V1 = 3.0 * V3;
    const double N3 = 4.0 * rc * V3, N1 = 8.0 * rc * V3;
    const auto led = run_cycle(make_otto(kBose, 1.0, N1, N3, V1, V3, cube_rule(Anisotropy::isotropic_0d)));
    const auto w = otto_bec_chemical_work(0, 1.0, {N1 / V1, N3 / V1, N3 / V3, N1 / V3}, g);
    CHECK(led.strokes[0].WC == doctest::Approx(w.W1).epsilon(1e-3));
    CHECK(led.strokes[2].WC == doctest::Approx(w.W3).epsilon(1e-3));
  }
  CHECK_THROWS_AS(otto_bec_chemical_work(0, 1.0, {0.5 * rc, 2 * rc, 3 * rc, 4 * rc}, g), DomainError);
}

TEST_CASE("Otto with a condensate only while injecting") {
  const double V3 = 1e6 * kLam3, V1 = 3.0 * V3;
  const double rc = kZ32 / kLam3;
  const double N3 = rc * V3, N1 = 3.0 * rc * V3;
  const auto led = run_cycle(make_otto(kBose, 1.0, N1, N3, V1, V3, cube_rule(Anisotropy::isotropic_0d)));
  CHECK(led.W_out / led.W_in <= 0.05);
  CHECK(led.eta_rev >= 0.95);
  check_first_law(led);
}

TEST_CASE("Carnot BEC efficiencies") {
  const double rc = kZ32 / kLam3;
  const BoxGeometry a = BoxGeometry::cube(1000.0), b = BoxGeometry::cube(1000.0);
  CHECK(carnot_bec_efficiency(0, 0, 1.0, 2.0 * rc * 1000.0, a, b) == 0.0);
  CHECK(carnot_bec_efficiency(2, 1, 1.0, 2.0 * rc * 1000.0, a, b) == 1.0);
  CHECK_THROWS_AS(carnot_bec_efficiency(0, 0, 1.0, 5.0 * rc * 1000.0, BoxGeometry::cube(10.0), a), DomainError);

  const BoxGeometry slab2{100.0, 100.0, 4.0}, slab3{80.0, 80.0, 4.0};
  const double N2 = 2.0 * rc * slab2.volume();
  CHECK(carnot_bec_efficiency(2, 2, 1.0, 2.0 * rc * slab2.volume(), slab2, slab2) == doctest::Approx(0.0));
  const double rho2 = N2 / slab2.volume(), rho3 = N2 / slab3.volume();
  const double lam2 = std::pow(kLam3, 2.0 / 3.0);
  CHECK(carnot_bec_efficiency(2, 2, 1.0, N2, slab2, slab3) ==
        doctest::Approx(1.0 - std::exp((rho2 - rho3) * 4.0 * lam2)).epsilon(1e-12));
  CHECK(carnot_bec_efficiency(2, 2, 1.0, N2, slab2, slab3) > 0.0);
}

TEST_CASE("1D Carnot BEC formula against the ledger") {
  const double lam = std::cbrt(kLam3);
  GeometryRule rule;
  rule.reference = {1.0, 2.0 * lam, 2.0 * lam, Anisotropy::quasi_1d, 1.0};
  rule.reference.Lx = 1.0 / (rule.reference.Ly * rule.reference.Lz);
  rule.ex = 1.0;
  rule.ey = rule.ez = 0.0;
  const double rc = kZ32 / kLam3;
  const double V2 = 4e5 * kLam3, V3 = 0.6 * V2;
  const double N2 = 12.0 * rc * V2;
  const BoxGeometry g2 = rule.at(V2), g3 = rule.at(V3);
  CHECK((N2 / V2 - rc) * g2.Ly * g2.Lz * lam >= 100.0);
  const double mu1 = resolve_state(kBose, 1.0, {kUnset, N2, V2}, rule).mu;
  const double mu3 = resolve_state(kBose, 1.0, {kUnset, N2, V3}, rule).mu;
  const auto led = run_cycle(make_carnot(kBose, 1.0, mu1, mu3, 1.3 * N2, N2, rule));
  check_first_law(led);
  CHECK(led.eta_rev == doctest::Approx(carnot_bec_efficiency(1, 1, 1.0, N2, g2, g3)).epsilon(1e-3));
}

TEST_CASE("closure and stroke consistency are enforced") {
  CycleSpec c = make_otto(kFermi, 1.0, 1000.0, 500.0, 5000.0, 2000.0);
  c.strokes[3].end.N = 900.0;
  CHECK_THROWS_AS(run_cycle(c), DomainError);
  c = make_otto(kFermi, 1.0, 1000.0, 500.0, 5000.0, 2000.0);
  c.strokes[3].end.N = 1000.5;
  c.strokes[3].start.N = 1000.5;
  CHECK_THROWS_AS(run_cycle(c), ClosureError);
  c = make_carnot(kFermi, 1.0, -1.0, 0.5, 1000.0, 500.0);
  c.strokes[0].end.mu = -0.9;
  CHECK_THROWS_AS(run_cycle(c), DomainError);
}

TEST_CASE("random reversible cycles satisfy the first law and close") {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int n = 0; n < 50; ++n) {
    const int pick = n % 3;
    const Substance sub{pick == 0 ? Species::fermi : pick == 1 ? Species::bose : Species::classical, std::nullopt};
    CycleSpec spec;
    if (n % 2 == 0) {
      const double mu1 = sub.species == Species::fermi ? -3.0 + 4.0 * U(rng) : -4.0 + 3.5 * U(rng);
      const double mu3 = sub.species == Species::fermi ? mu1 + 0.2 + 1.8 * U(rng) : mu1 + (-0.05 - mu1) * (0.1 + 0.9 * U(rng));
      const double N1 = 500.0 + 4500.0 * U(rng);
      spec = make_carnot(sub, 1.0, mu1, mu3, N1, N1 * (0.3 + 0.5 * U(rng)));
    } else {
      const double V3 = (500.0 + 5000.0 * U(rng)) * kLam3;
      const double v = 0.2 + 0.6 * U(rng);
      const double y3 = 0.05 + 0.95 * U(rng), y4 = y3 * (1.2 + 0.8 * U(rng));
      spec = make_otto(sub, 1.0, y4 * V3 / kLam3, y3 * V3 / kLam3, V3 / v, V3);
    }
    const auto led = run_cycle(spec);
    CAPTURE(n);
    check_first_law(led);
    CHECK(led.W_in > 0.0);
    CHECK(std::abs(led.total.dU) <= 1e-8 * led.W_in);
    CHECK(std::abs(led.total.WM + led.total.WC) <= 1e-8 * std::abs(led.total.WM));
    CHECK(std::abs(led.total.Q) <= 1e-8 * std::abs(led.total.WM));
    CHECK(led.eta_rev <= 1.0);
  }
}

TEST_CASE("van der Waals cycles") {
  const Substance qf{Species::fermi, VdwParams{0.2, 0.4, 0.0}};
  const auto led = run_cycle(make_carnot(qf, 1.0, -1.0, 0.5, 800.0, 400.0));
  CHECK(led.eta_rev == 1.0);
  check_first_law(led);
  CHECK(std::abs(led.total.WM + led.total.WC) <= 1e-8 * std::abs(led.total.WM));

  const Substance cv{Species::classical, VdwParams{0.5, 0.3, 0.0}};
  const auto otto = run_cycle(make_otto(cv, 1.0, 300.0, 150.0, 3000.0, 1000.0));
  check_first_law(otto);
  CHECK(std::abs(otto.total.dU) <= 1e-8 * otto.W_in);
  const auto pv = pv_diagram(make_otto(cv, 1.0, 300.0, 150.0, 3000.0, 1000.0), 400);
  CHECK(pv.enclosed_area == doctest::Approx(otto.total.WM).epsilon(1e-4));
}

TEST_CASE("P-V diagrams") {
  SUBCASE("fermion Carnot areas grow with z3") {
    double prev = 0.0;
    for (double z3 : {0.6, 1.1, 1.6}) {
      const auto pv = pv_diagram(make_carnot(kFermi, 1.0, std::log(0.1), std::log(z3), 1000.0, 500.0), 100);
      CHECK(pv.points.size() == 400);
      CHECK(pv.enclosed_area > prev);
      prev = pv.enclosed_area;
    }
  }
  SUBCASE("degenerate cycle has zero area") {
    CycleSpec c = make_otto(kFermi, 1.0, 700.0, 700.0, 3000.0, 3000.0);
    const auto pv = pv_diagram(c, 50);
    CHECK(pv.enclosed_area == 0.0);
    CHECK(run_cycle(c).total.WM == 0.0);
  }
  SUBCASE("loop area converges to the ledger load") {
    const CycleSpec c = make_carnot(kFermi, 1.0, std::log(0.1), std::log(1.1), 1000.0, 500.0);
    const double ref = run_cycle(c).total.WM;
    const double e200 = pv_diagram(c, 200).enclosed_area - ref;
    const double e400 = pv_diagram(c, 400).enclosed_area - ref;
    CHECK(std::abs(pv_diagram(c, 2000).enclosed_area - ref) <= 1e-4 * std::abs(ref));
    CHECK(e200 / e400 == doctest::Approx(4.0).epsilon(0.05));
  }
  CHECK_THROWS_AS(pv_diagram(make_otto(kFermi, 1.0, 700.0, 350.0, 3000.0, 1000.0), 1), DomainError);
}
