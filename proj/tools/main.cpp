// qtce: equation of state, reversible cycles, irreversible performance and
// size-scaling runs from a JSON configuration.

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "config.hpp"
#include "output.hpp"
#include "parallel.hpp"
#include "qtce/errors.hpp"

namespace qtce::cli {
namespace {

struct GlobalOptions {
  std::string config_path;
  std::string out_path;
  std::string format = "json";
  int parallel = 1;
  bool seedless = false;
};

struct EosOptions {
  std::string species = "bose";
  double beta = 1.0;
  std::optional<double> fugacity;
  std::optional<double> beta_mu;
  std::optional<double> rho;
  std::vector<double> box{10.0, 10.0, 10.0};
  std::string regime = "continuum";
  double chi = 1.0;
  std::optional<double> vdw_a;
  std::optional<double> vdw_b;
};

void emit(const GlobalOptions& g, const std::string& text) {
  if (g.out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(g.out_path);
  if (!out) throw ConfigError("--out: cannot write " + g.out_path);
  out << text;
}

void emit(const GlobalOptions& g, const json& doc) { emit(g, doc.dump(2) + "\n"); }

bool csv(const GlobalOptions& g) { return g.format == "csv"; }

double lambda3(double beta) { return std::pow(thermal_wavelength(beta), 3); }

RunConfig require_config(const GlobalOptions& g) {
  if (g.config_path.empty()) throw ConfigError("--config: required for this command");
  return load_config(g.config_path);
}

json phase_json(const PhaseReport& p) {
  json w = json::array();
  for (const auto& s : p.warnings) w.push_back(s);
  return {{"rho", p.rho},
          {"rho_c", p.rho_c},
          {"T_c", p.T_c},
          {"condensate_fraction", p.f},
          {"bec_dim", static_cast<int>(p.bec_dim)},
          {"warnings", w}};
}

void cmd_eos(const GlobalOptions& g, const EosOptions& o) {
  const Species species = parse_species(o.species, "--species");
  if (!(o.beta > 0.0)) throw ConfigError("--beta: must be positive");
  const int given = o.fugacity.has_value() + o.beta_mu.has_value() + o.rho.has_value();
  if (given != 1) throw ConfigError("--fugacity: give exactly one of --fugacity, --beta-mu and --rho");
  if (o.box.size() != 3) throw ConfigError("--box: expected Lx,Ly,Lz");
  BoxGeometry geo{o.box[0], o.box[1], o.box[2], parse_regime(o.regime, "--regime"), o.chi};
  try {
    geo.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("--box: ") + e.what());
  }
  std::optional<VdwParams> vdw;
  if (o.vdw_a || o.vdw_b) vdw = VdwParams{o.vdw_a.value_or(0.0), o.vdw_b.value_or(0.0), 0.0};

  const double V = geo.volume();
  json out = {{"species", o.species}, {"beta", o.beta}, {"box", o.box}, {"regime", o.regime},
              {"V_over_lambda3", V / lambda3(o.beta)}};

  if (species == Species::classical && vdw) {
    if (!o.rho) throw ConfigError("--rho: the classical van der Waals gas needs a density");
    const ClassicalVdw c = classical_vdw(*o.rho, 1.0 / o.beta, *vdw);
    out.update({{"rho", *o.rho}, {"P", c.P}, {"mu", c.mu}, {"vdw", {{"a", vdw->a}, {"b", vdw->b}}}});
    emit(g, out);
    return;
  }

  double mu;
  std::optional<PhaseReport> phase;
  if (o.rho) {
    if (!(*o.rho > 0.0)) throw ConfigError("--rho: must be positive");
    if (vdw) {
      mu = quantum_vdw_solve_mu(species, o.beta, *o.rho, *vdw);
    } else {
      const MuSolution sol = solve_mu(species, o.beta, *o.rho, geo);
      mu = sol.mu;
      phase = sol.phase;
    }
  } else {
    const double beta_mu = o.fugacity ? std::log(*o.fugacity) : *o.beta_mu;
    if (o.fugacity && !(*o.fugacity > 0.0)) throw ConfigError("--fugacity: must be positive");
    if (species == Species::bose && beta_mu > 0.0)
      throw ConfigError(std::string(o.fugacity ? "--fugacity" : "--beta-mu") + ": bosons need fugacity <= 1");
    mu = beta_mu / o.beta;
  }

  const ThermoConditions tc{o.beta, mu};
  const StateFunctions sf = vdw ? quantum_vdw_state_functions(species, tc, V, *vdw) : state_functions(species, tc, geo);
  out.update({{"mu", mu},
              {"fugacity", std::exp(o.beta * mu)},
              {"N", sf.N},
              {"U", sf.U},
              {"P", sf.P},
              {"S", sf.S},
              {"N_condensate", sf.N_condensate},
              {"lambda3_rho", sf.N / V * lambda3(o.beta)}});
  if (vdw) out["vdw"] = {{"a", vdw->a}, {"b", vdw->b}};
  if (!phase) {
    PhaseReport p;
    p.rho = sf.N / V;
    p.rho_c = critical_density(o.beta);
    p.T_c = critical_temperature(p.rho);
    p.f = sf.N > 0.0 ? sf.N_condensate / sf.N : 0.0;
    p.bec_dim = species == Species::bose && sf.N_condensate > 0.0 ? static_cast<BecDim>(bec_dimension(geo.regime))
                                                                  : BecDim::none;
    p.warnings = regime_warnings(geo, {});
    phase = p;
  }
  out["phase"] = phase_json(*phase);
  if (o.rho) out["rho_round_trip"] = sf.N / V;
  out["classicality_ratio"] = sf.N > 0.0 && sf.U > 0.0 ? json(classicality_ratio(sf.N, V, sf.U)) : json(nullptr);
  emit(g, out);
}

void check_family(const RunConfig& cfg, const std::string& family) {
  if (family.empty()) return;
  const std::string declared = cfg.cycle && cfg.cycle->contains("family") ? (*cfg.cycle)["family"].get<std::string>() : "";
  if (declared != family) throw ConfigError("cycle.family: config declares '" + declared + "', command asks for '" + family + "'");
}

void cmd_cycle(const GlobalOptions& g, const std::string& family, const std::string& pv_path) {
  const RunConfig cfg = require_config(g);
  check_family(cfg, family);
  const CycleSpec spec = build_cycle(cfg);
  const EnergyLedger ledger = run_cycle(spec);
  if (!pv_path.empty()) {
    std::ofstream pv(pv_path);
    if (!pv) throw ConfigError("--pv: cannot write " + pv_path);
    pv << pv_csv(pv_diagram(spec, cfg.pv_samples)).str();
  }
  if (csv(g)) {
    emit(g, ledger_csv(spec, ledger).str());
  } else {
    emit(g, json{{"config", cfg.source}, {"ledger", to_json(spec, ledger, lambda3(cfg.beta))}});
  }
}

void cmd_pv(const GlobalOptions& g) {
  const RunConfig cfg = require_config(g);
  const PvDiagram pv = pv_diagram(build_cycle(cfg), cfg.pv_samples);
  if (csv(g)) {
    emit(g, pv_csv(pv).str());
    return;
  }
  json points = json::array();
  for (const auto& p : pv.points)
    points.push_back({{"stroke", p.stroke}, {"V_over_lambda3", p.V_over_lambda3}, {"beta_P_lambda3", p.beta_P_lambda3}});
  emit(g, json{{"config", cfg.source}, {"points", points}, {"enclosed_area", pv.enclosed_area}});
}

void cmd_irr(const GlobalOptions& g) {
  const RunConfig cfg = require_config(g);
  const IrrPerformance p = performance(build_cycle(cfg), cfg.bath, cfg.irr, cfg.classical_baseline);
  if (csv(g)) {
    emit(g, performance_csv(p).str());
  } else {
    emit(g, json{{"config", cfg.source}, {"performance", to_json(p)}});
  }
}

struct SweepRow {
  double value = 0.0;
  EnergyLedger ledger;
  std::optional<IrrPerformance> irr;
};

void cmd_sweep(const GlobalOptions& g) {
  const RunConfig cfg = require_config(g);
  if (!cfg.sweep) throw ConfigError("sweep: required for this command");
  const SweepAxis axis = *cfg.sweep;
  const bool irr = axis.mode == SweepMode::irreversible;
  with_parameter(cfg, axis.parameter, axis.value(0));  // reject a bad axis before spawning work

  const auto rows = parallel_map(axis.steps, g.parallel, [&](int i) {
    SweepRow row;
    row.value = axis.value(i);
    const RunConfig point = with_parameter(cfg, axis.parameter, row.value);
    const CycleSpec spec = build_cycle(point);
    row.ledger = run_cycle(spec);
    if (irr) row.irr = performance(spec, point.bath, point.irr, point.classical_baseline);
    return row;
  });

  if (csv(g)) {
    std::vector<std::string> header{axis.parameter, "WM", "W_in", "W_out", "eta_rev"};
    if (irr) header.insert(header.end(), {"theta_bar", "pi_star", "eta_star", "power_ratio"});
    CsvTable t(header);
    for (const auto& r : rows) {
      std::vector<std::string> cells{fmt(r.value), fmt(r.ledger.total.WM), fmt(r.ledger.W_in), fmt(r.ledger.W_out),
                                     fmt(r.ledger.eta_rev)};
      if (irr)
        cells.insert(cells.end(), {fmt(r.irr->theta_bar), fmt(r.irr->pi_star), fmt(r.irr->eta_star),
                                   fmt(r.irr->power_ratio)});
      t.row(cells);
    }
    emit(g, t.str());
    return;
  }
  json out = json::array();
  for (const auto& r : rows) {
    json row = {{"value", r.value},
                {"WM", r.ledger.total.WM},
                {"W_in", r.ledger.W_in},
                {"W_out", r.ledger.W_out},
                {"eta_rev", r.ledger.eta_rev}};
    if (irr) row["performance"] = to_json(*r.irr);
    out.push_back(row);
  }
  emit(g, json{{"config", cfg.source}, {"rows", out}});
}

void cmd_scaling(const GlobalOptions& g) {
  const RunConfig cfg = require_config(g);
  if (!cfg.scaling) throw ConfigError("scaling: required for this command");
  const ScalingRequest req = *cfg.scaling;
  const auto points = parallel_map(static_cast<int>(req.volumes.size()), g.parallel,
                                   [&](int i) { return scaling_point(req, req.volumes[i]); });
  const ScalingReport report = scaling_report(req, points);
  if (csv(g)) {
    emit(g, scaling_csv(report).str());
    return;
  }
  json pts = json::array(), fits = json::array();
  for (const auto& p : report.points) pts.push_back(to_json(p));
  for (const auto& f : report.fits) fits.push_back(to_json(f));
  emit(g, json{{"config", cfg.source}, {"points", pts}, {"fits", fits}});
}

int run(int argc, char** argv) {
  CLI::App app{"Isothermal chemical engines of ideal quantum gases"};
  app.require_subcommand(1);
  GlobalOptions g;
  app.add_option("--config", g.config_path, "JSON run configuration");
  app.add_option("--out", g.out_path, "Output file (default stdout)");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--parallel", g.parallel, "Worker threads for sweeps and scaling runs")->check(CLI::PositiveNumber);
  app.add_flag("--seedless", g.seedless, "Accepted for scripts; nothing here is random");

  EosOptions eos;
  auto* eos_cmd = app.add_subcommand("eos", "State functions of one equilibrium state");
  eos_cmd->add_option("--species", eos.species)->check(CLI::IsMember({"bose", "fermi", "classical"}));
  eos_cmd->add_option("--beta", eos.beta);
  eos_cmd->add_option("--fugacity", eos.fugacity);
  eos_cmd->add_option("--beta-mu", eos.beta_mu);
  eos_cmd->add_option("--rho", eos.rho, "Density in reduced units");
  eos_cmd->add_option("--box", eos.box, "Lx,Ly,Lz in reduced units")->delimiter(',')->expected(3);
  eos_cmd->add_option("--regime", eos.regime)->check(CLI::IsMember({"continuum", "0d", "1d", "2d"}));
  eos_cmd->add_option("--chi", eos.chi);
  eos_cmd->add_option("--vdw-a", eos.vdw_a);
  eos_cmd->add_option("--vdw-b", eos.vdw_b);

  std::string family, pv_path;
  auto* cycle_cmd = app.add_subcommand("cycle", "Reversible energy ledger");
  cycle_cmd->add_option("family", family)->check(CLI::IsMember({"carnot", "otto"}));
  cycle_cmd->add_option("--pv", pv_path, "Also write the P-V polyline as CSV");

  auto* pv_cmd = app.add_subcommand("pv", "P-V diagram of the configured cycle");
  auto* irr_cmd = app.add_subcommand("irr", "Optimal stroke times, maximum power, efficiency at maximum power");
  auto* sweep_cmd = app.add_subcommand("sweep", "One row per grid point of the configured axis");
  auto* scaling_cmd = app.add_subcommand("scaling", "Size-scaling run and exponent fits");
  for (auto* sub : {eos_cmd, cycle_cmd, pv_cmd, irr_cmd, sweep_cmd, scaling_cmd}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*eos_cmd) cmd_eos(g, eos);
    else if (*cycle_cmd) cmd_cycle(g, family, pv_path);
    else if (*pv_cmd) cmd_pv(g);
    else if (*irr_cmd) cmd_irr(g);
    else if (*sweep_cmd) cmd_sweep(g);
    else if (*scaling_cmd) cmd_scaling(g);
  } catch (const ConfigError& e) {
    std::cerr << "qtce: invalid configuration: " << e.what() << '\n';
    return 2;
  } catch (const std::domain_error& e) {  // DomainError, DivergenceError, DegenerateError
    std::cerr << "qtce: invalid input: " << e.what() << '\n';
    return 2;
  } catch (const RegimeError& e) {
    std::cerr << "qtce: invalid input: " << e.what() << '\n';
    return 2;
  } catch (const ClosureError& e) {
    std::cerr << "qtce: cycle does not close: " << e.what() << '\n';
    return 3;
  } catch (const InvalidEngineError& e) {
    std::cerr << "qtce: not an engine: " << e.what() << '\n';
    return 4;
  } catch (const FitError& e) {
    std::cerr << "qtce: exponent fit failed: " << e.what() << '\n';
    return 5;
  } catch (const std::exception& e) {
    std::cerr << "qtce: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace
}  // namespace qtce::cli

int main(int argc, char** argv) { return qtce::cli::run(argc, argv); }
