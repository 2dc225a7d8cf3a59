#include "output.hpp"

#include <cstdio>
#include <sstream>

namespace qtce::cli {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string CsvTable::str() const {
  std::ostringstream out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out.str();
}

const char* stroke_kind_name(StrokeKind kind) {
  switch (kind) {
    case StrokeKind::iso_T_mu: return "iso_T_mu";
    case StrokeKind::iso_T_N: return "iso_T_N";
    case StrokeKind::iso_T_V: return "iso_T_V";
  }
  return "unknown";
}

json to_json(const StatePoint& s, double lambda3) {
  return {{"mu", s.mu},
          {"N", s.N},
          {"V", s.V},
          {"V_over_lambda3", s.V / lambda3},
          {"P", s.P},
          {"U", s.U},
          {"S", s.S},
          {"box", {s.geo.Lx, s.geo.Ly, s.geo.Lz}}};
}

json to_json(const StrokeEnergy& e) { return {{"WM", e.WM}, {"WC", e.WC}, {"Q", e.Q}, {"dU", e.dU}}; }

json to_json(const CycleSpec& spec, const EnergyLedger& ledger, double lambda3) {
  json states = json::array(), strokes = json::array();
  for (const auto& s : ledger.states) states.push_back(to_json(s, lambda3));
  for (int j = 0; j < 4; ++j) {
    json e = to_json(ledger.strokes[j]);
    e["kind"] = stroke_kind_name(spec.strokes[j].kind);
    strokes.push_back(e);
  }
  return {{"states", states},
          {"strokes", strokes},
          {"total", to_json(ledger.total)},
          {"W_in", ledger.W_in},
          {"W_out", ledger.W_out},
          {"eta_rev", ledger.eta_rev},
          {"load_per_volume", ledger.load_per_volume},
          {"v", ledger.v},
          {"r", ledger.r},
          {"r_prime", ledger.r_prime}};
}

json to_json(const IrrPerformance& p) {
  json strokes = json::array();
  for (int j = 0; j < 4; ++j) {
    const auto& c = p.strokes[j];
    strokes.push_back({{"WM_irr", c.WM},
                       {"WC_irr", c.WC},
                       {"Q_irr", c.Q},
                       {"dU_irr", c.dU},
                       {"tau_star", p.tau_star.tau[j]},
                       {"clamped", p.tau_star.clamped[j]}});
  }
  json out = {{"strokes", strokes},   {"theta_bar", p.theta_bar}, {"W_rev", p.W_rev},
              {"eta_rev", p.eta_rev}, {"pi_star", p.pi_star},     {"eta_star", p.eta_star},
              {"power_ratio", p.power_ratio}};
  if (p.classical) {
    out["classical"] = {{"tau", p.classical->tau}, {"pi", p.classical->pi}, {"eta", p.classical->eta}};
  } else {
    out["classical"] = nullptr;
  }
  return out;
}

json to_json(const ScalingPoint& p) {
  return {{"V_over_lambda3", p.V}, {"box", {p.Lx, p.Ly, p.Lz}}, {"W_rev", p.W_rev},
          {"theta_bar", p.theta_bar}, {"tau", p.tau},           {"pi_star", p.pi_star},
          {"eta_star", p.eta_star}, {"eta_rev", p.eta_rev},     {"pi_class", p.pi_class},
          {"power_ratio", p.power_ratio}};
}

json to_json(const ScalingFit& f) {
  json out = {{"quantity", f.quantity}, {"exponent", f.exponent}, {"rms_residual", f.rms_residual}};
  out["predicted"] = f.predicted ? json(*f.predicted) : json(nullptr);
  return out;
}

CsvTable ledger_csv(const CycleSpec& spec, const EnergyLedger& ledger) {
  CsvTable t({"stroke", "kind", "WM", "WC", "Q", "dU"});
  for (int j = 0; j < 4; ++j) {
    const auto& e = ledger.strokes[j];
    t.row({std::to_string(j + 1), stroke_kind_name(spec.strokes[j].kind), fmt(e.WM), fmt(e.WC), fmt(e.Q),
           fmt(e.dU)});
  }
  const auto& s = ledger.total;
  t.row({"total", "", fmt(s.WM), fmt(s.WC), fmt(s.Q), fmt(s.dU)});
  return t;
}

CsvTable pv_csv(const PvDiagram& pv) {
  CsvTable t({"stroke", "V_over_lambda3", "beta_P_lambda3"});
  for (const auto& p : pv.points) t.row({std::to_string(p.stroke), fmt(p.V_over_lambda3), fmt(p.beta_P_lambda3)});
  return t;
}

CsvTable performance_csv(const IrrPerformance& p) {
  CsvTable t({"stroke", "WM_irr", "WC_irr", "Q_irr", "dU_irr", "tau_star", "clamped"});
  for (int j = 0; j < 4; ++j) {
    const auto& c = p.strokes[j];
    t.row({std::to_string(j + 1), fmt(c.WM), fmt(c.WC), fmt(c.Q), fmt(c.dU), fmt(p.tau_star.tau[j]),
           p.tau_star.clamped[j] ? "1" : "0"});
  }
  return t;
}

CsvTable scaling_csv(const ScalingReport& report) {
  CsvTable t({"V_over_lambda3", "Lx", "Ly", "Lz", "W_rev", "theta_bar", "tau1", "tau2", "tau3", "tau4", "pi_star",
              "eta_star", "eta_rev", "pi_class", "power_ratio"});
  for (const auto& p : report.points)
    t.row({fmt(p.V), fmt(p.Lx), fmt(p.Ly), fmt(p.Lz), fmt(p.W_rev), fmt(p.theta_bar), fmt(p.tau[0]), fmt(p.tau[1]),
           fmt(p.tau[2]), fmt(p.tau[3]), fmt(p.pi_star), fmt(p.eta_star), fmt(p.eta_rev), fmt(p.pi_class),
           fmt(p.power_ratio)});
  return t;
}

}  // namespace qtce::cli
