#include "config.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace qtce::cli {
namespace {

// Reads the keys of one JSON object and rejects anything it did not read.
class Fields {
 public:
  Fields(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError(where("") + ": expected an object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return obj_.contains(key);
  }

  const json& raw(const std::string& key) {
    if (!has(key)) throw ConfigError(where(key) + ": required");
    return obj_.at(key);
  }

  double number(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number()) throw ConfigError(where(key) + ": expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(where(key) + ": must be finite");
    return x;
  }
  double number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

  double positive(const std::string& key) {
    const double x = number(key);
    if (!(x > 0.0)) throw ConfigError(where(key) + ": must be positive");
    return x;
  }
  double positive(const std::string& key, double fallback) { return has(key) ? positive(key) : fallback; }

  int integer(const std::string& key, int fallback) {
    if (!has(key)) return fallback;
    const json& v = obj_.at(key);
    if (!v.is_number_integer()) throw ConfigError(where(key) + ": expected an integer");
    return v.get<int>();
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = obj_.at(key);
    if (!v.is_boolean()) throw ConfigError(where(key) + ": expected true or false");
    return v.get<bool>();
  }

  std::string text(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_string()) throw ConfigError(where(key) + ": expected a string");
    return v.get<std::string>();
  }
  std::string text(const std::string& key, const std::string& fallback) { return has(key) ? text(key) : fallback; }

  std::vector<double> numbers(const std::string& key, std::size_t count = 0) {
    const json& v = raw(key);
    if (!v.is_array()) throw ConfigError(where(key) + ": expected an array");
    std::vector<double> out;
    for (const json& e : v) {
      if (!e.is_number()) throw ConfigError(where(key) + ": expected numbers");
      out.push_back(e.get<double>());
    }
    if (count && out.size() != count)
      throw ConfigError(where(key) + ": expected " + std::to_string(count) + " entries");
    return out;
  }

  // Exactly one of two alternative keys.
  std::string one_of(const std::string& a, const std::string& b) {
    const bool ha = has(a), hb = has(b);
    if (ha == hb) throw ConfigError(where(a) + ": give exactly one of '" + a + "' and '" + b + "'");
    return ha ? a : b;
  }

  std::string where(const std::string& key) const {
    if (key.empty()) return path_.empty() ? "config" : path_;
    return path_.empty() ? key : path_ + "." + key;
  }

  void finish() const {
    for (const auto& item : obj_.items())
      if (!seen_.count(item.key())) throw ConfigError(where(item.key()) + ": unknown key");
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

double lambda3(const RunConfig& cfg) { return std::pow(thermal_wavelength(cfg.beta), 3); }

Substance parse_substance(const json& j) {
  Fields f(j, "substance");
  Substance s;
  s.species = parse_species(f.text("species"), f.where("species"));
  if (f.has("vdw")) {
    Fields v(j.at("vdw"), "substance.vdw");
    VdwParams p;
    p.a = v.number("a", 0.0);
    p.b = v.number("b", 0.0);
    p.phi = v.number("phi", 0.0);
    if (p.b < 0.0) throw ConfigError("substance.vdw.b: must be nonnegative");
    v.finish();
    s.vdw = p;
  }
  f.finish();
  return s;
}

GeometryRule parse_geometry(const json& j, double lam) {
  Fields f(j, "geometry");
  GeometryRule g;
  const auto box = f.has("box_over_lambda") ? f.numbers("box_over_lambda", 3) : std::vector<double>{1.0, 1.0, 1.0};
  g.reference = {box[0] * lam, box[1] * lam, box[2] * lam, parse_regime(f.text("regime", "continuum"), "geometry.regime"),
                 f.positive("chi", 1.0)};
  if (f.has("exponents")) {
    const auto e = f.numbers("exponents", 3);
    if (std::abs(e[0] + e[1] + e[2] - 1.0) > 1e-12) throw ConfigError("geometry.exponents: must sum to 1");
    g.ex = e[0];
    g.ey = e[1];
    g.ez = e[2];
  }
  f.finish();
  try {
    g.reference.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("geometry.box_over_lambda: ") + e.what());
  }
  return g;
}

BathSpec parse_bath(const json& j) {
  Fields f(j, "bath");
  const std::string preset = f.text("preset", "constant");
  const double kappa = f.positive("kappa", 1.0);
  const double coupling = f.positive("coupling", 1.0);
  BathSpec b;
  if (preset == "constant" || preset == "custom") {
    b = BathSpec::constant(kappa, coupling);
    if (preset == "custom" && f.has("terms")) {
      const json& terms = f.raw("terms");
      if (!terms.is_array()) throw ConfigError("bath.terms: expected an array of [kappa_j, alpha_j]");
      for (const json& t : terms) {
        if (!t.is_array() || t.size() != 2 || !t[0].is_number() || !t[1].is_number())
          throw ConfigError("bath.terms: expected [kappa_j, alpha_j] pairs");
        b.terms.emplace_back(t[0].get<double>(), t[1].get<double>());
      }
    }
  } else if (preset == "lorentzian") {
    b = BathSpec::lorentzian(kappa, f.number("kappa_prime"), coupling);
  } else if (preset == "exponential") {
    const int order = f.integer("order", 12);
    if (order < 1) throw ConfigError("bath.order: must be at least 1");
    b = BathSpec::exponential(kappa, f.number("kappa_prime"), order, coupling);
  } else {
    throw ConfigError("bath.preset: expected constant, lorentzian, exponential or custom");
  }
  f.finish();
  try {
    b.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("bath: ") + e.what());
  }
  return b;
}

void parse_irr(const json& j, RunConfig& cfg) {
  Fields f(j, "irr");
  cfg.irr.s = f.number("s", cfg.irr.s);
  if (!(cfg.irr.s > 0.0 && cfg.irr.s < 1.0)) throw ConfigError("irr.s: must lie in (0, 1)");
  cfg.irr.z_classical = f.number("z_classical", cfg.irr.z_classical);
  if (!(cfg.irr.z_classical > 0.0 && cfg.irr.z_classical < 1.0))
    throw ConfigError("irr.z_classical: must lie in (0, 1)");
  cfg.irr.samples_per_stroke = f.integer("samples_per_stroke", cfg.irr.samples_per_stroke);
  if (cfg.irr.samples_per_stroke < 3 || cfg.irr.samples_per_stroke % 2 == 0)
    throw ConfigError("irr.samples_per_stroke: must be odd and at least 3");
  cfg.irr.theta_samples = f.integer("theta_samples", cfg.irr.theta_samples);
  if (cfg.irr.theta_samples < 4) throw ConfigError("irr.theta_samples: must be at least 4");
  cfg.classical_baseline = f.boolean("classical_baseline", true);
  f.finish();
}

SweepAxis parse_sweep(const json& j) {
  Fields f(j, "sweep");
  SweepAxis a;
  a.parameter = f.text("parameter");
  a.from = f.number("from");
  a.to = f.number("to");
  a.steps = f.integer("steps", 0);
  if (a.steps < 1) throw ConfigError("sweep.steps: empty range, need at least 1 step");
  if (a.steps > 1 && a.from == a.to) throw ConfigError("sweep.to: empty range, from == to");
  const std::string spacing = f.text("spacing", "linear");
  if (spacing != "linear" && spacing != "log") throw ConfigError("sweep.spacing: expected linear or log");
  a.log_spacing = spacing == "log";
  if (a.log_spacing && !(a.from > 0.0 && a.to > 0.0)) throw ConfigError("sweep.from: log spacing needs positive bounds");
  const std::string mode = f.text("mode", "reversible");
  if (mode != "reversible" && mode != "irreversible")
    throw ConfigError("sweep.mode: expected reversible or irreversible");
  a.mode = mode == "reversible" ? SweepMode::reversible : SweepMode::irreversible;
  f.finish();
  return a;
}

ScalingRequest parse_scaling(const json& j) {
  Fields f(j, "scaling");
  ScalingRequest r;
  const std::string regime = f.text("regime");
  if (regime == "no_bec") r.regime = ScalingRegime::no_bec;
  else if (regime == "classical") r.regime = ScalingRegime::classical;
  else if (regime == "0d") r.regime = ScalingRegime::bec0d;
  else if (regime == "1d") r.regime = ScalingRegime::bec1d;
  else if (regime == "2d") r.regime = ScalingRegime::bec2d;
  else throw ConfigError("scaling.regime: expected no_bec, classical, 0d, 1d or 2d");
  const std::string family = f.text("family", "carnot");
  if (family != "carnot" && family != "otto") throw ConfigError("scaling.family: expected carnot or otto");
  r.family = family == "carnot" ? CycleFamily::carnot : CycleFamily::otto;
  const std::string placement = f.text("placement", "third_stroke");
  if (placement != "third_stroke" && placement != "all_strokes")
    throw ConfigError("scaling.placement: expected third_stroke or all_strokes");
  r.placement = placement == "third_stroke" ? BecPlacement::third_stroke : BecPlacement::all_strokes;
  r.chi = f.positive("chi", 1.0);
  r.volumes = f.numbers("volumes");
  for (double v : r.volumes)
    if (!(v > 1.0)) throw ConfigError("scaling.volumes: entries must exceed 1 (units of lambda_T^3)");
  f.finish();
  return r;
}

}  // namespace

Species parse_species(const std::string& name, const std::string& field) {
  if (name == "bose") return Species::bose;
  if (name == "fermi") return Species::fermi;
  if (name == "classical") return Species::classical;
  throw ConfigError(field + ": expected bose, fermi or classical");
}

Anisotropy parse_regime(const std::string& name, const std::string& field) {
  if (name == "continuum") return Anisotropy::continuum;
  if (name == "0d") return Anisotropy::isotropic_0d;
  if (name == "1d") return Anisotropy::quasi_1d;
  if (name == "2d") return Anisotropy::quasi_2d;
  throw ConfigError(field + ": expected continuum, 0d, 1d or 2d");
}

double SweepAxis::value(int i) const {
  if (steps == 1) return from;
  const double t = static_cast<double>(i) / (steps - 1);
  return log_spacing ? from * std::pow(to / from, t) : from + (to - from) * t;
}

RunConfig parse_config(const json& doc) {
  Fields f(doc, "");
  RunConfig cfg;
  cfg.source = doc;
  cfg.beta = f.positive("beta", 1.0);
  cfg.substance = f.has("substance") ? parse_substance(doc.at("substance")) : Substance{Species::bose, std::nullopt};
  const double lam = thermal_wavelength(cfg.beta);
  if (f.has("geometry")) {
    cfg.geometry = parse_geometry(doc.at("geometry"), lam);
  } else {
    cfg.geometry.reference = BoxGeometry::cube(lam * lam * lam);
  }
  if (f.has("cycle")) {
    if (!doc.at("cycle").is_object()) throw ConfigError("cycle: expected an object");
    cfg.cycle = doc.at("cycle");
  }
  cfg.pv_samples = f.integer("pv_samples", 100);
  if (cfg.pv_samples < 2) throw ConfigError("pv_samples: must be at least 2");
  if (f.has("bath")) cfg.bath = parse_bath(doc.at("bath"));
  if (f.has("irr")) parse_irr(doc.at("irr"), cfg);
  if (f.has("sweep")) cfg.sweep = parse_sweep(doc.at("sweep"));
  if (f.has("scaling")) {
    cfg.scaling = parse_scaling(doc.at("scaling"));
    cfg.scaling->bath = cfg.bath;
    cfg.scaling->settings = cfg.irr;
  }
  f.finish();
  if (cfg.cycle) build_cycle(cfg);  // validate now so errors carry field names early
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config: cannot open " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("--config: " + std::string(e.what()));
  }
  return parse_config(doc);
}

CycleSpec build_cycle(const RunConfig& cfg) {
  if (!cfg.cycle) throw ConfigError("cycle: required for this command");
  Fields f(*cfg.cycle, "cycle");
  const std::string family = f.text("family");
  const double lam3 = lambda3(cfg);
  CycleSpec spec;
  if (family == "carnot") {
    auto mu_of = [&](const std::string& z_key, const std::string& bm_key) {
      const std::string key = f.one_of(z_key, bm_key);
      const double beta_mu = key == bm_key ? f.number(bm_key) : std::log(f.positive(z_key));
      if (cfg.substance.species == Species::bose && beta_mu > 0.0)
        throw ConfigError(f.where(key) + ": bosons need fugacity <= 1");
      return beta_mu / cfg.beta;
    };
    const double mu1 = mu_of("z1", "beta_mu1");
    const double mu3 = mu_of("z3", "beta_mu3");
    const double N1 = f.positive("N1"), N3 = f.positive("N3");
    f.finish();
    spec = make_carnot(cfg.substance, cfg.beta, mu1, mu3, N1, N3, cfg.geometry);
  } else if (family == "otto") {
    double N1, N3, V1, V3;
    if (f.has("rho4_lambda3")) {
      const double r3 = f.positive("rho3_lambda3"), r4 = f.positive("rho4_lambda3");
      const double v = f.positive("v");
      if (!(v < 1.0)) throw ConfigError("cycle.v: must lie in (0, 1)");
      V3 = f.positive("V3_over_lambda3") * lam3;
      V1 = V3 / v;
      N3 = r3 * V3 / lam3;
      N1 = r4 * V3 / lam3;
    } else {
      N1 = f.positive("N1");
      N3 = f.positive("N3");
      V1 = f.positive("V1_over_lambda3") * lam3;
      V3 = f.positive("V3_over_lambda3") * lam3;
    }
    f.finish();
    spec = make_otto(cfg.substance, cfg.beta, N1, N3, V1, V3, cfg.geometry);
  } else {
    throw ConfigError("cycle.family: expected carnot or otto");
  }
  return spec;
}

RunConfig with_parameter(const RunConfig& cfg, const std::string& parameter, double value) {
  json doc = cfg.source;
  if (parameter == "beta") {
    doc["beta"] = value;
  } else if (parameter == "irr.s" || parameter == "irr.z_classical") {
    doc["irr"][parameter.substr(4)] = value;
  } else if (parameter.rfind("cycle.", 0) == 0) {
    const std::string key = parameter.substr(6);
    if (!doc.contains("cycle") || !doc["cycle"].contains(key) || !doc["cycle"][key].is_number())
      throw ConfigError("sweep.parameter: cycle has no numeric key '" + key + "'");
    doc["cycle"][key] = value;
  } else {
    throw ConfigError("sweep.parameter: expected beta, irr.s, irr.z_classical or cycle.<key>");
  }
  return parse_config(doc);
}

}  // namespace qtce::cli
