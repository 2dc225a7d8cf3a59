#pragma once

// JSON run configuration for the qtce command line tool. Every object is
// checked for unknown keys; errors name the offending field.

#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "qtce/cycle_engine.hpp"
#include "qtce/irreversible.hpp"

namespace qtce::cli {

using nlohmann::json;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class SweepMode { reversible, irreversible };

struct SweepAxis {
  std::string parameter;  // "beta", "irr.s", "irr.z_classical" or "cycle.<key>"
  double from = 0.0;
  double to = 0.0;
  int steps = 0;
  bool log_spacing = false;
  SweepMode mode = SweepMode::reversible;

  double value(int i) const;
};

struct RunConfig {
  json source;  // the document as read, for echoing and sweeps
  Substance substance;
  double beta = 1.0;
  GeometryRule geometry;
  std::optional<json> cycle;
  int pv_samples = 100;
  BathSpec bath;
  IrrSettings irr;
  bool classical_baseline = true;
  std::optional<SweepAxis> sweep;
  std::optional<ScalingRequest> scaling;
};

RunConfig parse_config(const json& doc);
RunConfig load_config(const std::string& path);

/// Cycle described by the "cycle" object (throws ConfigError when absent).
CycleSpec build_cycle(const RunConfig& cfg);

/// Copy of the configuration with the sweep parameter set to `value`.
RunConfig with_parameter(const RunConfig& cfg, const std::string& parameter, double value);

Species parse_species(const std::string& name, const std::string& field);
Anisotropy parse_regime(const std::string& name, const std::string& field);

}  // namespace qtce::cli
