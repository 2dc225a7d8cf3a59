#pragma once

#include <initializer_list>
#include <string>
#include <vector>

#include <json.hpp>

#include "qtce/cycle_engine.hpp"
#include "qtce/irreversible.hpp"

namespace qtce::cli {

using nlohmann::json;

/// 17 significant digits, '.' decimal point.
std::string fmt(double x);

// CSV table with a header row; cells are strings or formatted numbers.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
  void row(std::vector<std::string> cells) { rows_.push_back(std::move(cells)); }
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

const char* stroke_kind_name(StrokeKind kind);

json to_json(const StatePoint& s, double lambda3);
json to_json(const StrokeEnergy& e);
json to_json(const CycleSpec& spec, const EnergyLedger& ledger, double lambda3);
json to_json(const IrrPerformance& p);
json to_json(const ScalingPoint& p);
json to_json(const ScalingFit& f);

CsvTable ledger_csv(const CycleSpec& spec, const EnergyLedger& ledger);
CsvTable pv_csv(const PvDiagram& pv);
CsvTable performance_csv(const IrrPerformance& p);
CsvTable scaling_csv(const ScalingReport& report);

}  // namespace qtce::cli
