#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rfio/coeffs.hpp"
#include "rfio/config.hpp"
#include "rfio/csv.hpp"
#include "rfio/svg.hpp"

namespace rfio {

struct ScenarioInfo {
  std::string id;
  int criterion = 0;  // acceptance criterion number, 0 for auxiliary scenarios
  std::string summary;
};

const std::vector<ScenarioInfo>& scenarios();
const ScenarioInfo* find_scenario(const std::string& id);
const ScenarioInfo* scenario_for_criterion(int k);

struct Check {
  std::string name;
  double value = 0;
  std::string relation;  // "<=", ">=", "<", ">"
  double bound = 0;
  bool ok = false;
  std::string text() const;
};

struct StageTime {
  std::string name;
  double seconds = 0;
};

struct ScenarioResult {
  std::string id;
  std::vector<Check> checks;
  std::vector<std::string> notes;    // printed with the pass/fail line
  std::vector<Table> tables;
  std::vector<Plot> plots;
  std::vector<std::string> log;      // provenance lines (profiles, hashes, indicators)
  std::vector<StageTime> stages;

  bool pass() const;
  Check& check(std::string name, double value, std::string relation, double bound);
  void note_profile(const std::string& label, const CoefficientProfile& p);
};

ScenarioResult run_scenario(const ExperimentConfig& c);

// CSV tables and SVG plots under dir, plus provenance.txt with the config, hashes, version and stage timings.
void write_artifacts(const ScenarioResult& r, const ExperimentConfig& c, const std::string& dir);

}  // namespace rfio
