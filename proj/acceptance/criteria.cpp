#include "criteria.hpp"

#include <chrono>
#include <cstdio>

#include "rfio/config.hpp"
#include "rfio/scenarios.hpp"

CriterionOutcome run_criterion(int k, const std::string& artifact_dir) {
  CriterionOutcome o;
  o.k = k;
  const rfio::ScenarioInfo* s = rfio::scenario_for_criterion(k);
  if (!s) {
    o.line = "criterion " + std::to_string(k) + ": unknown";
    return o;
  }
  const auto t0 = std::chrono::steady_clock::now();
  std::string body;
  try {
    rfio::ExperimentConfig c = rfio::default_config(s->id);
    const rfio::ScenarioResult r = rfio::run_scenario(c);
    if (!artifact_dir.empty()) rfio::write_artifacts(r, c, artifact_dir + "/" + s->id);
    o.pass = r.pass();
    for (const auto& ch : r.checks) body += (body.empty() ? "" : "; ") + ch.text();
    for (const auto& n : r.notes) body += "; note: " + n;
  } catch (const std::exception& e) {
    body = std::string("error: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  char head[160];
  std::snprintf(head, sizeof head, "criterion %2d %-17s %s (%.1f s) ", k, s->id.c_str(), o.pass ? "PASS" : "FAIL", secs);
  o.line = head + body;
  return o;
}
