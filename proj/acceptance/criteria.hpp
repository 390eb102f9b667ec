#pragma once

#include <string>

struct CriterionOutcome {
  int k = 0;
  bool pass = false;
  std::string line;
};

CriterionOutcome run_criterion(int k, const std::string& artifact_dir);
