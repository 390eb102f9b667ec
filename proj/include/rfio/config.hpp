#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace rfio {

constexpr const char* kVersion = "0.1.0";

struct ExperimentConfig {
  std::string scenario;
  int d = 2;
  std::vector<int> grid_sizes{32};
  std::string profile = "constant";
  std::map<std::string, double> profile_params;
  std::string coupling = "half_shift";
  std::vector<double> p{2};
  std::vector<double> alpha{0};
  std::vector<double> t{1};
  double frame_K = 0;  // 0: derived from each grid
  int frame_J = 8;
  double c_dir = 0;    // 0: library default
  int directions = 96;
  int radial_nodes = 128;
  int iters = 40;
  int restarts = 4;
  int family = 20;
  double drift = 0.1;  // perturbation amplitude
  std::uint64_t seed = 1;
  int threads = 1;
  std::string out = "out";

  // Sorted key=value lines of every field except out and threads.
  std::string canonical() const;
  std::uint64_t hash() const;
};

// Settings used by the acceptance checks for a scenario id.
ExperimentConfig default_config(const std::string& scenario);

// INI file: keys in [defaults] apply first, then the [scenario] section. Profile parameters use "profile.<name>".
ExperimentConfig load_config(const std::string& path, const std::string& scenario);
void apply_setting(ExperimentConfig& c, const std::string& key, const std::string& value);

std::vector<int> parse_int_list(const std::string& s);
std::vector<double> parse_double_list(const std::string& s);

struct Diagnostic {
  bool error = false;
  std::string message;
};

// Structural checks plus the feasibility arithmetic (Nyquist of the frame, dense limits, budgets).
std::vector<Diagnostic> validate_config(const ExperimentConfig& c);

}  // namespace rfio
