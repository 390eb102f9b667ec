#include "rfio/config.hpp"

#include <algorithm>
#include <boost/functional/hash.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <sstream>

#include "rfio/core.hpp"
#include "rfio/csv.hpp"
#include "rfio/propagators.hpp"
#include "rfio/scenarios.hpp"
#include "rfio/wavepackets.hpp"

namespace rfio {

namespace {

template <class T>
std::string join(const std::vector<T>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
  return s;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  // fractions such as 4/3 are accepted
  const auto slash = v.find('/');
  try {
    std::size_t used = 0;
    if (slash != std::string::npos) {
      const double a = std::stod(v.substr(0, slash)), b = std::stod(v.substr(slash + 1));
      return a / b;
    }
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw Error("config: key " + key + " expects a number, got '" + v + "'");
  }
}

int to_int(const std::string& key, const std::string& v) {
  const double x = to_double(key, v);
  if (x != std::floor(x)) throw Error("config: key " + key + " expects an integer, got '" + v + "'");
  return static_cast<int>(x);
}

}  // namespace

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  for (const auto& x : split(s)) out.push_back(to_int("list", x));
  return out;
}

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  for (const auto& x : split(s)) out.push_back(to_double("list", x));
  return out;
}

std::string ExperimentConfig::canonical() const {
  std::map<std::string, std::string> kv{
      {"scenario", scenario},
      {"d", fmt(d)},
      {"grid_sizes", join(grid_sizes)},
      {"profile", profile},
      {"coupling", coupling},
      {"p", join(p)},
      {"alpha", join(alpha)},
      {"t", join(t)},
      {"frame.K", fmt(frame_K)},
      {"frame.J", fmt(frame_J)},
      {"frame.c_dir", fmt(c_dir)},
      {"budget.directions", fmt(directions)},
      {"budget.radial_nodes", fmt(radial_nodes)},
      {"budget.iters", fmt(iters)},
      {"budget.restarts", fmt(restarts)},
      {"budget.family", fmt(family)},
      {"drift", fmt(drift)},
      {"seed", fmt(static_cast<unsigned long long>(seed))},
  };
  for (const auto& [k, v] : profile_params) kv["profile." + k] = fmt(v);
  std::string s;
  for (const auto& [k, v] : kv) s += k + "=" + v + "\n";
  return s;
}

std::uint64_t ExperimentConfig::hash() const {
  std::size_t h = 0;
  boost::hash_combine(h, canonical());
  return static_cast<std::uint64_t>(h);
}

ExperimentConfig default_config(const std::string& scenario) {
  if (!find_scenario(scenario)) throw Error("unknown scenario: " + scenario);
  ExperimentConfig c;
  c.scenario = scenario;
  const std::map<std::string, double> saw_commuting{{"base", 1.0}, {"amp", kPi / 16}, {"teeth", 4}, {"phase", 0.0}};
  const std::map<std::string, double> saw_125{{"base", 1.0}, {"amp", 0.25}, {"teeth", 4}};
  if (scenario == "oracle-agreement") {
    c.grid_sizes = {64};
    c.frame_K = 3;
    c.seed = 5;
  } else if (scenario == "frame-identities") {
    c.grid_sizes = {64};
    c.frame_K = 3;
  } else if (scenario == "speed") {
    c.grid_sizes = {128};
    c.coupling = "local";
    c.profile = "sawtooth";
    c.profile_params = saw_125;
  } else if (scenario == "threshold") {
    c.grid_sizes = {32, 64, 128};
    c.p = {4};
    c.alpha = {0, 0.3};
  } else if (scenario == "halfwave-bounded") {
    c.grid_sizes = {32, 48, 64};
    c.profile = "sawtooth";
    c.profile_params = saw_commuting;
    c.p = {4.0 / 3, 4};
  } else if (scenario == "embedding") {
    c.grid_sizes = {32, 48, 64};
    c.p = {4.0 / 3, 2};
  } else if (scenario == "flow-1d") {
    c.d = 1;
    c.grid_sizes = {64, 128, 256, 512};
    c.profile = "sawtooth";
    c.profile_params = saw_125;
    c.t = {0.7};
  } else if (scenario == "square-function") {
    c.grid_sizes = {32, 64};
    c.profile = "sawtooth";
    c.profile_params = saw_125;
  } else if (scenario == "opnorm") {
    c.grid_sizes = {16};
    c.p = {1.5, 3};
  } else if (scenario == "heat-kernel") {
    c.d = 1;
    c.grid_sizes = {256};
    c.profile = "sawtooth";
    c.profile_params = saw_125;
    c.t = {1e-2, 1e-1};
  } else if (scenario == "multiplier") {
    c.directions = 8;
  } else if (scenario == "multiplication") {
    c.grid_sizes = {48, 64};
    c.p = {4.0 / 3};
  } else if (scenario == "group-law") {
    c.grid_sizes = {16};
    c.profile = "sawtooth";
    c.profile_params = saw_125;
    c.family = 4;
  } else if (scenario == "perturbation") {
    c.grid_sizes = {16};
    c.profile = "sawtooth";
    c.profile_params = saw_125;
    c.p = {4};
    c.family = 4;
  }
  return c;
}

void apply_setting(ExperimentConfig& c, const std::string& key, const std::string& v) {
  if (key == "scenario") c.scenario = v;
  else if (key == "d") c.d = to_int(key, v);
  else if (key == "grid_sizes") c.grid_sizes = parse_int_list(v);
  else if (key == "profile") c.profile = v;
  else if (key.rfind("profile.", 0) == 0) c.profile_params[key.substr(8)] = to_double(key, v);
  else if (key == "coupling") c.coupling = v;
  else if (key == "p") c.p = parse_double_list(v);
  else if (key == "alpha") c.alpha = parse_double_list(v);
  else if (key == "t") c.t = parse_double_list(v);
  else if (key == "frame.K") c.frame_K = to_double(key, v);
  else if (key == "frame.J") c.frame_J = to_int(key, v);
  else if (key == "frame.c_dir") c.c_dir = to_double(key, v);
  else if (key == "budget.directions") c.directions = to_int(key, v);
  else if (key == "budget.radial_nodes") c.radial_nodes = to_int(key, v);
  else if (key == "budget.iters") c.iters = to_int(key, v);
  else if (key == "budget.restarts") c.restarts = to_int(key, v);
  else if (key == "budget.family") c.family = to_int(key, v);
  else if (key == "drift") c.drift = to_double(key, v);
  else if (key == "seed") c.seed = static_cast<std::uint64_t>(std::stoull(v));
  else if (key == "threads") c.threads = to_int(key, v);
  else if (key == "out") c.out = v;
  else throw Error("config: unknown key '" + key + "'");
}

ExperimentConfig load_config(const std::string& path, const std::string& scenario) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(path, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw Error(std::string("config: ") + e.what());
  }
  ExperimentConfig c = default_config(scenario);
  for (const char* section : {"defaults", scenario.c_str()}) {
    auto it = tree.find(section);
    if (it == tree.not_found()) continue;
    for (const auto& [k, v] : it->second) apply_setting(c, k, v.data());
  }
  c.scenario = scenario;
  return c;
}

std::vector<Diagnostic> validate_config(const ExperimentConfig& c) {
  std::vector<Diagnostic> out;
  auto err = [&](std::string m) { out.push_back({true, std::move(m)}); };
  auto note = [&](std::string m) { out.push_back({false, std::move(m)}); };
  if (!find_scenario(c.scenario)) err("unknown scenario '" + c.scenario + "'");
  if (c.d < 1 || c.d > 2) err("d must be 1 or 2");
  if (c.grid_sizes.empty()) err("grid_sizes is empty");
  for (std::size_t i = 0; i < c.grid_sizes.size(); ++i) {
    const int n = c.grid_sizes[i];
    if (n < 8 || n % 2) err("grid size " + fmt(n) + " must be even and at least 8");
    if (i && n <= c.grid_sizes[i - 1]) err("grid sizes must be strictly ascending");
  }
  if (c.directions <= 0 || c.radial_nodes <= 0 || c.iters <= 0 || c.restarts <= 0 || c.family <= 0)
    err("budgets must be positive");
  for (double p : c.p)
    if (!(p >= 1)) err("p = " + fmt(p) + " must be >= 1");
  if (c.frame_J < 1) err("frame.J must be >= 1");
  try {
    parse_profile_kind(c.profile);
  } catch (const Error& e) {
    err(e.what());
  }
  const double length = 2 * kPi;
  if (c.frame_K > 0) {
    const double smin = std::pow(2.0, -c.frame_K);
    for (int n : c.grid_sizes) {
      const int req = required_n(smin, length);
      if (n < req)
        err("Nyquist: n = " + fmt(n) + " does not resolve 2/sigma_min = " + fmt(2 / smin) + " (sigma_min = " + fmt(smin) +
            "); required n = " + fmt(req));
    }
  } else {
    for (int n : c.grid_sizes)
      if (n >= 8) note("n = " + fmt(n) + ": sigma_min = " + fmt(grid_sigma_min(TorusGrid(c.d, n, length), c.frame_J)));
  }
  if (c.scenario == "perturbation") {
    for (int n : c.grid_sizes) {
      const double unknowns = 2 * std::pow(double(n), c.d);
      if (unknowns > kPerturbedDenseMax)
        err("dense route refused: 2 n^d = " + fmt(unknowns) + " at n = " + fmt(n) + " exceeds " +
            fmt(static_cast<int>(kPerturbedDenseMax)));
    }
  }
  if (out.empty() || std::none_of(out.begin(), out.end(), [](const Diagnostic& x) { return x.error; })) note("config ok");
  return out;
}

}  // namespace rfio
