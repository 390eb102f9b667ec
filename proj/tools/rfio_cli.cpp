#include <CLI11.hpp>
#include <cstdio>
#include <iostream>

#include "rfio/config.hpp"
#include "rfio/scenarios.hpp"

namespace {

struct Overrides {
  std::string config, out, grid_sizes, p, alpha;
  unsigned long long seed = 0;
  bool has_seed = false;
  int threads = 0;
};

void add_flags(CLI::App* app, Overrides& o) {
  app->add_option("--config", o.config, "INI config file")->check(CLI::ExistingFile);
  app->add_option("--out", o.out, "output directory");
  app->add_option_function<unsigned long long>("--seed", [&o](unsigned long long s) {
    o.seed = s;
    o.has_seed = true;
  }, "random seed");
  app->add_option("--threads", o.threads, "worker cap")->check(CLI::PositiveNumber);
  app->add_option("--grid-sizes", o.grid_sizes, "comma-separated grid sizes");
  app->add_option("--p", o.p, "comma-separated exponents");
  app->add_option("--alpha", o.alpha, "comma-separated smoothing orders");
}

rfio::ExperimentConfig make_config(const std::string& scenario, const Overrides& o) {
  rfio::ExperimentConfig c = o.config.empty() ? rfio::default_config(scenario) : rfio::load_config(o.config, scenario);
  if (!o.out.empty()) c.out = o.out;
  else if (c.out == "out") c.out = "out/" + scenario;
  if (o.has_seed) c.seed = o.seed;
  if (o.threads > 0) c.threads = o.threads;
  if (!o.grid_sizes.empty()) c.grid_sizes = rfio::parse_int_list(o.grid_sizes);
  if (!o.p.empty()) c.p = rfio::parse_double_list(o.p);
  if (!o.alpha.empty()) c.alpha = rfio::parse_double_list(o.alpha);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Experiments for wave packet spaces adapted to structured Lipschitz coefficients"};
  app.require_subcommand(1);
  std::string scenario;
  Overrides run_o, val_o;

  auto* list = app.add_subcommand("list", "list scenario ids");
  auto* run = app.add_subcommand("run", "run a scenario and write CSV, SVG and provenance");
  run->add_option("scenario", scenario, "scenario id")->required();
  add_flags(run, run_o);
  auto* validate = app.add_subcommand("validate", "check a config without running it");
  validate->add_option("scenario", scenario, "scenario id")->required();
  add_flags(validate, val_o);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*list) {
      std::printf("%-18s %-9s %s\n", "id", "criterion", "summary");
      for (const auto& s : rfio::scenarios())
        std::printf("%-18s %-9s %s\n", s.id.c_str(), s.criterion ? std::to_string(s.criterion).c_str() : "-", s.summary.c_str());
      return 0;
    }
    if (*validate) {
      const auto c = make_config(scenario, val_o);
      bool bad = false;
      for (const auto& d : rfio::validate_config(c)) {
        std::printf("%s: %s\n", d.error ? "error" : "note", d.message.c_str());
        bad = bad || d.error;
      }
      return bad ? 2 : 0;
    }
    const auto c = make_config(scenario, run_o);
    const auto r = rfio::run_scenario(c);
    rfio::write_artifacts(r, c, c.out);
    for (const auto& k : r.checks) std::printf("  %s\n", k.text().c_str());
    for (const auto& n : r.notes) std::printf("  note: %s\n", n.c_str());
    std::printf("%s %s (artifacts in %s)\n", r.id.c_str(), r.pass() ? "PASS" : "FAIL", c.out.c_str());
    return r.pass() ? 0 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
