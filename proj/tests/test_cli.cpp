#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "rfio/config.hpp"
#include "rfio/core.hpp"
#include "rfio/csv.hpp"
#include "rfio/scenarios.hpp"
#include "rfio/svg.hpp"

using namespace rfio;
namespace fs = std::filesystem;

namespace {

bool has_message(const std::vector<Diagnostic>& ds, const std::string& needle, bool error) {
  for (const auto& d : ds)
    if (d.error == error && d.message.find(needle) != std::string::npos) return true;
  return false;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("rfio_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST(Config, RegistryCoversCriteria) {
  for (int k = 1; k <= 13; ++k) {
    const auto* s = scenario_for_criterion(k);
    ASSERT_NE(s, nullptr) << k;
    EXPECT_EQ(find_scenario(s->id), s);
  }
  EXPECT_NE(find_scenario("perturbation"), nullptr);
  EXPECT_EQ(find_scenario("nope"), nullptr);
}

TEST(Config, DefaultsValidate) {
  for (const auto& s : scenarios()) {
    const auto ds = validate_config(default_config(s.id));
    EXPECT_TRUE(has_message(ds, "config ok", false)) << s.id;
  }
}

TEST(Config, NyquistNamesRequiredGrid) {
  auto c = default_config("oracle-agreement");
  c.grid_sizes = {16};
  const auto ds = validate_config(c);
  EXPECT_TRUE(has_message(ds, "required n = 32", true));
  EXPECT_FALSE(has_message(ds, "config ok", false));
}

TEST(Config, PerturbationDenseRefusal) {
  auto c = default_config("perturbation");
  c.grid_sizes = {64};
  EXPECT_TRUE(has_message(validate_config(c), "dense route refused", true));
}

TEST(Config, StructuralErrors) {
  auto c = default_config("embedding");
  c.grid_sizes = {64, 32};
  EXPECT_TRUE(has_message(validate_config(c), "ascending", true));
  c = default_config("embedding");
  c.p = {0.5};
  EXPECT_FALSE(has_message(validate_config(c), "config ok", false));
  EXPECT_THROW(apply_setting(c, "bogus", "1"), Error);
  EXPECT_THROW(apply_setting(c, "grid_sizes", "32,x"), Error);
}

TEST(Config, SettingsAndFractions) {
  auto c = default_config("threshold");
  apply_setting(c, "p", "4/3, 4");
  apply_setting(c, "grid_sizes", "32,64");
  apply_setting(c, "profile.amp", "0.125");
  ASSERT_EQ(c.p.size(), 2u);
  EXPECT_DOUBLE_EQ(c.p[0], 4.0 / 3);
  EXPECT_EQ(c.grid_sizes, (std::vector<int>{32, 64}));
  EXPECT_DOUBLE_EQ(c.profile_params.at("amp"), 0.125);
}

TEST(Config, IniSections) {
  const fs::path dir = temp_dir("ini");
  const fs::path ini = dir / "run.ini";
  std::ofstream(ini) << "[defaults]\nseed = 9\nbudget.iters = 7\n\n[threshold]\nbudget.iters = 11\ngrid_sizes = 32,64\n";
  const auto c = load_config(ini.string(), "threshold");
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.iters, 11);
  EXPECT_EQ(c.grid_sizes, (std::vector<int>{32, 64}));
  EXPECT_EQ(load_config(ini.string(), "embedding").iters, 7);
}

TEST(Config, CanonicalHash) {
  auto a = default_config("speed");
  auto b = default_config("speed");
  b.out = "elsewhere";
  b.threads = 3;
  EXPECT_EQ(a.canonical(), b.canonical());
  EXPECT_EQ(a.hash(), b.hash());
  b.seed = 2;
  EXPECT_NE(a.hash(), b.hash());
}

TEST(Artifacts, CsvRender) {
  Table t{"demo", {"n", "value", "label"}, {}};
  t.add({fmt(32), fmt(0.1), "a,b"});
  EXPECT_THROW(t.add({"1"}), Error);
  const std::string s = csv_render(t, {"seed = 1"});
  EXPECT_EQ(s, "# seed = 1\nn,value,label\n32,0.1,\"a,b\"\n");
  EXPECT_EQ(hex(255), "00000000000000ff");
}

TEST(Artifacts, SvgRender) {
  Plot p{"demo", "demo", "n", "error", true, true, {{"a", {1, 10, 100}, {1e-1, 1e-2, 1e-3}}}};
  const std::string s = svg_render(p);
  EXPECT_EQ(s.rfind("<svg", 0), 0u);
  EXPECT_NE(s.find("</svg>"), std::string::npos);
}

TEST(Artifacts, RerunIsByteIdentical) {
  auto c = default_config("flow-1d");
  c.grid_sizes = {64, 128};
  const fs::path a = temp_dir("run_a"), b = temp_dir("run_b");
  write_artifacts(run_scenario(c), c, a.string());
  write_artifacts(run_scenario(c), c, b.string());
  int csvs = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    if (e.path().extension() != ".csv") continue;
    ++csvs;
    EXPECT_EQ(slurp(e.path()), slurp(b / e.path().filename())) << e.path();
  }
  EXPECT_GT(csvs, 0);
  EXPECT_TRUE(fs::exists(a / "provenance.txt"));
}
