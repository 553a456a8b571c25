// Copyright 2026 The oamsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "oamsim/cli.hpp"

using namespace oamsim;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("oamsim_test_" + name);
  fs::remove_all(p);
  return p;
}

int cli(std::vector<std::string> args, std::string* out_text = nullptr, std::string* err_text = nullptr) {
  args.insert(args.begin(), "oamsim");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return code;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(f), {});
}

int count_lines(const fs::path& p) {
  std::ifstream f(p);
  std::string line;
  int n = 0;
  while (std::getline(f, line))
    if (!line.empty() && line[0] != '#') ++n;
  return n;
}

}  // namespace

TEST_CASE("parse_angle") {
  CHECK(parse_angle("0.25") == doctest::Approx(0.25));
  CHECK(parse_angle("pi/8") == doctest::Approx(kPi / 8.0));
  CHECK(parse_angle("3*pi/4") == doctest::Approx(0.75 * kPi));
  CHECK(parse_angle("-pi") == doctest::Approx(-kPi));
  CHECK_THROWS(parse_angle("pie"));
}

TEST_CASE("key value parsing") {
  std::istringstream in("# comment\nsource.gamma = 4   # trailing\n\nrun.seed=3\nsource.gamma = 5\n");
  const auto kv = parse_key_values(in);
  CHECK(kv.at("source.gamma") == "5");
  CHECK(kv.at("run.seed") == "3");
  std::istringstream bad("just words\n");
  CHECK_THROWS_AS(parse_key_values(bad), ConfigError);
  CHECK(parse_override("a.b=1").second == "1");
  CHECK_THROWS_AS(parse_override("novalue"), ConfigError);
}

TEST_CASE("ScenarioConfig collects every problem") {
  try {
    ScenarioConfig::from_map({{"source.gamma", "abc"}, {"nope.key", "1"}, {"grid.n_r", "12"}});
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.problems().size() == 2);
  }
  ScenarioConfig c = ScenarioConfig::from_map({{"source.gamma", "-1"}, {"grid.n_phi", "8"}});
  const auto problems = c.validate();
  CHECK(problems.size() >= 3);  // seed, gamma, n_phi
  bool named = false;
  for (const auto& p : problems) named |= p.rfind("source.gamma", 0) == 0;
  CHECK(named);
  c = ScenarioConfig::from_map({{"run.seed", "1"}});
  CHECK(c.validate().empty());
  CHECK(c.tomo_ells() == std::vector<int>{1, -1});
  c.tomo.d = 5;
  CHECK(c.tomo_ells() == std::vector<int>{2, 1, 0, -1, -2});
  CHECK(c.pmin(2) == doctest::Approx(0.707106781187));
}

TEST_CASE("config hash tracks content, not output location") {
  const ScenarioConfig a = ScenarioConfig::from_map({{"run.seed", "1"}, {"run.output_dir", "x"}});
  const ScenarioConfig b = ScenarioConfig::from_map({{"run.seed", "1"}, {"run.output_dir", "y"}});
  const ScenarioConfig c = ScenarioConfig::from_map({{"run.seed", "2"}});
  CHECK(a.hash() == b.hash());
  CHECK(a.hash() != c.hash());
  CHECK(a.hash().size() == 16);
}

TEST_CASE("cli exit codes") {
  std::string out;
  std::string err;
  CHECK(cli({"validate"}, &out) == kExitConfigError);
  CHECK(out.find("run.seed") != std::string::npos);
  CHECK(cli({"validate", "--set", "run.seed=1"}, &out) == kExitOk);
  CHECK(out.empty());
  CHECK(cli({"modes", "--set", "modes.area=oops", "--set", "run.seed=1"}, &out, &err) == kExitConfigError);
  CHECK(cli({"frobnicate"}) == kExitConfigError);
  CHECK(cli({"validate", "--config", "/nonexistent/file.cfg"}) == kExitConfigError);

  const fs::path blocker = scratch("blocker");
  std::ofstream(blocker) << "occupied";
  CHECK(cli({"modes", "--set", "run.seed=1", "--out", (blocker / "sub").string()}, &out, &err) == kExitRuntimeError);
  fs::remove(blocker);
}

TEST_CASE("cli scenario outputs") {
  const fs::path dir = scratch("outputs");
  CHECK(cli({"tomo", "--d", "2", "--set", "run.seed=4", "--set", "grid.n_r=96", "--set", "grid.n_phi=64",
             "--set", "source.ell_max=8", "--set", "spiral.ell_min=-8", "--set", "spiral.ell_max=8", "--out", dir.string()}) == kExitOk);
  CHECK(count_lines(dir / "tomo_counts.csv") == 37);  // header + 36 settings
  CHECK(fs::exists(dir / "tomo_rho.csv"));
  CHECK(fs::exists(dir / "manifest_tomo.txt"));
  const std::string first = slurp(dir / "tomo_summary.csv").substr(0, 60);
  CHECK(first.rfind("# oamsim tomo config=", 0) == 0);
  std::ifstream rho(dir / "tomo_rho.csv");
  CHECK(read_density_matrix(rho).d() == 2);

  CHECK(cli({"spiral", "--set", "run.seed=4", "--out", dir.string()}) == kExitOk);
  CHECK(count_lines(dir / "spiral_matrix.csv") == 1 + 41 * 41);
  fs::remove_all(dir);
}

TEST_CASE("cli reruns are byte identical") {
  const fs::path a = scratch("det_a");
  const fs::path b = scratch("det_b");
  const std::vector<std::string> common = {"--set", "run.seed=9", "--set", "grid.n_r=64", "--set", "grid.n_phi=48",
                                           "--set", "source.ell_max=6", "--set", "spiral.ell_min=-6",
                                           "--set", "spiral.ell_max=6"};
  for (const std::string name : {"spiral", "bell", "epr-reid"}) {
    std::vector<std::string> args{name};
    args.insert(args.end(), common.begin(), common.end());
    auto args_a = args;
    auto args_b = args;
    args_a.insert(args_a.end(), {"--out", a.string()});
    args_b.insert(args_b.end(), {"--out", b.string()});
    REQUIRE(cli(args_a) == kExitOk);
    REQUIRE(cli(args_b) == kExitOk);
  }
  int files = 0;
  for (const auto& entry : fs::directory_iterator(a)) {
    CHECK(slurp(entry.path()) == slurp(b / entry.path().filename()));
    ++files;
  }
  CHECK(files >= 12);
  fs::remove_all(a);
  fs::remove_all(b);
}
