#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "quermass/run_config.hpp"

using namespace quermass;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("quermass_cli_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(QUERMASS_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string error_of(const std::string& text) {
  try {
    validate(parse_config(text, "cfg"));
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("key = value parsing") {
  const RunConfig c = parse_config(
      "# a comment\n"
      "beta = 6   # trailing comment\n"
      "z=6.5\n"
      "window = 12\n"
      "bc = wired1\n"
      "radius_law = uniform\n"
      "R0 = 0.5\n"
      "s_grid = 0.7:1.0:0.1\n"
      "K = 0.25\n");
  CHECK(c.params.beta == 6.0);
  CHECK(c.params.z == 6.5);
  CHECK(c.window_width == 12);
  CHECK(c.window_height == 12);
  CHECK(c.bc == "wired1");
  CHECK(c.params.radius_law == RadiusLaw::Uniform);
  CHECK(c.s_grid == std::vector<double>{0.7, 0.8, 0.9, 1.0});
  REQUIRE(c.K);
  CHECK(*c.K == 0.25);
  CHECK_NOTHROW(validate(c));
}

TEST_CASE("grids") {
  CHECK(parse_grid("") .empty());
  CHECK(parse_grid("0.5, 2,3e-1") == std::vector<double>{0.5, 2.0, 0.3});
  CHECK(parse_grid("1:1:0.5") == std::vector<double>{1.0});
  CHECK(parse_grid("0:1:0.25").size() == 5);
  CHECK_THROWS_AS(parse_grid("1:0:0.1"), ConfigError);
  CHECK_THROWS_AS(parse_grid("0:1"), ConfigError);
  CHECK_THROWS_AS(parse_grid("0:1:0"), ConfigError);
  CHECK_THROWS_AS(parse_grid("0.1, x"), ConfigError);
}

TEST_CASE("errors name the line or the field") {
  CHECK(error_of("beta = 1\nnonsense\n").find("cfg:2") != std::string::npos);
  CHECK(error_of("beta = 1\ncolour = red\n").find("unknown key 'colour'") != std::string::npos);
  CHECK(error_of("z = abc\n").find("cfg:1") != std::string::npos);
  CHECK(error_of("z = abc\n").find("'z'") != std::string::npos);
  CHECK(error_of("bc = periodic\n").find("'bc'") != std::string::npos);
  CHECK(error_of("sweeps = 0\n").find("'sweeps'") != std::string::npos);
  CHECK(error_of("sweeps = 50\nthin = 10\n").find("'sweeps'") != std::string::npos);
  CHECK(error_of("burn_in = -1\n").find("'burn_in'") != std::string::npos);
  CHECK(error_of("s_grid = 1, 0.5\n").find("'s_grid'") != std::string::npos);
  CHECK(error_of("s_grid = 1:0:1\n").find("'s_grid'") != std::string::npos);
  CHECK(error_of("contour_norm = taxicab\n").find("'contour_norm'") != std::string::npos);
  CHECK(error_of("check_labels = maybe\n").find("'check_labels'") != std::string::npos);
  CHECK(error_of("delta = 0.5\n").find("'delta'") != std::string::npos);  // inadmissible
  CHECK(error_of("delta = 0.5\nallow_inadmissible = true\n").empty());
  CHECK(error_of("p_birth = 0\n").find("'p_birth'") != std::string::npos);
  CHECK(error_of("seed = -3\n").find("'seed'") != std::string::npos);
  CHECK(error_of("{\"beta\": \"x\"").find("invalid JSON") != std::string::npos);
  CHECK(error_of("beta = 2\nz = 3\n").empty());
}

TEST_CASE("the written header and JSON reports reproduce the config") {
  RunConfig c = parse_config("beta = 3\nz = 2.5\nwindow_width = 7\nwindow_height = 9\nseed = 99\nz_grid = 0.1, 0.2\n"
                             "theta1 = -0.1\ntheta1_delta = 0.02\nthin = 2\nsweeps = 40\n");
  const std::string header = config_header(c);
  const RunConfig back = parse_config(header + "data,after,the,header\n1,2,3,4\n", "header");
  CHECK(config_header(back) == header);
  CHECK(back.window_height == 9);
  REQUIRE(back.theta1_delta);
  CHECK(*back.theta1_delta == 0.02);

  nlohmann::ordered_json report;
  report["config"] = config_json(c);
  report["rho"] = 1.0;
  CHECK(config_header(parse_config(report.dump(2), "report")) == header);

  // round trip does not drift through the decimal form
  c.params.z = 0.1 + 0.2;
  CHECK(parse_config(config_header(c)).params.z == c.params.z);
}

TEST_CASE("reruns from a written file are byte-identical") {
  const fs::path d = scratch("rerun");
  spit(d / "run.cfg", "beta = 2\nz = 1.5\nwindow = 6\nsweeps = 60\nburn_in = 10\nsnapshot_every = 20\nseed = 5\n");
  REQUIRE(run_cli("sample --config " + (d / "run.cfg").string() + " --out " + (d / "a").string()) == kExitOk);
  REQUIRE(run_cli("sample --config " + (d / "a" / "trace.csv").string() + " --out " + (d / "b").string()) == kExitOk);
  REQUIRE(run_cli("sample --config " + (d / "a" / "summary.json").string() + " --out " + (d / "c").string() +
                  " --threads 3") == kExitOk);
  for (const char* f : {"trace.csv", "summary.json", "snapshots.json"}) {
    CHECK(!slurp(d / "a" / f).empty());
    CHECK(slurp(d / "a" / f) == slurp(d / "b" / f));
    CHECK(slurp(d / "a" / f) == slurp(d / "c" / f));
  }
  // a different seed gives a different trace
  REQUIRE(run_cli("sample --config " + (d / "run.cfg").string() + " --seed 6 --out " + (d / "e").string()) == kExitOk);
  CHECK(slurp(d / "a" / "trace.csv") != slurp(d / "e" / "trace.csv"));
  fs::remove_all(d);
}

TEST_CASE("exit codes") {
  const fs::path d = scratch("exit");
  spit(d / "ok.cfg", "beta = 1\nz = 1\nwindow = 4\nsweeps = 20\n");
  spit(d / "bad.cfg", "beta = 1\nwindow = zero\n");
  spit(d / "params.cfg", "theta2 = -1\nwindow = 4\nsweeps = 20\n");
  spit(d / "domain.cfg", "theta1 = -0.1\ntheta1_delta = 0.05\n");
  CHECK(run_cli("sample --config " + (d / "ok.cfg").string() + " --out " + (d / "o").string()) == kExitOk);
  CHECK(run_cli("sample --config " + (d / "bad.cfg").string()) == kExitConfig);
  CHECK(run_cli("sample --config " + (d / "missing.cfg").string()) == kExitConfig);
  CHECK(run_cli("sample --config " + (d / "params.cfg").string()) == kExitConfig);
  CHECK(run_cli("check-constants --config " + (d / "domain.cfg").string() + " --out " + (d / "o").string()) ==
        kExitDomain);
  CHECK(run_cli("scan --config " + (d / "ok.cfg").string() + " --out " + (d / "o").string()) == kExitConfig);  // no s_grid
  CHECK(run_cli("frobnicate") == kExitConfig);
  CHECK(run_cli("--help") == kExitOk);
  CHECK(run_cli("check-constants --out " + (d / "k").string()) == kExitOk);
  CHECK(fs::exists(d / "k" / "constants.json"));
  fs::remove_all(d);
}
