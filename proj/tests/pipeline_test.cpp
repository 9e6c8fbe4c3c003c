#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>

#include "isotherm/errors.hpp"
#include "isotherm/pipeline.hpp"

using namespace isotherm;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("isotherm_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

int run(const std::string& command, ExperimentConfig config, const std::string& dir) {
  config.out = scratch(dir).string();
  std::ostringstream out, err;
  return run_command(command, config, out, err);
}

int cli(const std::string& args) {
  const std::string cmd = std::string(ISOTHERM_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_SUITE("pipeline") {
  TEST_CASE("config defaults") {
    const ExperimentConfig c = parse_config("{}");
    CHECK(std::holds_alternative<SphereParams>(c.surface));
    CHECK(c.R == 1.0);
    CHECK(c.problem == Problem::cauchy_sum);
    CHECK(c.times.size() == 7);
    CHECK(c.times.front() == 1e-2);
    CHECK(c.solve_times == std::vector<double>{0.01, 0.05, 0.1});
    CHECK(c.calibration_R == std::vector<double>{0.5, 1.0});
    CHECK(c.tolerances.amplitude_ratio == 0.03);
    CHECK(config_centers(c, config_chart(c)).size() >= 2);
  }

  TEST_CASE("config parsing rejects bad input") {
    CHECK_THROWS_AS(parse_config(R"({"radius": 2})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"surface": {"kind": "torus", "rho": 2}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"surface": {"kind": "klein"}})"), ConfigError);
    CHECK_THROWS_AS(config_chart(parse_config(R"({"surface": {"kind": "torus", "a": 3, "b": 1}})")),
                    ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"R": "one"})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"times": [0.001, 0.01]})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"problem": "wave"})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"expect": {"product": "plane_or_sphere"}})"), ConfigError);
    CHECK_THROWS_AS(parse_config("{"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
  }

  TEST_CASE("config round trip") {
    const ExperimentConfig c = parse_config(
        R"({"surface": {"kind": "torus", "a": 1, "b": 3}, "R": 0.4, "problem": "cauchy_diff",
            "seed": 7, "region": [0, 1, 0, 2], "tolerances": {"trace": 0.01},
            "expect": {"sum": "inconsistent"}})");
    const std::string once = dump_config(c);
    CHECK(dump_config(parse_config(once)) == once);
    CHECK(c.tolerances.trace == 0.01);
    CHECK(config_region(c, config_chart(c)).u_max == 1.0);
  }

  TEST_CASE("exit codes") {
    ExperimentConfig c = parse_config("{}");
    CHECK(run("geometry", c, "geometry") == 0);

    ExperimentConfig fat = c;
    fat.R = 3.0;
    CHECK(run("geometry", fat, "fat") == 2);

    ExperimentConfig wrong = c;
    wrong.expect["sum"] = "minimal_c_zero";
    CHECK(run("invariants", wrong, "wrong") == 1);

    ExperimentConfig right = c;
    right.expect["sum"] = "plane_or_sphere";
    CHECK(run("invariants", right, "right") == 0);

    CHECK(run("teleport", c, "teleport") == 2);
  }

  TEST_CASE("stage outputs") {
    ExperimentConfig c = parse_config("{}");
    c.out = scratch("outputs").string();
    std::ostringstream out, err;
    REQUIRE(run_command("invariants", c, out, err) == 0);
    CHECK(fs::exists(fs::path(c.out) / "invariants.json"));
    CHECK(fs::exists(fs::path(c.out) / "invariant_samples.csv"));
    CHECK(fs::exists(fs::path(c.out) / "config.resolved.json"));
    CHECK(out.str().find("invariants: pass") != std::string::npos);
    REQUIRE(run_command("calibrate", c, out, err) == 0);
    CHECK(slurp(fs::path(c.out) / "calibration.json").find("cauchy") != std::string::npos);
  }

  TEST_CASE("verify is byte-for-byte reproducible") {
    ExperimentConfig c = parse_config(R"({"surface": {"kind": "plane"}, "problem": "cauchy_diff"})");
    c.out = scratch("verify").string();
    std::ostringstream out, err;
    REQUIRE(run_command("verify", c, out, err) == 0);
    const std::string first = slurp(fs::path(c.out) / "verify.json");
    CHECK(first.find("\"pass\": true") != std::string::npos);
    REQUIRE(run_command("verify", c, out, err) == 0);
    CHECK(slurp(fs::path(c.out) / "verify.json") == first);
  }

  TEST_CASE("command-line front end") {
    const fs::path dir = scratch("cli");
    CHECK(cli("geometry --out " + dir.string()) == 0);
    CHECK(fs::exists(dir / "geometry.json"));
    CHECK(cli("") == 2);
    CHECK(cli("geometry --workers 0") == 2);
    CHECK(cli("geometry --config /nonexistent.json") == 2);
    CHECK(cli("dance") == 2);

    const fs::path cfg = scratch("cli_cfg");
    fs::create_directories(cfg);
    std::ofstream(cfg / "fat.json") << R"({"R": 3})";
    CHECK(cli("geometry --config " + (cfg / "fat.json").string() + " --out " + dir.string()) == 2);
    std::ofstream(cfg / "expect.json") << R"({"expect": {"diff": "minimal_c_zero"}})";
    CHECK(cli("invariants --config " + (cfg / "expect.json").string() + " --out " + dir.string()) == 1);
    CHECK(cli("--help") == 0);
  }
}
