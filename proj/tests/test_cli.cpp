#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "knotosc/io.hpp"

namespace fs = std::filesystem;

namespace {

std::string binary() {
  const char* env = std::getenv("KNOTOSC_BIN");
  REQUIRE(env != nullptr);
  return env;
}

int run(const std::string& args) {
  std::string cmd = binary() + " " + args + " > /dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

}  // namespace

TEST_CASE("cli pipeline, stage commands and exit codes") {
  fs::path dir = fs::temp_directory_path() / "knotosc_cli_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  fs::path cfgPath = dir / "config.json";
  {
    std::ofstream out(cfgPath);
    out << R"({
      "preset": "unknot",
      "l0": 8,
      "khat": 24,
      "grid": {"compare": 24, "extract": 36, "norm": 14},
      "samples": {"along": 60, "around": 6, "guards": 200},
      "stability": {"trials": 1, "epsilonRel": 0.1},
      "rngSeed": 11
    })";
  }

  // Full pipeline: exit 0 on pass, artifacts written.
  CHECK(run("run --config " + cfgPath.string() + " --out " + (dir / "out").string() +
            " --format json,obj") == 0);
  CHECK(fs::exists(dir / "out" / "report.json"));
  CHECK(fs::exists(dir / "out" / "curves.obj"));

  // Stage commands chained through their artifacts.
  CHECK(run("synth --config " + cfgPath.string() + " --out " + (dir / "s").string()) == 0);
  CHECK(fs::exists(dir / "s" / "coefficients.json"));
  CHECK(fs::exists(dir / "s" / "samples.csv"));

  CHECK(run("lift --field " + (dir / "s" / "coefficients.json").string() +
            " --khat 24 --out " + (dir / "s").string()) == 0);
  CHECK(fs::exists(dir / "s" / "eigenfunction.json"));

  CHECK(run("compare --field " + (dir / "s" / "coefficients.json").string() +
            " --psi " + (dir / "s" / "eigenfunction.json").string() +
            " --ball 2.6 --grid 20") == 0);

  CHECK(run("extract --psi " + (dir / "s" / "eigenfunction.json").string() +
            " --ball 2.6 --grid 36 --out " + (dir / "s").string()) == 0);
  CHECK(fs::exists(dir / "s" / "curves.json"));

  CHECK(run("classify --curves " + (dir / "s" / "curves.json").string() +
            " --preset unknot --out " + (dir / "s").string()) == 0);
  CHECK(fs::exists(dir / "s" / "invariants.json"));
  {
    std::string text = knotosc::io::read_file((dir / "s" / "invariants.json").string());
    CHECK(text.find("\"matchesTarget\": true") != std::string::npos);
  }

  CHECK(run("export --curves " + (dir / "s" / "curves.json").string() +
            " --to vtk --out " + (dir / "s").string()) == 0);
  CHECK(fs::exists(dir / "s" / "curves.vtk"));
  CHECK(run("export --curves " + (dir / "s" / "curves.json").string() +
            " --to gauss --out " + (dir / "s").string()) == 0);

  // Configuration errors exit with code 2.
  fs::path badPath = dir / "bad.json";
  {
    std::ofstream out(badPath);
    out << R"({"preset": "hopf", "l0": 7})";
  }
  CHECK(run("run --config " + badPath.string()) == 2);
  CHECK(run("run --config " + (dir / "missing.json").string()) == 2);

  fs::remove_all(dir);
}
