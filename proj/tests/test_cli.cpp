#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>

#include "artifacts.hpp"
#include "config.hpp"

using namespace critlab;
using namespace critlab::cli;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("critlab_test_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p.parent_path());
  return p;
}

int run_tool(const std::string& args) {
  const std::string cmd = std::string(CRITLAB_TOOL) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string bundled_config() { return std::string(CRITLAB_SOURCE_DIR) + "/configs/ising2d_critical.cfg"; }

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("config sections, comments and typed values") {
    const auto c = ExperimentConfig::parse("# header\n[lattice]\nsize = 16  # trailing\nboundary=plus\n\n[sampler]\nbeta=critical\n");
    CHECK(c.integer("lattice.size") == 16);
    CHECK(c.lattice().boundary == Boundary::plus);
    CHECK(c.sampler().beta == kBetaCritical2D);
    CHECK(c.explicitly_set("lattice.size"));
    CHECK_FALSE(c.explicitly_set("lattice.dimension"));
    CHECK(c.int_list("newman.box_sizes").size() == 4);
  }

  TEST_CASE("unknown keys and malformed values are configuration errors") {
    try {
      ExperimentConfig::parse("[latice]\nsize=8\n", "x.cfg");
      FAIL("expected a configuration error");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("latice.size") != std::string::npos);
      CHECK(std::string(e.what()).find("x.cfg:2") != std::string::npos);
    }
    CHECK_THROWS_AS(ExperimentConfig::parse("size=8\n"), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::parse("[lattice]\nsize\n"), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::parse("[lattice]\nsize=eight\n").integer("lattice.size"), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::parse("[lattice]\nboundary=twisted\n").lattice(), ConfigError);
  }

  TEST_CASE("config hash ignores the output path and thread count") {
    auto a = ExperimentConfig::parse("[run]\nout=/tmp/a\nthreads=1\n");
    auto b = ExperimentConfig::parse("[run]\nout=/tmp/b\nthreads=4\n");
    CHECK(a.hash() == b.hash());
    b.set("run.seed", "99");
    CHECK(a.hash() != b.hash());
    CHECK(ExperimentConfig::parse(a.resolved()).hash() == a.hash());
  }

  TEST_CASE("csv reader rejects ragged rows with file and line") {
    const fs::path dir = scratch("csv");
    fs::create_directories(dir);
    write_text(dir / "t.csv", "a,b\n1,2\n3,4,5\n");
    try {
      read_csv(dir / "t.csv");
      FAIL("expected a data error");
    } catch (const DataError& e) {
      CHECK(std::string(e.what()).find("t.csv:3") != std::string::npos);
    }
    CsvTable t({"x", "y"});
    t.add({0.1, 1e-300});
    write_text(dir / "ok.csv", t.str());
    const CsvTable back = read_csv(dir / "ok.csv");
    CHECK(std::strtod(back.rows[0][0].c_str(), nullptr) == 0.1);
    CHECK(std::strtod(back.rows[0][1].c_str(), nullptr) == 1e-300);
  }

  TEST_CASE("command line exit codes") {
    const fs::path dir = scratch("codes");
    fs::create_directories(dir);
    write_text(dir / "bad.cfg", "[latice]\nsize=8\n");
    CHECK(run_tool("simulate --config " + (dir / "bad.cfg").string() + " --out " + (dir / "o").string()) == 2);
    CHECK(run_tool("gap --threads 0 --out " + (dir / "o").string()) == 2);
    CHECK(run_tool("report " + (dir / "empty").string()) == 2);
    CHECK(run_tool("frobnicate") == 2);
  }

  TEST_CASE("bundled configuration runs end to end and is reproducible") {
    const fs::path a = scratch("run_a"), b = scratch("run_b");
    REQUIRE(run_tool("run --config " + bundled_config() + " --out " + a.string()) == 0);
    REQUIRE(run_tool("run --config " + bundled_config() + " --threads 2 --out " + b.string()) == 0);

    const Json corr = read_json(a / "correlators.report.json");
    REQUIRE(corr.at("eta_fit").contains("eta"));
    CHECK(corr["eta_fit"]["eta"].at("value").is_number());
    CHECK(fs::exists(a / "config.resolved.cfg"));
    const Json manifest = read_json(a / "manifest.json");
    CHECK(manifest.at("runs").size() == 1);

    int compared = 0;
    for (const auto& e : fs::directory_iterator(a))
      if (e.path().extension() == ".csv") {
        CHECK_MESSAGE(read_text(e.path()) == read_text(b / e.path().filename()), e.path().filename().string());
        ++compared;
      }
    CHECK(compared >= 5);

    REQUIRE(run_tool("report " + a.string()) == 0);
    const Json rep = read_json(a / "report.json");
    CHECK(rep.at("correlators").at("eta_fit").contains("eta"));
    CHECK(rep.at("fluctuations").at("variance_scaling").contains("slope_2alpha"));
    CHECK(rep.at("fluctuations").at("gaussianity").contains("kendall_tau"));
    CHECK(rep.at("newman").at("mc").at("bg").contains("pass"));
    CHECK(fs::exists(a / "correlators_eta_fit.dat"));
    const std::string first = read_text(a / "report.json");
    REQUIRE(run_tool("report " + a.string()) == 0);
    CHECK(read_text(a / "report.json") == first);

    std::string csv = read_text(a / "two_point_radial.csv");
    csv.insert(csv.find('\n', csv.find('\n') + 1), ",7");
    write_text(a / "two_point_radial.csv", csv);
    CHECK(run_tool("report " + a.string()) == 3);
  }

  TEST_CASE("report of a single module keeps only that module") {
    const fs::path d = scratch("dyson_only");
    REQUIRE(run_tool("dyson --set dyson.points=60 --set dyson.droplet_sizes=16,32,64 --out " + d.string()) == 0);
    REQUIRE(run_tool("report " + d.string()) == 0);
    const Json rep = read_json(d / "report.json");
    CHECK(rep.size() == 1);
    CHECK(rep.contains("dyson"));
  }

  TEST_CASE("a runtime failure writes an error report and exits 3") {
    const fs::path d = scratch("no_samples");
    CHECK(run_tool("analyze --out " + d.string()) == 3);
    CHECK(fs::exists(d / "error.json"));
  }
}
