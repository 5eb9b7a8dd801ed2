#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "doctest.h"
#include "rhlab/config.hpp"
#include "rhlab/errors.hpp"
#include "rhlab/pipeline.hpp"

namespace fs = std::filesystem;
using namespace rhlab;
using json = nlohmann::json;

namespace {

const char* kCube = R"([run]
seed = 7

[domain]
dimension = 3
shape = box
lower = 0 0 0
upper = 1 1 1
nodes_per_axis = 13

[queries]
pairs = 2:2 1:2 0.5:inf

[moser]
p = 2
levels = 3

[calibration]
nodes_per_axis = 17
bank_size = 6
)";

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "rhlab-cli-test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write(const fs::path& dir, const std::string& name, const std::string& text) {
  std::ofstream(dir / name) << text;
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

int rh_lab(const std::string& args) {
  const std::string cmd = std::string(RHLAB_CLI) + " " + args + " --quiet > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string replace(std::string text, const std::string& from, const std::string& to) {
  const auto pos = text.find(from);
  REQUIRE(pos != std::string::npos);
  return text.replace(pos, from.size(), to);
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("config parses, serializes canonically and rejects junk") {
    const RunConfig c = parse_config(kCube, ".");
    CHECK(c.seed == 7);
    CHECK(c.domain.nodes_per_axis == 13);
    REQUIRE(c.queries.size() == 3);
    CHECK(std::isinf(c.queries[2].q));
    CHECK(c.moser.enabled);
    const std::string text = serialize(c);
    CHECK(serialize(parse_config(text, ".")) == text);

    CHECK_THROWS_AS(parse_config("[domain]\ncolour = red\n", "."), ConfigError);
    CHECK_THROWS_AS(parse_config("[nonsense]\na = 1\n", "."), ConfigError);
    CHECK_THROWS_AS(parse_config(replace(kCube, "nodes_per_axis = 13", "nodes_per_axis = many"), "."), ConfigError);
    CHECK_THROWS_AS(parse_config("[calibration]\nfile = /does/not/exist.json\n", "."), ConfigError);
  }

  TEST_CASE("validation maps to error kinds") {
    RunConfig c = parse_config(kCube, ".");
    c.queries.push_back({3.0, 2.0});
    CHECK_THROWS_AS(validate(c, Command::verify), ConfigError);
    c = parse_config(kCube, ".");
    c.moser.p = 1.0;
    CHECK_THROWS_AS(validate(c, Command::moser), HypothesisError);
    CHECK_NOTHROW(validate(c, Command::solve));
  }

  TEST_CASE("minimal cube config gives a unit-ratio row") {
    const fs::path dir = scratch("minimal");
    const auto cfg = write(dir, "cube.ini", replace(kCube, "pairs = 2:2 1:2 0.5:inf", "pairs = 2:2"));
    REQUIRE(rh_lab("verify --config " + cfg.string() + " --out " + (dir / "out").string()) == 0);
    const json report = json::parse(slurp(dir / "out" / "report.json"));
    CHECK(report["rhi"]["rows"].size() == 3);  // u, f, g
    CHECK(report["rhi"]["rows"][0]["ratio"] == 1.0);
    const std::string csv = slurp(dir / "out" / "rhi.csv");
    CHECK(csv.rfind("p,q,norm_p,norm_q,ratio,factor,fitted_C\n", 0) == 0);
  }

  TEST_CASE("q < p is a config error with no output") {
    const fs::path dir = scratch("bad-query");
    const auto cfg = write(dir, "bad.ini", replace(kCube, "pairs = 2:2 1:2 0.5:inf", "pairs = 3:2"));
    CHECK(rh_lab("run --config " + cfg.string() + " --out " + (dir / "out").string()) == 2);
    CHECK_FALSE(fs::exists(dir / "out"));
  }

  TEST_CASE("Moser ladder below p = 2 is a hypothesis violation") {
    const fs::path dir = scratch("moser-p1");
    const auto cfg = write(dir, "m.ini", replace(kCube, "p = 2\nlevels", "p = 1\nlevels"));
    CHECK(rh_lab("moser --config " + cfg.string() + " --out " + (dir / "out").string()) == 4);
    CHECK_FALSE(fs::exists(dir / "out"));
    try {
      validate(load_config(cfg), Command::moser);
      FAIL("accepted p = 1");
    } catch (const HypothesisError& e) {
      const std::string what = e.what();
      CHECK(what.find("tau = p >= 2") != std::string::npos);
      CHECK(what.find("max{p,2}") != std::string::npos);
    }
  }

  TEST_CASE("stage failures map to exit codes and error records") {
    const fs::path dir = scratch("solver-fail");
    const auto cfg = write(dir, "s.ini", std::string(kCube) + "\n[solver]\nmax_iterations = 1\ntolerance = 1e-14\n");
    CHECK(rh_lab("solve --config " + cfg.string() + " --out " + (dir / "out").string()) == 3);
    const json report = json::parse(slurp(dir / "out" / "report.json"));
    CHECK(report["error"]["stage"] == "eigensolve");
    CHECK(report["error"]["kind"] == "solver");
    CHECK(report["error"].contains("final_residual"));
  }

  TEST_CASE("fp-calibrate then verify consumes the persisted constant") {
    const fs::path dir = scratch("calibrate");
    const auto cfg = write(dir, "c.ini", kCube);
    REQUIRE(rh_lab("fp-calibrate --config " + cfg.string() + " --out " + (dir / "cal").string()) == 0);
    const json cal = json::parse(slurp(dir / "cal" / "calibration.json"));
    CHECK(cal["value"].get<double>() > 0.0);
    CHECK(cal["value"].get<double>() == doctest::Approx(2.0 * cal["estimate"].get<double>()));

    std::string text = kCube;
    text = replace(text, "[calibration]\nnodes_per_axis = 17\nbank_size = 6\n", "[calibration]\nfile = cal/calibration.json\n");
    const auto cfg2 = write(dir, "v.ini", text);
    REQUIRE(rh_lab("verify --config " + cfg2.string() + " --out " + (dir / "ver").string()) == 0);
    const json report = json::parse(slurp(dir / "ver" / "report.json"));
    CHECK(report["calibration"]["cn"] == cal["value"]);
    CHECK(report["constants"]["cn"] == cal["value"]);
    CHECK(report["calibration"]["source"].get<std::string>().find("calibration.json") != std::string::npos);
  }

  TEST_CASE("matrix dump is coordinate format") {
    const fs::path dir = scratch("dump");
    const auto cfg = write(dir, "d.ini", kCube);
    REQUIRE(rh_lab("solve --dump-matrix --config " + cfg.string() + " --out " + (dir / "out").string()) == 0);
    std::ifstream in(dir / "out" / "matrix.mtx");
    std::string header;
    std::getline(in, header);
    CHECK(header == "%%MatrixMarket matrix coordinate real general");
    std::size_t rows = 0, cols = 0, nnz = 0;
    in >> rows >> cols >> nnz;
    CHECK(rows == 11u * 11u * 11u);
    CHECK(cols == rows);
    std::size_t count = 0, i = 0, j = 0, diagonal = 0;
    double v = 0.0;
    while (in >> i >> j >> v) {
      ++count;
      CHECK(i >= 1);
      CHECK(i <= rows);
      if (i == j) {
        ++diagonal;
        CHECK(v == doctest::Approx(6.0 * 144.0));
      }
    }
    CHECK(count == nnz);
    CHECK(diagonal == rows);
  }

  TEST_CASE("reruns are byte-identical and the embedded config reproduces the report") {
    const fs::path dir = scratch("determinism");
    const auto cfg = write(dir, "r.ini", kCube);
    REQUIRE(rh_lab("run --config " + cfg.string() + " --out " + (dir / "a").string()) == 0);
    REQUIRE(rh_lab("run --config " + cfg.string() + " --out " + (dir / "b").string()) == 0);
    REQUIRE(rh_lab("run --config " + (dir / "a" / "report.json").string() + " --out " + (dir / "c").string()) == 0);
    for (const char* f : {"report.json", "rhi.csv", "moser.csv", "eigen.csv"}) {
      CAPTURE(f);
      const std::string a = slurp(dir / "a" / f);
      CHECK_FALSE(a.empty());
      CHECK(a == slurp(dir / "b" / f));
      CHECK(a == slurp(dir / "c" / f));
    }
  }

  TEST_CASE("in-process pipeline matches the module results") {
    RunConfig c = parse_config(kCube, ".");
    Pipeline pipeline(c, Command::solve);
    const PipelineResult r = pipeline.execute(false);
    CHECK(r.exit_code == 0);
    const json report = json::parse(r.files.at("report.json"));
    const double h = 1.0 / 12;
    const double t = std::sin(std::acos(-1.0) * h / 2);
    CHECK(report["eigen"]["pairs"][0]["lambda"].get<double>() == doctest::Approx(3 * 4 / (h * h) * t * t).epsilon(1e-8));
    CHECK(r.files.count("eigen.csv") == 1);
  }
}
