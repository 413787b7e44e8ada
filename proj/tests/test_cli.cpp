#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "npbe/cli.hpp"
#include "npbe/config.hpp"
#include "npbe/constants.hpp"
#include "npbe/csv.hpp"
#include "npbe/error.hpp"

using namespace npbe;
namespace fs = std::filesystem;

namespace {

const std::string kConfigs = NPBE_CONFIG_DIR;

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("npbe_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

double value_of(const std::string& block, const std::string& key) {
  std::istringstream in(block);
  std::string line;
  while (std::getline(in, line))
    if (line.rfind(key + " = ", 0) == 0) return std::stod(line.substr(key.size() + 3));
  FAIL("key not found: " << key);
  return 0.0;
}

}  // namespace

TEST_CASE("Config::parse") {
  std::istringstream in(
      "top = 1\n"
      "# comment\n"
      "[grid]\n"
      "  dim = 2   ; trailing\n"
      "lower = 0, -1.5\n"
      "[model]\n"
      "flag = true\n"
      "name = charge shift\n");
  const auto cfg = Config::parse(in, "mem");
  CHECK(cfg.get_int("top") == 1);
  CHECK(cfg.get_int("grid.dim") == 2);
  CHECK(cfg.get_doubles("grid.lower") == std::vector<double>{0.0, -1.5});
  CHECK(cfg.get_bool("model.flag", false));
  CHECK(cfg.get_string("model.name") == "charge shift");
  CHECK(cfg.get_double("grid.upper", 7.0) == 7.0);
  CHECK(cfg.source() == "mem");
  CHECK_THROWS_AS(cfg.get_string("grid.upper"), InvalidArgument);
  CHECK_THROWS_AS(cfg.get_double("model.name"), InvalidArgument);
}

TEST_CASE("Config::parse errors name the line") {
  std::istringstream bad("[grid\n");
  try {
    Config::parse(bad, "f.cfg");
    FAIL("expected an error");
  } catch (const InvalidArgument& e) {
    CHECK(std::string(e.what()).find("f.cfg:1") != std::string::npos);
  }
  std::istringstream noeq("[a]\nx 1\n");
  CHECK_THROWS_AS(Config::parse(noeq), InvalidArgument);
  CHECK_THROWS_AS(Config::load("/nonexistent/file.cfg"), InvalidArgument);
}

TEST_CASE("format_number and metadata") {
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(format_number(19.0) == "19");
  std::ostringstream a, b;
  write_metadata(a, {{"k", "v"}}, true);
  write_metadata(b, {{"k", "v"}}, false);
  CHECK(a.str().rfind("# npbe_lab ", 0) == 0);
  CHECK(a.str().find("# timestamp: ") != std::string::npos);
  CHECK(b.str().find("timestamp") == std::string::npos);
  CHECK(b.str().find("# k: v\n") != std::string::npos);
}

TEST_CASE("dispatch: usage errors exit with 2") {
  CHECK(run({}).code == cli::kUsageError);
  CHECK(run({"frobnicate"}).code == cli::kUsageError);
  const auto r = run({"solve", "--config", kConfigs + "/linear.cfg", "--bogus"});
  CHECK(r.code == cli::kUsageError);
  CHECK_FALSE(r.err.empty());
  CHECK(run({"solve"}).code == cli::kUsageError);
  CHECK(run({"solve", "--config", "/nonexistent.cfg"}).code == cli::kUsageError);
  CHECK(run({"solve", "--config", kConfigs + "/linear.cfg", "--tol", "-1"}).code == cli::kUsageError);
  CHECK(run({"--help"}).code == cli::kSuccess);
}

TEST_CASE("dispatch: domain errors exit with 1") {
  const auto dir = scratch("domain");
  fs::create_directories(dir);
  std::ofstream(dir / "bad.cfg") << "[grid]\ndim = 2\nnodes = 4\n";
  const auto r = run({"solve", "--config", (dir / "bad.cfg").string(), "--out", dir.string()});
  CHECK(r.code == cli::kDomainError);
  CHECK(r.err.rfind("npbe solve: ", 0) == 0);
}

TEST_CASE("solve: linear problem takes one Picard iteration") {
  const auto dir = scratch("solve");
  const auto r = run({"solve", "--config", kConfigs + "/linear.cfg", "--out", dir.string()});
  REQUIRE(r.code == cli::kSuccess);
  CHECK(r.out.find("converged after 1 Picard iteration\n") != std::string::npos);
  const auto csv = slurp(dir / "solution.csv");
  CHECK(csv.rfind("# npbe_lab ", 0) == 0);
  CHECK(csv.find("# cfg.problem.kappa_sq: 0") != std::string::npos);
  CHECK(csv.find("\nx,y,value\n") != std::string::npos);
}

TEST_CASE("solve: outputs are identical apart from the timestamp") {
  const auto a = scratch("det_a"), b = scratch("det_b");
  REQUIRE(run({"solve", "--config", kConfigs + "/manufactured1d.cfg", "--out", a.string()}).code == 0);
  REQUIRE(run({"solve", "--config", kConfigs + "/manufactured1d.cfg", "--out", b.string()}).code == 0);
  auto strip = [](const std::string& s) {
    std::istringstream in(s);
    std::string line, out;
    while (std::getline(in, line))
      if (line.rfind("# timestamp:", 0) != 0) out += line + '\n';
    return out;
  };
  CHECK(strip(slurp(a / "solution.csv")) == strip(slurp(b / "solution.csv")));
}

TEST_CASE("constants: report matches the library on the cube") {
  const auto dir = scratch("constants");
  const auto r = run({"constants", "--config", kConfigs + "/cube.cfg", "--out", dir.string()});
  REQUIRE(r.code == cli::kSuccess);
  for (const char* key : {"M0", "y0_star", "banach_factor", "C_H", "C_S"})
    CHECK(r.out.find(std::string(key) + " = ") != std::string::npos);
  const double c_h = value_of(r.out, "C_H"), c_s = value_of(r.out, "C_S");
  const auto sd = m0_y0star(c_h, c_s, 1.0, 1.0);
  CHECK(value_of(r.out, "M0") == doctest::Approx(sd.m0).epsilon(1e-14));
  CHECK(value_of(r.out, "y0_star") == doctest::Approx(sd.y0_star).epsilon(1e-14));
  CHECK(value_of(r.out, "C_D") == 19.0);
  CHECK(value_of(r.out, "banach_factor") < 1.0);
  CHECK(fs::exists(dir / "constants.csv"));
}

TEST_CASE("gridinfo, bound, ode and bifurcate") {
  auto g = run({"gridinfo", "--config", kConfigs + "/cube.cfg"});
  REQUIRE(g.code == 0);
  CHECK(g.out.find("nodes = 729\n") != std::string::npos);
  CHECK(g.out.find("volume = 1\n") != std::string::npos);

  const auto dir = scratch("misc");
  auto b = run({"bound", "--config", kConfigs + "/bound.cfg", "--levels", "1..4", "--out", dir.string()});
  REQUIRE(b.code == 0);
  CHECK(b.out.find("3,29,subexponential,") != std::string::npos);
  CHECK(b.out.find("2,13,algebraic,") != std::string::npos);
  CHECK(run({"bound", "--config", kConfigs + "/bound.cfg", "--levels", "x"}).code == cli::kDomainError);

  auto o = run({"ode", "--out", dir.string()});
  REQUIRE(o.code == 0);
  CHECK(fs::exists(dir / "trajectory.csv"));
  CHECK(fs::exists(dir / "zeros.csv"));
  CHECK(fs::exists(dir / "phase_portrait.csv"));

  auto f = run({"bifurcate", "--config", kConfigs + "/bifurcate.cfg", "--out", dir.string()});
  REQUIRE(f.code == 0);
  CHECK(f.out.find("0.5,yes,") != std::string::npos);
  CHECK(f.out.find("-0.050000000000000003,no,") != std::string::npos);
  CHECK(fs::exists(dir / "profiles.csv"));
}

TEST_CASE("model_from_config rejects a shift that leaves the box") {
  std::istringstream in(
      "[grid]\ndim = 2\nupper = 20\nnodes = 41\n"
      "[model]\ntype = charge_shift\nvariables = 1\ncharge1 = 3, 10, 1\ndirection1 = 1, 0\namplitudes = 1\n");
  const auto cfg = Config::parse(in);
  CHECK_THROWS_AS(cli::model_from_config(cfg, cli::grid_from_config(cfg)), InvalidArgument);
}

TEST_CASE("study_from_config defaults") {
  std::istringstream in("[study]\nlevels = 1, 2\n");
  const auto s = cli::study_from_config(Config::parse(in));
  CHECK(s.levels == std::vector<int>{1, 2});
  CHECK(s.reference_level == 3);
  CHECK(s.jobs == 1);
  CHECK_FALSE(s.sigma_hat.has_value());
}
