#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "orlicz/cli.hpp"
#include "orlicz/errors.hpp"

using namespace orlicz;
using namespace orlicz::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("orlicz_cli_test_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string read(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "orlicz-regularity");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return run_command(static_cast<int>(argv.size()), argv.data());
}

ConfigError config_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e;
  }
  FAIL("no ConfigError for: " << text);
  return ConfigError("");
}

const char* kMinimal =
    "task = capacity\n"
    "phi = power(2)\n"
    "K = ball(0, 0, 1)\n"
    "ambient = ball(0, 0, 2)\n"
    "h = 1/64\n";

}  // namespace

TEST_CASE("minimal capacity config") {
  const Scenario s = parse_config(kMinimal);
  CHECK(s.task == Task::capacity);
  CHECK(s.h == 1.0 / 64);
  CHECK_FALSE(s.h_defaulted);
  CHECK(s.phi->spec() == "power(2)");
  CHECK(s.notes.empty());
}

TEST_CASE("missing h is defaulted and noted") {
  const Scenario s = parse_config("task = capacity\nphi = power(2)\nK = ball(0,0,1)\nambient = ball(0,0,2)\n");
  CHECK(s.h == 1.0 / 64);
  CHECK(s.h_defaulted);
  REQUIRE(s.notes.size() == 1);
  CHECK(s.notes[0].find("1/64") == std::string::npos);
  CHECK(s.notes[0].find("0.015625") != std::string::npos);
}

TEST_CASE("config errors carry positions") {
  auto e = config_error("task = capacity\nmesh_type = p1\n");
  CHECK(e.line() == 2);
  CHECK(e.column() == 1);
  CHECK(e.path() == "mesh_type");

  e = config_error("phi = power(2)\nphi = power(3)\n");
  CHECK(e.line() == 2);

  e = config_error("h = 1/(2 - 2)\n");
  CHECK(e.line() == 1);
  CHECK(e.column() == 6);

  e = config_error("phi = power(2\n");
  CHECK(e.path() == "phi");
  CHECK(e.column() == 14);

  e = config_error("phi = cube(2)\n");
  CHECK(e.column() == 7);

  e = config_error("phi = power(1)\n");
  CHECK(e.path() == "phi");

  e = config_error("task = wiener\nphi = power(2)\ndomain = ball(0, 0, 1)\n");
  CHECK(e.path() == "x0");

  e = config_error("K = halfplane(1, 0, 0) + 1\n");
  CHECK(e.path() == "K");

  CHECK_THROWS_AS(load_config("/nonexistent/config.cfg"), ConfigError);
}

TEST_CASE("expressions, comments and nested geometry") {
  const Scenario s = parse_config(
      "# slit square\n"
      "task = wiener   # trailing comment\n"
      "phi = double_phase(2, 3, pos_power(0.5))\n"
      "domain = minus(rect(-1, -1, 1, 1), slit(-1, 0, 0, 0), ball(0.5, 0.5, 0.1), puncture(-0.5, 0.5))\n"
      "x0 = point(0, 0)\n"
      "rho = 2 * (1/8)\n"
      "radii = list(0.5, 0.25)\n"
      "exterior_check = true\n");
  CHECK(s.rho == 0.25);
  CHECK(s.radii == std::vector<double>{0.5, 0.25});
  CHECK(s.exterior_check);
  CHECK(s.domain->slits().size() == 1);
  CHECK(s.domain->punctures().size() == 1);
  CHECK_FALSE(s.domain->contains({0.5, 0.5}));
  CHECK(s.domain->contains({0.5, -0.5}));
  CHECK(s.domain->marked_point()->x == 0.0);
}

TEST_CASE("round trip through the emitted config") {
  for (const char* text :
       {kMinimal,
        "task = wiener\nphi = variable_exponent(step(1.5, 3, 0.25, 0.1))\n"
        "domain = minus(ball(0, 0, 1), puncture(0, 0))\nx0 = point(0, 0)\nscales = 4\nseed = 17\n",
        "task = perron\nphi = power_log(2.5)\ndomain = intersect(ball(0, 0, 1), halfplane(0, 1, 0.5))\n"
        "box = rect(-1, -1, 1, 1)\ndata = linear(0.1, -0.2, 0.3)\nrestriction = ball(0, 0, 0.5)\nmetric = diagonal\n",
        "task = solve\nphi = orlicz_log(1.7)\ndomain = union(ball(0, 0, 1), rect(0, -0.5, 2, 0.5))\n"
        "obstacle = radial_levels(0.3, 0.5, -1)\nside = lower\ntol_grad = 1e-9\nh = 0.1\n"}) {
    const Scenario a = parse_config(text);
    const Scenario b = parse_config(to_config(a));
    CHECK(a == b);
    CHECK(to_config(a) == to_config(b));
  }
}

TEST_CASE("data functions") {
  const auto f = DataFunction::parse("linear", {1, 2, 3});
  CHECK(f({1, 1}) == 6.0);
  CHECK(f.spec() == "linear(1, 2, 3)");
  CHECK(DataFunction::parse("radial_levels", {0.5, 1, -1})({0.1, 0}) == 1.0);
  CHECK(DataFunction::parse("abs_x", {})({-2, 0}) == 2.0);
  CHECK_THROWS_AS(DataFunction::parse("linear", {1}), ConfigError);
  CHECK_THROWS_AS(DataFunction::parse("cubic", {}), ConfigError);
}

TEST_CASE("sha256 test vectors") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("empty results give an empty manifest") {
  const auto dir = scratch("empty");
  const auto manifest = emit_report({}, dir);
  CHECK(manifest.empty());
  const auto j = nlohmann::json::parse(read(dir / "manifest.json"));
  CHECK(j["files"].empty());
}

TEST_CASE("IO failures name the path") {
  const auto dir = scratch("io");
  write(dir / "blocker", "x");
  try {
    emit_report({{"a.json", "{}"}}, dir / "blocker" / "sub");
    FAIL("expected an IO error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("blocker") != std::string::npos);
  }
}

TEST_CASE("capacity command writes report, table and manifest") {
  const auto dir = scratch("capacity");
  write(dir / "annulus.cfg", std::string(kMinimal) + "h = 1/16\n");
  CHECK(run({"capacity", "--config", (dir / "annulus.cfg").string()}) == 2);  // duplicate h
  write(dir / "annulus.cfg", "task = capacity\nphi = power(2)\nK = ball(0, 0, 1)\nambient = ball(0, 0, 2)\n");
  const auto out = dir / "out";
  REQUIRE(run({"capacity", "--config", (dir / "annulus.cfg").string(), "--out", out.string(), "--h", "0.0625"}) == 0);
  CHECK(fs::exists(out / "capacity.json"));
  CHECK(fs::exists(out / "minimizer.csv"));
  const auto report = nlohmann::json::parse(read(out / "capacity.json"));
  CHECK(report["config"]["h"] == "0.0625");
  CHECK(report["notes"].empty());
  CHECK(report["result"]["value"].get<double>() == doctest::Approx(9.0647).epsilon(0.05));
  const auto manifest = nlohmann::json::parse(read(out / "manifest.json"));
  REQUIRE(manifest["files"].size() == 2);
  for (const auto& f : manifest["files"]) {
    const auto content = read(out / f["name"].get<std::string>());
    CHECK(f["sha256"] == sha256_hex(content));
    CHECK(f["bytes"] == content.size());
  }
  CHECK(read(out / "minimizer.csv").rfind("index,x,y,class,value\n", 0) == 0);
  for (const auto& e : fs::directory_iterator(out)) CHECK(e.path().extension() != ".tmp");
}

TEST_CASE("same config and seed give byte-identical reports") {
  const auto dir = scratch("determinism");
  write(dir / "dp.cfg",
        "phi = double_phase(2, 3, step(0.5, 2, 0.2))\nbox = rect(-0.5, -0.5, 0.5, 0.5)\nradii = list(0.5, 0.25)\n"
        "samples = 300\n");
  const std::vector<std::string> files{"check-phi.json", "check-phi.csv", "check-phi.plot", "manifest.json"};
  const std::vector<std::string> args{"check-phi", "--config", (dir / "dp.cfg").string(), "--out", (dir / "a").string(),
                                      "--seed", "5"};
  REQUIRE(run(args) == 0);
  std::vector<std::string> first;
  for (const auto& f : files) first.push_back(read(dir / "a" / f));
  REQUIRE(run(args) == 0);
  for (std::size_t i = 0; i < files.size(); ++i) {
    CAPTURE(files[i]);
    CHECK(read(dir / "a" / files[i]) == first[i]);
  }
  const auto j = nlohmann::json::parse(read(dir / "a" / "check-phi.json"));
  CHECK(j["result"]["sc_certified"]["lower"] == 2.0);
  CHECK(j["result"]["sc_certified"]["upper"] == 3.0);
  CHECK(j["result"]["young"]["violations"] == 0);
}

TEST_CASE("exit codes") {
  const auto dir = scratch("exit");
  write(dir / "bad.cfg", "task = capacity\nmesh_type = p1\n");
  CHECK(run({"capacity", "--config", (dir / "bad.cfg").string()}) == 2);
  CHECK(run({"capacity", "--config", (dir / "missing.cfg").string()}) == 2);
  CHECK(run({"flatten", "--config", (dir / "bad.cfg").string()}) == 2);
  write(dir / "solve.cfg", "phi = power(4)\ndomain = ball(0, 0, 1)\ndata = sin_theta(3)\nh = 1/16\nmax_iters = 1\n");
  CHECK(run({"capacity", "--config", (dir / "solve.cfg").string()}) == 2);  // no K for capacity
  CHECK(run({"solve", "--config", (dir / "solve.cfg").string(), "--out", (dir / "nc").string()}) == 3);
  CHECK(fs::exists(dir / "nc" / "solve.json"));
  write(dir / "blocker", "x");
  CHECK(run({"solve", "--config", (dir / "solve.cfg").string(), "--out", (dir / "blocker").string()}) == 1);
  write(dir / "wrong.cfg", "task = wiener\nphi = power(2)\n");
  CHECK(run({"check-phi", "--config", (dir / "wrong.cfg").string()}) == 2);
}

TEST_CASE("wiener command on a punctured disk") {
  const auto dir = scratch("wiener");
  write(dir / "p.cfg",
        "task = wiener\nphi = power(2)\ndomain = minus(ball(0, 0, 1), puncture(0, 0))\nx0 = point(0, 0)\n"
        "nodes_per_radius = 16\n");
  REQUIRE(run({"wiener", "--config", (dir / "p.cfg").string(), "--out", (dir / "o").string()}) == 0);
  const auto j = nlohmann::json::parse(read(dir / "o" / "wiener.json"));
  CHECK(j["result"]["classification"] == "irregular");
  CHECK(fs::exists(dir / "o" / "wiener.csv"));
  const auto plot = read(dir / "o" / "wiener.plot");
  CHECK(std::count(plot.begin(), plot.end(), '\n') == 7);
}
