#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>
#include <sys/wait.h>

#include "orlicz/errors.hpp"
#include "orlicz/runner.hpp"

using namespace orlicz;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("orlicz_runner_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const fs::path file = dir / "config.json";
  std::ofstream(file) << text;
  return file;
}

std::string slurp(const fs::path& file) {
  std::ifstream f(file, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int invoke(const std::string& command, const fs::path& config, const fs::path& out, int jobs = 1) {
  runner::Invocation inv;
  inv.command = command;
  inv.config = config;
  inv.out = out;
  inv.jobs = jobs;
  std::ostringstream log;
  return runner::run(inv, log);
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_SUITE("runner") {

TEST_CASE("nfunc-inspect reports the ExpSquare indices") {
  const fs::path dir = fresh_dir("inspect");
  const auto cfg = write_config(dir, R"({"command":"nfunc-inspect","params":{"kind":"expsquare"}})");
  CHECK(invoke("nfunc-inspect", cfg, dir / "out") == runner::kOk);
  const std::string summary = slurp(dir / "out" / "summary.txt");
  CHECK(summary.find("ell = 2.0000") != std::string::npos);
  CHECK(summary.find("m = inf") != std::string::npos);
  const json idx = json::parse(slurp(dir / "out" / "indices.json"));
  CHECK(idx["m_infinite"].get<bool>());
  CHECK(std::abs(idx["ell"].get<double>() - 2.0) <= 1e-3);
  CHECK(fs::exists(dir / "out" / "nfunction.csv"));
}

TEST_CASE("psi rows follow the closed form") {
  const fs::path dir = fresh_dir("psi");
  const auto cfg = write_config(dir, R"({"command":"psi","params":{"kind":"power","p":2,"dim":2,"t_grid":[0.5,1,2]}})");
  CHECK(invoke("psi", cfg, dir / "out") == runner::kOk);
  const auto rows = csv_rows(slurp(dir / "out" / "psi.csv"));
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] == std::vector<std::string>{"t", "psi_quadrature", "psi_closed_form", "ratio_to_phi"});
  for (std::size_t k = 1; k < rows.size(); ++k) {
    const double t = std::stod(rows[k][0]);
    // Phi = t^2/2 here, so Psi = (pi/4) t^2 and Psi/Phi = pi/2.
    CHECK(std::stod(rows[k][1]) == doctest::Approx(std::numbers::pi / 4 * t * t).epsilon(1e-8));
    CHECK(std::stod(rows[k][2]) == doctest::Approx(std::numbers::pi / 4 * t * t).epsilon(1e-12));
    CHECK(std::stod(rows[k][3]) == doctest::Approx(std::numbers::pi / 2).epsilon(1e-8));
  }
  const auto cfg2 = write_config(dir, R"({"params":{"kind":"expsquare","dim":1,"t_grid":[0.5,1]}})");
  CHECK(invoke("psi", cfg2, dir / "out2") == runner::kOk);
  const auto rows2 = csv_rows(slurp(dir / "out2" / "psi.csv"));
  REQUIRE(rows2.size() == 3);
  CHECK(rows2[1][2].empty());
}

TEST_CASE("solve writes a manifest, report and solution") {
  const fs::path dir = fresh_dir("solve");
  const auto cfg = write_config(dir, R"({"params":{"nfunction":{"kind":"power","p":2},"gamma":0.5,"s":0.5,
      "grid":{"dim":1,"n":31,"halo":31}}, "seed": 5})");
  CHECK(invoke("solve", cfg, dir / "a") == runner::kOk);
  const json manifest = json::parse(slurp(dir / "a" / "manifest.json"));
  CHECK(manifest["seed"] == 5);
  CHECK(manifest["command"] == "solve");
  CHECK(manifest.contains("version"));
  CHECK(manifest.contains("wall_seconds"));
  CHECK(manifest["params"]["gamma"] == 0.5);
  const json report = json::parse(slurp(dir / "a" / "report.json"));
  CHECK(report["energy"].get<double>() < 0.0);
  CHECK(report["certificates"]["passed"].get<bool>());
  const auto rows = csv_rows(slurp(dir / "a" / "solution.csv"));
  CHECK(rows.size() == 32);
  // Same config, seed and thread count give byte-identical CSV.
  CHECK(invoke("solve", cfg, dir / "b") == runner::kOk);
  CHECK(slurp(dir / "a" / "solution.csv") == slurp(dir / "b" / "solution.csv"));
}

TEST_CASE("config lists run into numbered subdirectories") {
  const fs::path dir = fresh_dir("list");
  const auto cfg = write_config(dir, R"([
      {"params":{"nfunction":{"kind":"power","p":2},"gamma":0.5,"s":0.6,"s_values":[0.5,0.9,0.95,0.99],
                 "grid":{"dim":1,"n":31}}},
      {"params":{"nfunction":{"kind":"sumpower","p":2,"q":3},"gamma":0.25,"s_values":[0.5,0.9,0.95,0.99],
                 "grid":{"dim":1,"n":31}}}])");
  CHECK(invoke("limit-study", cfg, dir / "out", 2) == runner::kOk);
  for (const char* sub : {"000-limit-study", "001-limit-study"}) {
    const auto rows = csv_rows(slurp(dir / "out" / sub / "limit_study.csv"));
    REQUIRE(rows.size() == 5);
    CHECK(rows[0] == std::vector<std::string>{"s", "distance"});
    CHECK(json::parse(slurp(dir / "out" / sub / "manifest.json"))["threads"] == 2);
  }
}

TEST_CASE("exit codes") {
  const fs::path dir = fresh_dir("codes");
  const auto bad_json = write_config(dir, R"({"params": {"kind": "power",)");
  CHECK(invoke("psi", bad_json, dir / "bad") == runner::kConfigError);
  CHECK_FALSE(fs::exists(dir / "bad"));

  // A bad entry anywhere in a list stops everything before any output.
  const auto bad_entry = write_config(dir, R"([{"params":{"kind":"power","p":2}},{"params":{"kind":"power","p":0.5}}])");
  CHECK(invoke("psi", bad_entry, dir / "bad2") == runner::kConfigError);
  CHECK_FALSE(fs::exists(dir / "bad2"));

  const auto mismatch = write_config(dir, R"({"command":"solve","params":{"kind":"power","p":2}})");
  CHECK(invoke("psi", mismatch, dir / "bad3") == runner::kConfigError);

  const auto stuck = write_config(dir, R"({"params":{"nfunction":{"kind":"power","p":2},"grid":{"dim":1,"n":31},
      "max_iterations":2}})");
  CHECK(invoke("solve", stuck, dir / "stuck") == runner::kNonConvergence);
  CHECK(fs::exists(dir / "stuck" / "manifest.json"));

  // Stopping the continuation at eps = 0.1 leaves the weak form unsatisfied.
  const auto loose = write_config(dir, R"({"params":{"nfunction":{"kind":"power","p":2},"grid":{"dim":1,"n":31},
      "eps_schedule":[0.1]}})");
  CHECK(invoke("solve", loose, dir / "loose") == runner::kCertificateFailure);

  const auto huge = write_config(dir, R"({"params":{"nfunction":{"kind":"power","p":2},"grid":{"dim":2,"n":64}}})");
  CHECK(invoke("solve", huge, dir / "huge") == runner::kConfigError);
}

TEST_CASE("parse_experiments") {
  CHECK_THROWS_AS(runner::parse_experiments("fly", json::object(), std::nullopt), ConfigError);
  const auto ex = runner::parse_experiments("acceptance", json{{"params", {{"criteria", {2}}}}, {"seed", 3}}, 9);
  REQUIRE(ex.size() == 1);
  CHECK(ex[0].seed == 9);
  CHECK_THROWS_AS(runner::parse_experiments("acceptance", json{{"params", {{"criteria", {11}}}}}, std::nullopt),
                  ConfigError);
}

TEST_CASE("acceptance subset through the runner") {
  const fs::path dir = fresh_dir("acceptance");
  const auto cfg = write_config(dir, R"({"params":{"criteria":[2]}})");
  CHECK(invoke("acceptance", cfg, dir / "out") == runner::kOk);
  const auto rows = csv_rows(slurp(dir / "out" / "acceptance.csv"));
  REQUIRE(rows.size() == 2);
  CHECK(rows[1][0] == "2");
}

TEST_CASE("command-line front end") {
  const fs::path dir = fresh_dir("cli");
  const auto cfg = write_config(dir, R"({"params":{"kind":"sumpower","p":2,"q":3}})");
  const std::string exe = ORLICZ_VAR_EXE;
  auto code = [](const std::string& cmd) {
    const int raw = std::system((cmd + " 2>/dev/null").c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  CHECK(code(exe + " nfunc-inspect --config " + cfg.string() + " --out " + (dir / "ok").string() + " --seed 4") == 0);
  CHECK(json::parse(slurp(dir / "ok" / "manifest.json"))["seed"] == 4);
  CHECK(code(exe + " psi --out " + (dir / "none").string()) == 4);
  CHECK(code(exe + " psi --config " + (dir / "missing.json").string()) == 4);
  CHECK(code(exe + " bogus") == 4);
}

}
