#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "grushin/harnack_lab.hpp"

namespace fs = std::filesystem;
using grushin::cli::run;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "grushin_cli_test" / name;
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary) << text;
}

}  // namespace

TEST_CASE("geom verify") {
  const fs::path out = scratch("geom");
  CHECK(run({"geom", "verify", "--center", "0,0", "--radius", "1", "--samples", "10000", "--out",
             out.string()}) == grushin::cli::kExitOk);
  for (const char* f : {"manifest.json", "report.json", "summary.csv", "timing.json"}) {
    CHECK(fs::exists(out / f));
  }
  const json report = json::parse(slurp(out / "report.json"));
  CHECK(report.at("passed") == true);
  CHECK(report.at("reports").size() == 3);
  const json manifest = json::parse(slurp(out / "manifest.json"));
  CHECK(manifest.at("command") == "geom verify");
  CHECK(manifest.at("config_hash") == report.at("config_hash"));
  CHECK(slurp(out / "summary.csv").rfind("report,status,passed,key,value,relation,bound\n", 0) == 0);
}

TEST_CASE("barrier verify") {
  const fs::path out = scratch("barrier");
  CHECK(run({"barrier", "verify", "--lambda", "1", "--big-lambda", "2", "--center", "1,0", "--radius", "1",
             "--samples", "2000", "--out", out.string()}) == grushin::cli::kExitOk);
  const json report = json::parse(slurp(out / "report.json"));
  REQUIRE(report.at("reports").size() == 4);
  CHECK(report.at("reports")[0].at("name") == "power_subsolution");
  CHECK(report.at("reports")[2].at("name") == "ring_boundary_values");
}

TEST_CASE("solve and abp artifacts") {
  const fs::path s = scratch("solve");
  CHECK(run({"solve", "run", "--grid-n", "33", "--field", "rotating", "--lambda", "0.5", "--out", s.string()}) ==
        grushin::cli::kExitOk);
  CHECK(slurp(s / "field.csv").rfind("x1,x2,a11,a12,a22\n", 0) == 0);
  CHECK(fs::exists(s / "solution.csv"));

  const fs::path a = scratch("abp");
  CHECK(run({"abp", "check", "--grid-n", "33", "--out", a.string()}) == grushin::cli::kExitOk);
  CHECK(fs::exists(a / "envelope.csv"));
}

TEST_CASE("usage and configuration errors exit 1") {
  const fs::path out = scratch("usage");
  CHECK(run({"geom", "verify", "--colour", "red"}) == grushin::cli::kExitUsage);
  CHECK(run({"frobnicate"}) == grushin::cli::kExitUsage);
  CHECK(run({}) == grushin::cli::kExitUsage);
  CHECK(run({"geom", "verify", "--center", "0;0", "--out", out.string()}) == grushin::cli::kExitUsage);
  CHECK(run({"lab", "harnack", "--eta", "1.5", "--out", out.string()}) == grushin::cli::kExitUsage);
  CHECK(run({"lab", "harnack", "--config", (out / "missing.json").string()}) == grushin::cli::kExitUsage);
  CHECK(run({"lab", "sweep", "--out", out.string()}) == grushin::cli::kExitUsage);

  write(out / "bad.json", "{\"radius\": ");
  CHECK(run({"lab", "harnack", "--config", (out / "bad.json").string()}) == grushin::cli::kExitUsage);
  write(out / "unknown.json", "{\"radius\": 1.0, \"colour\": 3}");
  CHECK(run({"lab", "harnack", "--config", (out / "unknown.json").string()}) == grushin::cli::kExitUsage);

  // the output directory would have to live beneath a regular file
  write(out / "file", "x");
  CHECK(run({"geom", "verify", "--samples", "100", "--out", (out / "file" / "sub").string()}) ==
        grushin::cli::kExitUsage);
}

TEST_CASE("verdict failure exits 2") {
  const fs::path out = scratch("verdict");
  // a pole sitting on a boundary node makes that sweep item error out
  grushin::lab::ExperimentConfig cfg;
  cfg.experiment = grushin::lab::Experiment::Harnack;
  cfg.grid_n = 33;
  const auto s = grushin::lab::solve_ball_problem(cfg);
  std::size_t k = 0;
  while (s.u.tags[k] != grushin::NodeTag::Boundary) ++k;
  const grushin::Point node = s.u.grid.node(k);
  json doc = cfg.to_json();
  doc["boundary"] = "pole";
  doc["pole"] = {node.x1, node.x2};
  write(out / "pole.json", doc.dump());
  CHECK(run({"lab", "harnack", "--config", (out / "pole.json").string(), "--out", (out / "run").string()}) ==
        grushin::cli::kExitVerdict);
  const json report = json::parse(slurp(out / "run" / "report.json"));
  CHECK(report.at("passed") == false);
  CHECK(report.at("reports")[0].at("status") == "error");

  // rejected runs are not failures
  write(out / "zero.json", R"({"boundary": "zero", "grid_n": 33})");
  CHECK(run({"lab", "harnack", "--config", (out / "zero.json").string(), "--out", (out / "zero").string()}) ==
        grushin::cli::kExitOk);
}

TEST_CASE("flags override the configuration file") {
  const fs::path out = scratch("override");
  write(out / "c.json", R"({"grid_n": 33, "seed": 4, "radius": 2.0})");
  CHECK(run({"lab", "critical-density", "--config", (out / "c.json").string(), "--seed", "9", "--out",
             (out / "run").string()}) == grushin::cli::kExitOk);
  const json m = json::parse(slurp(out / "run" / "manifest.json"));
  const json cfg = m.at("resolved_config")[0];
  CHECK(cfg.at("seed") == 9);
  CHECK(cfg.at("radius") == 2.0);
  CHECK(cfg.at("grid_n") == 33);
}

TEST_CASE("output root from the environment") {
  const fs::path root = scratch("envroot");
  ::setenv("GRUSHIN_LAB_OUT", root.string().c_str(), 1);
  CHECK(run({"lab", "harnack", "--grid-n", "33"}) == grushin::cli::kExitOk);
  ::unsetenv("GRUSHIN_LAB_OUT");
  std::size_t dirs = 0;
  for (const auto& e : fs::directory_iterator(root)) {
    dirs += e.is_directory() && e.path().filename().string().rfind("lab-harnack-", 0) == 0;
    CHECK(fs::exists(e.path() / "report.json"));
  }
  CHECK(dirs == 1);
}

TEST_CASE("re-runs reproduce report.json byte for byte") {
  const fs::path out = scratch("determinism");
  const std::string config = std::string(GRUSHIN_TEST_DATA) + "/sweep.json";
  write(out / "small.json", R"({"base": {"grid_n": 33}, "fields": ["identity", "checkerboard"],
                               "seeds": [1, 2], "offsets": [0, 1.5]})");
  const std::string small = (out / "small.json").string();
  CHECK(run({"lab", "harnack", "--config", small, "--out", (out / "a").string()}) == grushin::cli::kExitOk);
  CHECK(run({"lab", "harnack", "--config", small, "--jobs", "2", "--out", (out / "b").string()}) ==
        grushin::cli::kExitOk);
  CHECK(slurp(out / "a" / "report.json") == slurp(out / "b" / "report.json"));
  CHECK(slurp(out / "a" / "summary.csv") == slurp(out / "b" / "summary.csv"));
  CHECK(json::parse(slurp(out / "a" / "report.json")).at("reports").size() == 8);
  CHECK(fs::exists(config));
}
