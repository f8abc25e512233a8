// Runs the poachgrid binary and checks exit codes and error reports.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kCli = POACHGRID_CLI;

struct Result {
  int status = -1;
  std::string err;
};

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("poachgrid-cli-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Result run(const std::string& args, const std::string& env = "") {
  const fs::path err = fs::temp_directory_path() / "poachgrid-cli-stderr.txt";
  const std::string cmd = env + " '" + kCli + "' " + args + " > /dev/null 2> '" + err.string() + "'";
  const int raw = std::system(cmd.c_str());
  Result r;
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  std::ifstream in(err);
  std::ostringstream ss;
  ss << in.rdbuf();
  r.err = ss.str();
  return r;
}

json report(const Result& r) {
  const auto line = r.err.substr(0, r.err.find('\n'));
  return json::parse(line);
}

fs::path synth(const std::string& name) {
  const fs::path dir = scratch(name);
  std::ofstream(dir / "synth.json") << R"({"version": 1, "size": 12, "effort_budget": 80, "output_dir": "park"})";
  const Result r = run("synth --config '" + (dir / "synth.json").string() + "'");
  REQUIRE(r.status == 0);
  return dir / "park" / "config.json";
}

}  // namespace

TEST_CASE("usage errors exit 2") {
  CHECK(run("").status == 2);
  CHECK(run("deploy --config x").status == 2);
  CHECK(run("train").status == 2);
  CHECK(run("train --config /nonexistent/c.json").status == 2);
  CHECK(run("--help").status == 0);
}

TEST_CASE("malformed config exits 2 with a structured report") {
  const fs::path dir = scratch("badconfig");
  std::ofstream(dir / "c.json") << "{\"version\": 1";
  const Result r = run("featurize --config '" + (dir / "c.json").string() + "'");
  CHECK(r.status == 2);
  const json j = report(r);
  CHECK(j.at("stage") == "config");
  CHECK(j.at("category") == "config");
}

TEST_CASE("missing shapefile exits 3 naming the path") {
  const fs::path cfg = synth("missing");
  std::ifstream in(cfg);
  json j = json::parse(in);
  j["boundary"] = "gone.shp";
  std::ofstream(cfg) << j.dump();
  const Result r = run("featurize --config '" + cfg.string() + "'");
  CHECK(r.status == 3);
  const json rep = report(r);
  CHECK(rep.at("stage") == "featurize");
  CHECK(rep.at("category") == "input");
  CHECK(rep.at("message").get<std::string>().find("gone.shp") != std::string::npos);
}

TEST_CASE("stages run in isolation and check their dependencies") {
  const fs::path cfg = synth("stages");
  const fs::path out = cfg.parent_path() / "out";
  const std::string c = " --config '" + cfg.string() + "'";

  Result r = run("evaluate" + c);
  CHECK(r.status == 3);
  CHECK(report(r).at("stage") == "evaluate");

  CHECK(run("featurize" + c).status == 0);
  CHECK(fs::exists(out / "features" / "index.json"));
  CHECK_FALSE(fs::exists(out / "model-2019-all.json"));

  r = run("evaluate" + c);
  CHECK(r.status == 3);
  CHECK(report(r).at("message").get<std::string>().find("train") != std::string::npos);

  CHECK(run("train" + c + " --seed 7").status == 0);
  CHECK(run("predict" + c + " --effort 1 --effort 2.5").status == 0);
  CHECK(fs::exists(out / "risk-2019-all-e1.png"));
  CHECK(fs::exists(out / "risk-2019-all-e2.5.tif"));
  CHECK(run("evaluate" + c).status == 0);
  CHECK(fs::exists(out / "metrics.csv"));
}

TEST_CASE("thread cap comes from the environment") {
  const fs::path cfg = synth("threads");
  const std::string c = "run --config '" + cfg.string() + "'";
  CHECK(run(c, "POACHGRID_THREADS=abc").status == 2);
  CHECK(run(c, "POACHGRID_THREADS=0").status == 2);
  CHECK(run(c, "POACHGRID_THREADS=2").status == 0);
}
