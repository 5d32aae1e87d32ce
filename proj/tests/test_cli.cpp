// SPDX-License-Identifier: MIT
// End-to-end tests of the command-line tool: exit codes, artifacts, config
// precedence, output-directory environment variable and transform round trips.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "json.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#ifndef PANELFACTOR_CLI_PATH
#error "PANELFACTOR_CLI_PATH must point at the command-line executable"
#endif
#ifndef PANELFACTOR_DATA_DIR
#error "PANELFACTOR_DATA_DIR must point at the repository data directory"
#endif

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("pf_cli_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Run run(const std::string& args, const std::string& env = "") {
  const fs::path log = fs::temp_directory_path() / ("pf_cli_" + std::to_string(::getpid()) + ".log");
  const std::string cmd = env + " " + PANELFACTOR_CLI_PATH + " " + args + " > " + log.string() + " 2>&1";
  const int rc = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  r.out = slurp(log);
  return r;
}

const std::string kData = std::string(" --data ") + PANELFACTOR_DATA_DIR + "/cigar.csv --id state --time year";
const std::string kLevels =
    " --response 'log(sales)' --regressors 'log(deflate(price,cpi)),log(deflate(ndi,cpi))'";
const std::string kDiffs =
    " --response 'diff(log(sales))' --regressors 'diff(log(deflate(price,cpi))),diff(log(deflate(ndi,cpi)))'";

}  // namespace

TEST_CASE("fit-kss writes every artifact") {
  const fs::path out = scratch("kss");
  Run r = run("fit-kss" + kData + kLevels + " --output " + out.string());
  INFO(r.out);
  REQUIRE(r.code == 0);
  for (const char* f : {"fit.json", "factors.csv", "loadings.csv", "effects.csv", "veff.csv"})
    CHECK(fs::exists(out / f));
  Json j = Json::parse(slurp(out / "fit.json"));
  CHECK(j["d"] == 6);
  CHECK(j["coefficients"].size() == 3);
}

TEST_CASE("fit-eup with an error case") {
  const fs::path out = scratch("eup");
  Run r = run("fit-eup" + kData + kDiffs + " --no-intercept --dim-criterion PC3 --error-case 2 --output " +
              out.string());
  INFO(r.out);
  REQUIRE(r.code == 0);
  Json j = Json::parse(slurp(out / "fit.json"));
  CHECK(j["d"] == 5);
  CHECK(j["coefficients"][0]["estimate"].get<double>() == doctest::Approx(-0.31401008).epsilon(1e-6));
}

TEST_CASE("exit codes") {
  const fs::path out = scratch("codes");
  // Data error: unknown column.
  CHECK(run("fit-kss" + kData + " --response 'log(nosuch)' --regressors price --output " + out.string()).code == 3);
  // Data error: missing file.
  CHECK(run("optdim --data /nonexistent.csv --input sales --output " + out.string()).code == 3);
  // Model error: Hausman test with too few factors.
  Run h = run("check --test hausman --d-max 2" + kData + kDiffs + " --no-intercept --output " + out.string());
  INFO(h.out);
  CHECK(h.code == 2);
  CHECK(h.out.find("NegativeStatistic") != std::string::npos);
  CHECK(h.out.find("NegativeStatistic: NegativeStatistic") == std::string::npos);
  // Usage error.
  CHECK(run("fit-kss --no-such-flag").code == 2);
}

TEST_CASE("consult-dim prints the table and requires a dimension") {
  const fs::path out = scratch("consult");
  Run r = run("fit-kss --consult-dim" + kData + kLevels + " --output " + out.string());
  CHECK(r.code == 2);
  CHECK(r.out.find("KSS.C") != std::string::npos);
  CHECK(fs::exists(out / "dims.json"));
  CHECK_FALSE(fs::exists(out / "fit.json"));
  Run ok = run("fit-kss --consult-dim --factor-dim 4" + kData + kLevels + " --output " + out.string());
  CHECK(ok.code == 0);
  CHECK(Json::parse(slurp(out / "fit.json"))["d"] == 4);
}

TEST_CASE("config file values are overridden by flags") {
  const fs::path out = scratch("config");
  const fs::path cfg = out / "job.ini";
  {
    std::ofstream f(cfg);
    f << "data = " << PANELFACTOR_DATA_DIR << "/cigar.csv\n"
      << "id = state\n"
      << "time = year\n"
      << "[fit-kss]\n"
      << "response = log(sales)\n"
      << "regressors = \"log(deflate(price,cpi)),log(deflate(ndi,cpi))\"\n"
      << "factor-dim = 3\n";
  }
  Run a = run("--config " + cfg.string() + " --output " + (out / "a").string() + " fit-kss");
  INFO(a.out);
  REQUIRE(a.code == 0);
  CHECK(Json::parse(slurp(out / "a" / "fit.json"))["d"] == 3);
  Run b = run("--config " + cfg.string() + " --output " + (out / "b").string() + " fit-kss --factor-dim 2");
  REQUIRE(b.code == 0);
  CHECK(Json::parse(slurp(out / "b" / "fit.json"))["d"] == 2);
}

TEST_CASE("output directory defaults to the environment variable") {
  const fs::path out = scratch("env");
  Run r = run("optdim" + kData + " --input 'log(sales)'", "PANELFACTOR_OUTPUT_DIR=" + out.string());
  INFO(r.out);
  REQUIRE(r.code == 0);
  Json j = Json::parse(slurp(out / "dims.json"));
  CHECK(j["criteria"].size() == 16);
}

TEST_CASE("transform round trip through wide CSV is byte-identical") {
  const fs::path a = scratch("tr_a"), b = scratch("tr_b");
  Run r = run("transform" + kData + " --input sales --steps log,diff --name dls --output " + a.string());
  INFO(r.out);
  REQUIRE(r.code == 0);
  Json m = Json::parse(slurp(a / "manifest.json"));
  CHECK(m["variables"][0]["steps"].size() == 3);
  // Re-export through --wide with an empty pipeline.
  Run r2 = run("transform --wide dls=" + (a / "dls.csv").string() + " --input dls --output " + b.string());
  INFO(r2.out);
  REQUIRE(r2.code == 0);
  CHECK(slurp(a / "dls.csv") == slurp(b / "dls.csv"));
}

TEST_CASE("reruns are bit-identical") {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  REQUIRE(run("fit-eup" + kData + kDiffs + " --no-intercept --output " + a.string()).code == 0);
  REQUIRE(run("fit-eup" + kData + kDiffs + " --no-intercept --output " + b.string()).code == 0);
  for (const auto& e : fs::directory_iterator(a)) CHECK(slurp(e.path()) == slurp(b / e.path().filename()));
}
