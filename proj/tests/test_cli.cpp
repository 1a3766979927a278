#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;

namespace {

struct Invocation {
  int code;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("mannctl_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

Invocation mannctl(const std::string& args, const fs::path& dir) {
  const fs::path out = dir / "stdout.txt", err = dir / "stderr.txt";
  const std::string cmd = std::string("\"") + MANNCTL_PATH + "\" " + args +
                          " >\"" + out.string() + "\" 2>\"" + err.string() + "\"";
  const int status = std::system(cmd.c_str());
  const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return {code, slurp(out), slurp(err)};
}

}  // namespace

TEST_CASE("invalid flag values exit 2 before touching the output directory") {
  const fs::path dir = scratch("baddt");
  const fs::path out = dir / "never";
  const auto r = mannctl("run --scenario 1 --dt -1 --out " + out.string(), dir);
  CHECK(r.code == 2);
  CHECK_FALSE(fs::exists(out));
  const auto err = nlohmann::json::parse(r.err);
  CHECK(err.contains("error"));
  CHECK(err.contains("message"));

  CHECK(mannctl("run --scenario 9 --out " + out.string(), dir).code == 2);
  CHECK(mannctl("run --controller bogus --out " + out.string(), dir).code == 2);
  CHECK(mannctl("compare --realloc always --out " + out.string(), dir).code != 0);
  CHECK(mannctl("--no-such-flag", dir).code == 2);
  CHECK_FALSE(fs::exists(out));
}

TEST_CASE("run writes trace, summary and scenario") {
  const fs::path dir = scratch("run");
  const auto r = mannctl("run --scenario 1 --t-end 1 --controller mann-proposed "
                         "--realloc always --out " + (dir / "o").string(),
                         dir);
  REQUIRE(r.code == 0);
  CHECK(fs::exists(dir / "o" / "trace.csv"));
  CHECK(fs::exists(dir / "o" / "scenario.yaml"));
  const auto doc = nlohmann::json::parse(slurp(dir / "o" / "summary.json"));
  REQUIRE(doc["runs"].size() == 1);
  CHECK(doc["runs"][0]["label"].get<std::string>().find("realloc always") !=
        std::string::npos);
}

TEST_CASE("output directory falls back to MANN_OUT_DIR") {
  const fs::path dir = scratch("envdir");
  const std::string cmd = std::string("MANN_OUT_DIR=\"") + (dir / "env").string() +
                          "\" \"" + MANNCTL_PATH +
                          "\" run --scenario 0 --t-end 0.5 --controller nn >/dev/null";
  REQUIRE(std::system(cmd.c_str()) == 0);
  CHECK(fs::exists(dir / "env" / "summary.json"));
}

TEST_CASE("compare tabulates four controllers and is reproducible") {
  const fs::path dir = scratch("compare");
  const std::string common = "compare --scenario 1 --t-end 12 --seed 3 --out ";
  const auto a = mannctl(common + (dir / "a").string(), dir);
  REQUIRE(a.code == 0);
  const auto b = mannctl(common + (dir / "b").string() + " --serial", dir);
  REQUIRE(b.code == 0);

  const auto doc = nlohmann::json::parse(slurp(dir / "a" / "summary.json"));
  CHECK(doc["runs"].size() == 4);
  CHECK(doc["tables"].size() == 2);
  CHECK(doc["tables"][0]["rows"].size() == 4);
  CHECK(slurp(dir / "a" / "summary.json") == slurp(dir / "b" / "summary.json"));
  for (const char* id : {"nn", "mann-soft", "mann-hard", "mann-proposed"})
    CHECK(fs::exists(dir / "a" / id / "trace.csv"));
  CHECK(a.out.find("MANN proposed") != std::string::npos);
}

TEST_CASE("scenario files") {
  const fs::path dir = scratch("files");
  std::ofstream(dir / "empty.yaml") << "";
  std::ofstream(dir / "theta.yaml") << "memory:\n  theta: 0.3\n";
  std::ofstream(dir / "bad.yaml") << "memory:\n  tehta: 0.3\n";
  const std::string o = " --t-end 0.5 --out " + (dir / "o").string();
  CHECK(mannctl("run --scenario " + (dir / "empty.yaml").string() + o, dir).code == 2);
  const auto bad = mannctl("run --scenario " + (dir / "bad.yaml").string() + o, dir);
  CHECK(bad.code == 2);
  CHECK(bad.err.find("line 2") != std::string::npos);
  CHECK(mannctl("run --scenario " + (dir / "theta.yaml").string() + o, dir).code == 0);
  const std::string yaml = slurp(dir / "o" / "scenario.yaml");
  const auto at = yaml.find("theta: ");
  REQUIRE(at != std::string::npos);
  CHECK(std::stod(yaml.substr(at + 7)) == 0.3);
}

TEST_CASE("verify succeeds") {
  const fs::path dir = scratch("verify");
  const auto r = mannctl("verify", dir);
  CHECK(r.code == 0);
  CHECK(r.out.find("FAIL") == std::string::npos);
}
