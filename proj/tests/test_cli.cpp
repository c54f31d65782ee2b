#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <sstream>

#include "json.hpp"
#include "octcft/cli.hpp"

using namespace octcft;
using nlohmann::json;

namespace {

const std::string kData = OCTCFT_TEST_DATA;

struct Run {
  int code;
  std::string out, err;
  json doc() const { return json::parse(out); }
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string data(const std::string& name) { return kData + "/" + name; }

int run_binary(const std::string& args) {
  const std::string cmd = std::string(OCTCFT_BIN) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("validate: corpus entry passes") {
  auto r = run({"validate", "matrix-2"});
  CHECK(r.code == 0);
  auto d = r.doc();
  CHECK(d["verdict"] == "pass");
  CHECK(d["input"]["source"] == "corpus:matrix-2");
  CHECK(d["input"]["digest"].get<std::string>().size() == 16);
  std::vector<std::string> names;
  for (const auto& c : d["checks"]) names.push_back(c["name"]);
  CHECK(names == std::vector<std::string>{"ainfty_relations", "units", "nondegenerate", "cyclic"});
}

TEST_CASE("validate: a unit of degree 1 fails with exit 1") {
  auto r = run({"validate", data("odd-unit.json")});
  CHECK(r.code == 1);
  auto d = r.doc();
  CHECK(d["verdict"] == "fail");
  CHECK(d["checks"][1]["name"] == "units");
  CHECK(d["checks"][1]["verdict"] == "fail");
}

TEST_CASE("input errors exit 2 with positions or references") {
  auto bad = run({"validate", data("bad-rational.json")});
  CHECK(bad.code == 2);
  auto e = bad.doc()["error"];
  CHECK(e["kind"] == "ParseError");
  CHECK(e["line"] == 4);
  CHECK(e["column"] == 57);
  auto ref = run({"validate", data("bad-reference.json")});
  CHECK(ref.code == 2);
  CHECK(ref.doc()["error"]["kind"] == "ResolutionError");
  CHECK(ref.doc()["error"]["reference"] == "y");
  CHECK(run({"validate", data("does-not-exist.json")}).code == 2);
  CHECK(run({"corpus", "run", "no-such-entry"}).code == 2);
  CHECK(run({"hh", "dual-numbers", "--degrees", "3..1"}).code == 2);
  CHECK(run({"hh", "dual-numbers", "--max-length", "zero"}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({}).code == 2);
  // duality needs a pairing
  CHECK(run({"duality", "dual-numbers"}).code == 2);
}

TEST_CASE("higher products: hint to supply a dg model") {
  CHECK(run({"validate", data("m3-quiver.json")}).code == 0);
  for (const auto& cmd : {"hh", "equiv"}) {
    auto r = run({cmd, data("m3-quiver.json")});
    CHECK(r.code == 2);
    CHECK(r.doc()["error"]["kind"] == "HigherMultiplication");
    CHECK(r.doc()["error"]["hint"].get<std::string>().find("supply dg model") != std::string::npos);
  }
}

TEST_CASE("hh: dual numbers and truncation flags") {
  auto r = run({"hh", "dual-numbers", "--max-length", "6", "--degrees", "0..3"});
  CHECK(r.code == 0);
  auto d = r.doc();
  const auto& hh = d["checks"][2];
  CHECK(hh["name"] == "hh");
  std::vector<std::size_t> dims;
  for (const auto& row : hh["degrees"]) {
    dims.push_back(row["dim"]);
    CHECK(row["complete"] == true);
  }
  CHECK(dims == std::vector<std::size_t>{2, 1, 1, 1});

  auto wide = run({"hh", "dual-numbers", "--max-length", "6", "--degrees", "0..7"});
  CHECK(wide.code == 0);
  CHECK(wide.doc()["checks"][2]["degrees"][7]["complete"] == false);
  auto strict = run({"--strict", "hh", "dual-numbers", "--max-length", "6", "--degrees", "0..7"});
  CHECK(strict.code == 1);
  auto strict_after = run({"hh", "dual-numbers", "--max-length", "6", "--degrees", "0..7", "--strict"});
  CHECK(strict_after.code == 1);
  CHECK(run({"--strict", "hh", "dual-numbers", "--degrees", "0..3"}).code == 0);

  auto g = run({"hh", "ground-field", "--cohomology", "--b-operator"});
  CHECK(g.code == 0);
  for (const auto& row : g.doc()["checks"][2]["degrees"]) CHECK(row["dim"] == (row["degree"] == 0 ? 1 : 0));
}

TEST_CASE("duality, surfcat-check and equiv") {
  CHECK(run({"duality", "sphere-cohomology"}).code == 0);
  CHECK(run({"duality", "matrix-2", "--max-length", "5"}).code == 0);
  auto s = run({"surfcat-check", "--max-n", "5"});
  CHECK(s.code == 0);
  CHECK(s.doc()["checks"].size() == 3);
  auto one = run({"surfcat-check", "--max-n", "4", "--shift", "1", "--alphabet", "3"});
  CHECK(one.code == 0);
  CHECK(one.doc()["checks"][0]["name"] == "d_squared_shift_1");
  auto e = run({"equiv", "dual-numbers", "4"});
  CHECK(e.code == 0);
  auto d = e.doc();
  const auto& cmp = d["checks"][2];
  CHECK(cmp["name"] == "tensor_vs_hochschild");
  CHECK(!cmp["bijection"].empty());
  for (const auto& w : cmp["bijection"]) CHECK((w["sign"] == 1 || w["sign"] == -1));
}

TEST_CASE("corpus list and run") {
  auto l = run({"corpus", "list"});
  CHECK(l.code == 0);
  const auto entries = l.doc()["summary"]["entries"];
  REQUIRE(entries.size() == 6);
  for (std::size_t i = 1; i < entries.size(); ++i)
    CHECK(entries[i - 1]["name"].get<std::string>() < entries[i]["name"].get<std::string>());
  for (const auto& e : entries) {
    auto r = run({"corpus", "run", e["name"]});
    CAPTURE(e["name"].get<std::string>());
    CHECK(r.code == 0);
    for (const auto& c : r.doc()["checks"]) CHECK(!c["provenance"].empty());
  }
}

TEST_CASE("reports are byte-identical across runs and thread counts") {
  const std::vector<std::vector<std::string>> cmds{
      {"validate", "sphere-cohomology"},
      {"hh", "matrix-2", "--max-length", "4", "--cohomology", "--b-operator"},
      {"duality", "sphere-cohomology", "--max-length", "5"},
      {"equiv", "quiver-a2", "3"},
      {"corpus", "list"},
      {"corpus", "run", "dual-numbers"},
      {"validate", data("bad-rational.json")}};
  for (const auto& c : cmds) {
    auto a = run(c), b = run(c);
    CHECK(a.out == b.out);
    CHECK(a.code == b.code);
  }
  setenv(kThreadsEnv, "1", 1);
  auto one = run({"surfcat-check", "--max-n", "6"});
  setenv(kThreadsEnv, "4", 1);
  auto four = run({"surfcat-check", "--max-n", "6"});
  unsetenv(kThreadsEnv);
  CHECK(one.out == four.out);
  CHECK(one.code == 0);
}

TEST_CASE("the installed binary honours the exit-code contract") {
  CHECK(run_binary("validate matrix-2") == 0);
  CHECK(run_binary("validate " + data("odd-unit.json")) == 1);
  CHECK(run_binary("validate " + data("bad-rational.json")) == 2);
  CHECK(run_binary("validate " + data("bad-reference.json")) == 2);
  CHECK(run_binary("--strict hh dual-numbers --degrees 0..7") == 1);
  CHECK(run_binary("--help") == 0);
  CHECK(run_binary("--no-such-flag") == 2);
}
