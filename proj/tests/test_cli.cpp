#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cstdio>
#include <string>
#include <sys/wait.h>

#include "json.hpp"

using Json = nlohmann::json;
using doctest::Contains;

namespace {

struct RunResult {
  int code = -1;
  std::string out;
};

// runs the installed binary; stderr is folded in only when asked for
RunResult run(const std::string& args, bool keep_stderr = false) {
  std::string cmd = std::string(CNP_CLI_PATH) + " " + args +
                    (keep_stderr ? " 2>&1" : " 2>/dev/null");
  FILE* p = popen(cmd.c_str(), "r");
  RunResult r;
  if (!p) return r;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  int st = pclose(p);
  if (WIFEXITED(st)) r.code = WEXITSTATUS(st);
  return r;
}

std::string data(const std::string& f) {
  return std::string(CNP_DATA_DIR) + "/" + f;
}

}  // namespace

TEST_CASE("order queries") {
  RunResult r = run("qlo lub --monoid n2 --x \"(1,0)\" --y \"(0,1)\"");
  CHECK(r.code == 0);
  CHECK(Json::parse(r.out) == Json{{"lub", "(1,1)"}});

  r = run("qlo lub --monoid " + data("path_raag.json") + " --x a --y c");
  CHECK(r.code == 0);
  CHECK(Json::parse(r.out)["lub"] == "infinity");

  r = run("qlo divides --monoid n2 --x \"(1,0)\" --y \"(1,1)\"");
  CHECK(r.code == 0);
  Json j = Json::parse(r.out);
  CHECK(j["divides"] == true);
  CHECK(j["quotient"] == "(0,1)");

  r = run("qlo interval --monoid n2 --x \"(1,1)\"");
  CHECK(r.code == 0);
  CHECK(Json::parse(r.out)["interval"] ==
        Json::array({"(0,1)", "(1,0)", "(1,1)"}));

  // the interval below a positive-first-coordinate element is infinite
  r = run("qlo interval --monoid lex --x \"(1,0)\"", true);
  CHECK(r.code == 3);
  CHECK(r.out.find("hypothesis violated") != std::string::npos);

  r = run("qlo foundation --monoid " + data("free2.json") + " --set a,b");
  CHECK(r.code == 0);
  j = Json::parse(r.out);
  CHECK(j["foundation"] == true);
  CHECK(j["exact"] == true);

  r = run("qlo foundation --monoid " + data("free2.json") + " --set a");
  CHECK(r.code == 1);
  j = Json::parse(r.out);
  CHECK(j["foundation"] == false);
  CHECK(j["counterexample"] == "b");

  r = run("qlo components --monoid " + data("path_raag.json"));
  CHECK(r.code == 0);
  CHECK(Json::parse(r.out)["components"] ==
        Json::array({Json::array({"a", "c"}), Json::array({"b"})}));
}

TEST_CASE("graph queries") {
  RunResult r = run("kgraph mce " + data("square.json") + " --mu e --nu f");
  CHECK(r.code == 0);
  CHECK(r.out == "[\"ef\"]\n");

  r = run("kgraph paths " + data("twist.json") + " --degree \"(1,1)\"");
  CHECK(r.code == 0);
  Json got = Json::parse(r.out);
  CHECK(got.size() == 2);
  CHECK(std::find(got.begin(), got.end(), Json("e1f")) != got.end());
  CHECK(std::find(got.begin(), got.end(), Json("e2f")) != got.end());

  r = run("kgraph exhaustive " + data("square.json") + " --vertex v --set e");
  CHECK(r.code == 0);
  CHECK(Json::parse(r.out)["exhaustive"] == true);

  r = run("kgraph exhaustive " + data("square.json") + " --vertex v");
  CHECK(r.code == 0);
  Json sets = Json::parse(r.out)["minimal_exhaustive_sets"];
  CHECK(std::find(sets.begin(), sets.end(), Json::array({"e"})) != sets.end());

  r = run("kgraph ck " + data("square.json") + " --family " +
          data("ck_square.json") + " --ck4");
  CHECK(r.code == 0);
  CHECK(Json::parse(r.out)["pass"] == true);

  r = run("kgraph ck " + data("square.json") + " --family " +
          data("ck_square_bad.json"));
  CHECK(r.code == 1);
  Json bad = Json::parse(r.out);
  CHECK(bad["pass"] == false);
  CHECK(!bad["violations"].empty());
}

TEST_CASE("system and representation checks") {
  RunResult r = run("psys info --system " + data("grid_system.json"));
  CHECK(r.code == 0);
  Json j = Json::parse(r.out);
  CHECK(j["name"] == "flip");
  CHECK(j["fibres"]["(1,1)"] == 1);

  r = run("psys injectivity --system " + data("lex_system.json") +
          " --horizon 2");
  CHECK(r.code == 1);  // the collapsing fibre is inside the window
  j = Json::parse(r.out);
  CHECK(j["all_injective"] == false);
  CHECK(j["phi_tilde_injective"]["(1,0)"]["kernel_vertex"] == "v2");

  r = run("rep check --system " + data("grid_system.json") + " --rep " +
          data("rep_grid.json") + " --axioms T,N,CP,F --horizon 4");
  CHECK(r.code == 0);
  j = Json::parse(r.out);
  CHECK(j["all_passed"] == true);
  for (const char* key : {"T1", "T2", "T3", "N", "CP", "Fowler"})
    CHECK(j["axioms"][key]["status"] == "pass");

  // Katsura covariance needs a tensor-power system
  r = run("rep check --system " + data("grid_system.json") + " --rep " +
              data("rep_grid.json") + " --axioms K",
          true);
  CHECK(r.code == 3);
  CHECK(r.out.find("tensor power") != std::string::npos);

  r = run("rep check --system " + data("grid_system.json") + " --rep " +
          data("rep_grid.json") + " --format text");
  CHECK(r.code == 0);
  CHECK(r.out.find("T1: pass") != std::string::npos);
}

TEST_CASE("boundary queries") {
  RunResult r = run("boundary defect --raag " + data("free2.json") +
                    " --foundation a --s bb");
  CHECK(r.code == 0);
  CHECK(Json::parse(r.out)["defect"] == 1);

  r = run("boundary defect --raag " + data("free2.json") +
          " --foundation a --s ab");
  CHECK(r.code == 0);
  CHECK(Json::parse(r.out)["defect"] == 0);

  r = run("boundary defect --raag " + data("path_raag.json") +
          " --foundation a,b --s abab");
  CHECK(r.code == 0);
  CHECK(Json::parse(r.out)["defect"] == 0);

  r = run("boundary check --family " + data("boundary_family.json"));
  CHECK(r.code == 0);
  Json j = Json::parse(r.out);
  for (const char* key : {"R1", "R2", "R3", "R4"})
    CHECK(j["axioms"][key]["status"] == "pass");

  r = run("boundary check --family " + data("boundary_family.json") +
          " --relations 1,3");
  CHECK(r.code == 0);
  j = Json::parse(r.out);
  CHECK(j["axioms"].size() == 2);
  CHECK(j["axioms"].contains("R1"));
  CHECK(j["axioms"].contains("R3"));

  r = run("boundary check --family " + data("boundary_trunc.json"));
  CHECK(r.code == 0);
  j = Json::parse(r.out);
  CHECK(j["axioms"]["R4"]["status"] == "pass");
  CHECK(j["axioms"]["R4"]["detail"].get<std::string>().find("not asserted") !=
        std::string::npos);
}

TEST_CASE("scenarios") {
  RunResult r = run("scenario counterexample");
  CHECK(r.code == 0);
  CHECK(r.out.find("\"phi_tilde_injective\": false") != std::string::npos);
  Json j = Json::parse(r.out);
  CHECK(j["pass"] == true);
  CHECK(j["checks"]["q"] == "(1,0)");
  CHECK(j["checks"]["kernel_vertex"] == "v2");
  CHECK(j["checks"]["collapse_family"]["witness_r"] == "(1,0)");

  r = run("scenario kgraph --file " + data("square.json"));
  CHECK(r.code == 0);
  j = Json::parse(r.out);
  CHECK(j["pass"] == true);
  CHECK(j["checks"]["ck_defects"]["v"]["exact"] == true);

  r = run("scenario raag --file " + data("path_raag.json"));
  CHECK(r.code == 0);
  j = Json::parse(r.out);
  CHECK(j["pass"] == true);
  CHECK(j["checks"]["components"].size() == 2);
  CHECK(j["checks"]["components"][0]["foundation"] == true);

  r = run("scenario tensor_power --file " + data("loop_module.json"));
  CHECK(r.code == 0);
  j = Json::parse(r.out);
  CHECK(j["pass"] == true);
  CHECK(j["checks"]["kernel"] == Json::array({"w"}));
  CHECK(j["checks"]["ideal"] == Json::array({"v"}));

  r = run("scenario trivial --monoid n2");
  CHECK(r.code == 0);
  j = Json::parse(r.out);
  CHECK(j["pass"] == true);
  CHECK(j["checks"]["zero_family_defect"] == "vanishes-for-large-s");
  CHECK(j["checks"]["exact"] == true);
}

TEST_CASE("identical inputs produce identical bytes") {
  RunResult a = run("scenario raag --file " + data("path_raag.json"));
  RunResult b = run("scenario raag --file " + data("path_raag.json"));
  CHECK(a.out == b.out);

  a = run("rep check --system " + data("grid_system.json") + " --rep " +
          data("rep_grid.json") + " --axioms T,N,CP,F");
  b = run("rep check --system " + data("grid_system.json") + " --rep " +
          data("rep_grid.json") + " --axioms T,N,CP,F");
  CHECK(a.out == b.out);
}

TEST_CASE("malformed input exits 2 and names the location") {
  RunResult r = run("kgraph mce /nonexistent/g.json --mu e --nu f", true);
  CHECK(r.code == 2);
  CHECK(r.out.find("/nonexistent/g.json") != std::string::npos);
  CHECK(r.out.find("cannot open") != std::string::npos);

  std::string broken = data("..") + "/build/broken_test_input.json";
  {
    FILE* f = fopen(broken.c_str(), "w");
    REQUIRE(f);
    fputs("{ \"k\": 2, ", f);
    fclose(f);
  }
  r = run("kgraph mce " + broken + " --mu e --nu f", true);
  CHECK(r.code == 2);
  CHECK(r.out.find("byte") != std::string::npos);
  std::remove(broken.c_str());

  r = run("qlo lub --monoid n2 --x \"(1,0\" --y \"(0,1)\"", true);
  CHECK(r.code == 2);

  // missing required flags are also malformed invocations
  r = run("qlo lub --monoid n2", true);
  CHECK(r.code == 2);
}
