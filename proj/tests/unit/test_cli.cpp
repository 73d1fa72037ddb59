#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <sys/wait.h>

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::current_path() / "cli_work";

int run(const std::string& args) {
  const std::string cmd = std::string(CONFBEND_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string write_config(const std::string& name, const json& j) {
  fs::create_directories(kWork);
  const fs::path p = kWork / name;
  std::ofstream(p) << j.dump(2);
  return p.string();
}

json read_report(const fs::path& dir) {
  std::ifstream in(dir / "report.json");
  return json::parse(in);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

json manufactured_job() {
  return {{"grid", {{"sizes", {10, 10, 10}}}},
          {"params", {{"k", 2}, {"alpha", -1}, {"tau", 0.0}}},
          {"A",
           {{"kind", "entries"},
            {"entries",
             {"2 + 0.5*sin(x0)*cos(x1)", "0.3*sin(x0 + x1)", "0.2*cos(x0)", "2 + 0.5*sin(x1)*cos(x2)",
              "0.3*sin(x1 + x2)", "2 + 0.5*sin(x2)*cos(x0)"}}}},
          {"psi", {{"kind", "manufactured"}, {"u_star", "0.15*sin(x0)*cos(x1) + 0.1*cos(x2)"}}},
          {"seed_cfg", {{"r0", 1.5}}}};
}

}  // namespace

TEST_CASE("cones reports kappa and a certificate") {
  const fs::path out = kWork / "cones";
  fs::remove_all(out);
  REQUIRE(run("cones --n 3 --k 2 --out " + out.string()) == 0);
  const json r = read_report(out);
  CHECK(r["status"] == "ok");
  CHECK(r["results"]["cone"]["kappa"] == 1);
  CHECK(r["results"]["cone"]["certificate"].size() == 3);
  CHECK(r["inputs"]["params"]["k"] == 2);
  CHECK(r.contains("version"));
  CHECK(r["timings"].contains("total"));
}

TEST_CASE("schema errors exit 2 and write nothing") {
  const fs::path out = kWork / "schema";
  fs::remove_all(out);
  fs::create_directories(kWork);
  std::ofstream(kWork / "broken.json") << "{ \"grid\": ";
  CHECK(run("solve --config " + (kWork / "broken.json").string() + " --out " + out.string()) == 2);
  CHECK(run("solve --config " + write_config("unknown.json", {{"gird", 1}}) + " --out " + out.string()) == 2);
  CHECK(run("seed --config " + write_config("nested.json", {{"seed_cfg", {{"radius", 2.0}}}}) + " --out " +
            out.string()) == 2);
  CHECK(run("solve --config " + write_config("type.json", {{"params", {{"k", "two"}}}}) + " --out " + out.string()) ==
        2);
  CHECK(run("verify no-such-suite --out " + out.string()) == 2);
  CHECK(run("solve --grid 16,x,16 --out " + out.string()) == 2);
  CHECK(run("frobnicate") == 2);
  CHECK(run("") == 2);
  CHECK_FALSE(fs::exists(out));
}

TEST_CASE("verify suites exit 0 when they pass") {
  CHECK(run("verify theorem21 --samples 500") == 0);
  CHECK(run("verify lemma23 --sweep") == 0);
  CHECK(run("verify linearization --samples 3") == 0);
}

TEST_CASE("check violations exit 4 with a witness") {
  const fs::path out = kWork / "violation";
  fs::remove_all(out);
  // The flat torus has A = 0, which is never strictly admissible around p0.
  CHECK(run("seed --grid 12,12,12 --out " + out.string()) == 4);
  const json r = read_report(out);
  CHECK(r["status"] == "check_violation");
  CHECK(r.contains("witness"));
  CHECK_FALSE(fs::exists(out / "seed.nfld"));

  const fs::path out2 = kWork / "gates";
  CHECK(run("solve --config " + write_config("gates.json", {{"params", {{"alpha", 1}, {"tau", 0.5}}}}) + " --out " +
            out2.string()) == 4);
  CHECK(read_report(out2)["witness"].is_array());
}

TEST_CASE("numeric failures exit 3 with diagnostics") {
  json job = manufactured_job();
  job["solver"] = {{"max_newton", 1}, {"homotopy_steps", 1}, {"min_step", 0.5}};
  const fs::path out = kWork / "numeric";
  fs::remove_all(out);
  CHECK(run("solve --config " + write_config("numeric.json", job) + " --out " + out.string()) == 3);
  const json r = read_report(out);
  CHECK(r["status"] == "numeric_failure");
  CHECK(r["diagnostics"]["homotopy"].size() >= 2);
}

TEST_CASE("solve writes fields and traces, and the echoed inputs reproduce the run") {
  const fs::path a = kWork / "solve_a", b = kWork / "solve_b";
  fs::remove_all(a);
  fs::remove_all(b);
  REQUIRE(run("solve --config " + write_config("solve.json", manufactured_job()) + " --out " + a.string()) == 0);
  const json ra = read_report(a);
  CHECK(ra["results"]["solve"]["converged"] == true);
  CHECK(ra["results"]["solve"]["final_residual"].get<double>() <= 1e-9);
  CHECK(ra["results"]["manufactured_error"].get<double>() < 1e-2);
  CHECK(fs::exists(a / "solution.nfld"));
  CHECK(fs::exists(a / "trace.csv"));

  json echoed = ra["inputs"];
  echoed.erase("paths");
  REQUIRE(run("solve --config " + write_config("echo.json", echoed) + " --out " + b.string()) == 0);
  const json rb = read_report(b);
  CHECK(rb["results"] == ra["results"]);
  CHECK(slurp(a / "solution.nfld") == slurp(b / "solution.nfld"));
  CHECK(slurp(a / "trace.csv") == slurp(b / "trace.csv"));
}

TEST_CASE("background and curvature outputs") {
  const fs::path out = kWork / "curv";
  fs::remove_all(out);
  const std::string cfg = write_config("warped.json", {{"background", {{"kind", "warped"}, {"K", 1.0}}}});
  REQUIRE(run("curvature --config " + cfg + " --grid 12,12,12 --out " + out.string()) == 0);
  for (const char* f : {"metric.nfld", "ricci.nfld", "scalar.nfld", "schouten.nfld", "report.json"})
    CHECK(fs::exists(out / f));
  CHECK(read_report(out)["results"]["curvature"]["points"] == 1728);

  const fs::path bg = kWork / "background";
  REQUIRE(run("background --config " + cfg + " --grid 12,12,12 --out " + bg.string()) == 0);
  CHECK(read_report(bg)["results"]["classification"].contains("class"));

  const fs::path search = kWork / "search";
  const std::string scfg =
      write_config("search.json", {{"params", {{"k", 3}}},
                                   {"background", {{"kind", "warped"}, {"search", {{"K_count", 3}}}}}});
  CHECK(run("background --config " + scfg + " --grid 12,12,12 --out " + search.string()) == 4);
  CHECK(read_report(search)["witness"]["scan"].size() == 3);
}
