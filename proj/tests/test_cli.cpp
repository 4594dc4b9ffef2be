// End-to-end tests of the command-line tool, run as a subprocess. The
// expected stage names, reference strings, and scenario ids are frozen
// here as literals: they are part of the tool's output contract, so a
// change in the library that alters them must show up as a test failure.

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

using nlohmann::json;

struct CliResult {
  int exit_code = -1;
  std::string out;
};

// CARTAN_KIT_BIN is injected by the build as the path to the built tool.
CliResult run_cli(const std::string& args, const std::string& env = "") {
  std::string cmd = env.empty() ? "" : "env " + env + " ";
  cmd += std::string(CARTAN_KIT_BIN) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CliResult r;
  char buf[4096];
  size_t n = 0;
  while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path temp_report(const std::string& tag) {
  return std::filesystem::temp_directory_path() /
         ("cartan_kit_test_" + tag + "_" + std::to_string(::getpid()) +
          ".json");
}

}  // namespace

TEST_CASE("list-scenarios names every runnable scenario") {
  CliResult r = run_cli("list-scenarios");
  CHECK(r.exit_code == 0);
  for (const std::string id : {"torus-frame", "sphere-frame",
                               "sphere-homogeneous", "trivial-so2-sphere"}) {
    INFO(id);
    CHECK(r.out.find(id + ":") != std::string::npos);
  }
}

TEST_CASE("verify emits a well-formed passing report") {
  CliResult r = run_cli("verify --scenario torus-frame --samples 40 --seed 3");
  REQUIRE(r.exit_code == 0);
  json doc = json::parse(r.out);
  CHECK(doc["artifact"] == "cartan-kit report");
  CHECK(doc["command"] == "verify");
  CHECK(doc["scenario"] == "torus-frame");
  CHECK(doc["samples"] == 40);
  CHECK(doc["seed"] == 3);
  CHECK(doc["fault"].is_null());
  CHECK(doc["rejected"].is_null());
  CHECK(doc["overall_pass"] == true);
  REQUIRE(doc["checks"].is_array());
  REQUIRE(doc["checks"].size() > 20);
  for (const auto& rec : doc["checks"]) {
    INFO(rec["name"].get<std::string>());
    CHECK(rec["pass"] == true);
    CHECK(rec["max_residual"].get<double>() <= rec["threshold"].get<double>());
    CHECK(rec["samples"].get<int>() > 0);
    CHECK_FALSE(rec["reference"].get<std::string>().empty());
  }
}

TEST_CASE("reports are byte-identical across runs with the same config") {
  auto p1 = temp_report("det1"), p2 = temp_report("det2"),
       p3 = temp_report("det3");
  const std::string base =
      "verify --scenario sphere-frame --samples 25 --seed 11 --out ";
  REQUIRE(run_cli(base + p1.string()).exit_code == 0);
  REQUIRE(run_cli(base + p2.string()).exit_code == 0);
  const std::string one = slurp(p1), two = slurp(p2);
  REQUIRE_FALSE(one.empty());
  CHECK(one == two);
  // a different seed must actually change the sampled residuals
  REQUIRE(run_cli("verify --scenario sphere-frame --samples 25 --seed 12 --out " +
                  p3.string())
              .exit_code == 0);
  CHECK(slurp(p3) != one);
  std::filesystem::remove(p1);
  std::filesystem::remove(p2);
  std::filesystem::remove(p3);
}

TEST_CASE("each injected fault is rejected at its own stage") {
  struct Expected {
    std::string fault;
    std::string stage;
    std::string reference;
  };
  const Expected table[] = {
      {"non-equivariant-iso", "witness-to-soldering",
       "pseudotensorial equivariance: (R_h^* phi) = rho(h^-1) phi"},
      {"non-positive-metric", "metric-verification",
       "metric tensor is positive definite"},
      {"broken-cocycle", "bundle-verification",
       "transition cocycle: g_ii = e and g_ij g_jk = g_ik on overlaps"},
  };
  for (const auto& expected : table) {
    INFO(expected.fault);
    CliResult r = run_cli(
        "verify --scenario sphere-frame --samples 30 --inject-fault " +
        expected.fault);
    CHECK(r.exit_code == 1);
    json doc = json::parse(r.out);
    CHECK(doc["fault"] == expected.fault);
    CHECK(doc["overall_pass"] == false);
    REQUIRE(doc["rejected"].is_object());
    CHECK(doc["rejected"]["stage"] == expected.stage);
    CHECK(doc["rejected"]["reference"] == expected.reference);
    CHECK(doc["rejected"]["residual"].get<double>() > 1e-3);
    // the report retains every record gathered up to the rejection
    bool found_failing = false;
    for (const auto& rec : doc["checks"])
      if (rec["pass"] == false) found_failing = true;
    CHECK(found_failing);
  }
  // the cocycle fault also applies to the non-frame scenarios
  CliResult r = run_cli(
      "verify --scenario trivial-so2-sphere --samples 20 "
      "--inject-fault broken-cocycle");
  CHECK(r.exit_code == 1);
  json doc = json::parse(r.out);
  CHECK(doc["rejected"]["stage"] == "bundle-verification");
}

TEST_CASE("malformed configuration exits with code 2 before computing") {
  for (const std::string args : {
           "verify --scenario no-such-scenario",
           "verify --scenario torus-frame --samples 0",
           "verify --scenario torus-frame --inject-fault no-such-fault",
           "verify --scenario sphere-homogeneous --inject-fault "
           "non-positive-metric",
           "verify --scenario torus-frame --tol no_such_tol=1",
           "verify --scenario torus-frame --tol curvature",
           "verify",
           "obstruction --scenario torus-frame",
           "no-such-subcommand",
       }) {
    INFO(args);
    CliResult r = run_cli(args);
    CHECK(r.exit_code == 2);
    CHECK(r.out.find("overall_pass") == std::string::npos);
  }
  CliResult r = run_cli("verify --scenario torus-frame --samples 10", "CARTANKIT_TOL_PROFILE=bogus");
  CHECK(r.exit_code == 2);
}

TEST_CASE("failed checks exit with code 1 and a failing record") {
  // an unreachable threshold on a finite-difference check fails honestly
  CliResult r = run_cli(
      "verify --scenario torus-frame --samples 20 --tol pseudotensorial=1e-18");
  CHECK(r.exit_code == 1);
  json doc = json::parse(r.out);
  CHECK(doc["overall_pass"] == false);
  CHECK(doc["tolerance_overrides"]["pseudotensorial"].get<double>() == 1e-18);
}

TEST_CASE("tolerance overrides and profiles land in the report") {
  CliResult r = run_cli(
      "verify --scenario torus-frame --samples 20 --tol curvature=2e-5");
  REQUIRE(r.exit_code == 0);
  json doc = json::parse(r.out);
  CHECK(doc["tolerance_overrides"]["curvature"].get<double>() == 2e-5);
  bool saw_threshold = false;
  for (const auto& rec : doc["checks"])
    if (rec["threshold"].get<double>() == 2e-5) saw_threshold = true;
  CHECK(saw_threshold);

  CliResult strict = run_cli("verify --scenario torus-frame --samples 30",
                             "CARTANKIT_TOL_PROFILE=strict");
  REQUIRE(strict.exit_code == 0);
  json sdoc = json::parse(strict.out);
  CHECK(sdoc["tolerance_profile"] == "strict");
  CHECK(sdoc["overall_pass"] == true);
}

TEST_CASE("obstruction reports the two Euler numbers and the verdict") {
  CliResult r = run_cli("obstruction");
  REQUIRE(r.exit_code == 0);
  json doc = json::parse(r.out);
  CHECK(doc["command"] == "obstruction");
  CHECK(doc["scenario"] == "trivial-so2-sphere");
  const double tangent = doc["euler_numbers"]["tangent_bundle"].get<double>();
  const double trivial =
      doc["euler_numbers"]["trivial_plane_bundle"].get<double>();
  CHECK(std::abs(tangent - 2.0) < 1e-3);
  CHECK(std::abs(trivial) < 1e-6);
  CHECK(doc["verdict"] ==
        "soldering condition unsatisfiable: Euler numbers differ "
        "(TM: 2, associated plane bundle: 0)");
  CHECK(doc["overall_pass"] == true);
  for (const auto& rec : doc["checks"]) CHECK(rec["pass"] == true);

  // byte determinism holds for obstruction reports as well
  auto p1 = temp_report("obs1"), p2 = temp_report("obs2");
  REQUIRE(run_cli("obstruction --out " + p1.string()).exit_code == 0);
  REQUIRE(run_cli("obstruction --out " + p2.string()).exit_code == 0);
  CHECK(slurp(p1) == slurp(p2));
  std::filesystem::remove(p1);
  std::filesystem::remove(p2);
}

TEST_CASE("every verify scenario passes end to end") {
  for (const std::string id : {"torus-frame", "sphere-frame",
                               "sphere-homogeneous", "trivial-so2-sphere"}) {
    INFO(id);
    CliResult r = run_cli("verify --scenario " + id + " --samples 60");
    CHECK(r.exit_code == 0);
    json doc = json::parse(r.out);
    CHECK(doc["overall_pass"] == true);
  }
}
