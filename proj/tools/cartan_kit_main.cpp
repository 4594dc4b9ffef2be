// Command-line front end: run a verification scenario or the obstruction
// analysis and emit a machine-readable report. The report depends only on
// the configuration (scenario, samples, seed, tolerances, fault), so two
// runs with the same arguments produce byte-identical files; wall-clock
// timing goes to stderr only.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cartankit/scenario.hpp"

namespace {

using json = nlohmann::ordered_json;

json checks_to_json(const cartankit::CheckReport& report) {
  json arr = json::array();
  for (const auto& r : report.records) {
    json rec;
    rec["name"] = r.name;
    rec["reference"] = r.reference;
    rec["max_residual"] = r.max_residual;
    rec["threshold"] = r.threshold;
    rec["samples"] = r.samples;
    rec["pass"] = r.pass;
    arr.push_back(std::move(rec));
  }
  return arr;
}

json result_to_json(const cartankit::scenario::RunResult& result,
                    const cartankit::scenario::ScenarioConfig& cfg,
                    const std::string& profile,
                    const std::vector<std::string>& overrides) {
  json doc;
  doc["artifact"] = "cartan-kit report";
  doc["format_version"] = 1;
  doc["command"] = result.command;
  doc["scenario"] = result.scenario;
  doc["samples"] = cfg.samples;
  doc["seed"] = cfg.seed;
  doc["tolerance_profile"] = profile.empty() ? "default" : profile;
  json ov = json::object();
  for (const auto& o : overrides) {
    const std::string name = o.substr(0, o.find('='));
    ov[name] = cfg.tol.get(name);
  }
  doc["tolerance_overrides"] = std::move(ov);
  doc["fault"] = cfg.fault.empty() ? json(nullptr) : json(cfg.fault);
  if (result.command == "obstruction") {
    doc["euler_numbers"] = {{"tangent_bundle", result.tangent_euler},
                            {"trivial_plane_bundle", result.trivial_euler}};
    doc["verdict"] = result.verdict;
  }
  doc["checks"] = checks_to_json(result.report);
  if (result.rejected) {
    doc["rejected"] = {{"stage", result.stage},
                       {"reference", result.reference},
                       {"residual", result.residual}};
  } else {
    doc["rejected"] = nullptr;
  }
  doc["overall_pass"] = result.overall_pass();
  return doc;
}

int emit(const json& doc, const std::string& out_path) {
  const std::string text = doc.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
    return 0;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    std::cerr << "config error: cannot open output file: " << out_path << "\n";
    return 2;
  }
  out << text;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "cartan-kit: seeded pointwise verification of principal bundles, "
      "connections, canonical forms, and model connections on sample "
      "manifolds"};
  app.require_subcommand(1);

  cartankit::scenario::ScenarioConfig cfg;
  cfg.scenario.clear();
  std::string out_path;
  std::vector<std::string> tol_overrides;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--samples", cfg.samples,
                    "sample points drawn per check (default 200)");
    sub->add_option("--seed", cfg.seed, "seed for the sample stream");
    sub->add_option("--tol", tol_overrides,
                    "tolerance override as name=value (repeatable)");
    sub->add_option("--out", out_path,
                    "write the JSON report to this file instead of stdout");
  };

  auto* verify = app.add_subcommand(
      "verify", "run every defining check of one scenario");
  verify->add_option("--scenario", cfg.scenario,
                     "scenario id (see list-scenarios)")
      ->required();
  add_common(verify);
  verify->add_option(
      "--inject-fault", cfg.fault,
      "replace one ingredient by a deliberately broken one "
      "(non-equivariant-iso | non-positive-metric | broken-cocycle)");

  auto* obstruction = app.add_subcommand(
      "obstruction",
      "compare Euler numbers to show the trivial circle bundle over the "
      "sphere admits no canonical form");
  obstruction->add_option("--scenario", cfg.scenario,
                          "scenario id (default trivial-so2-sphere)");
  add_common(obstruction);

  auto* list =
      app.add_subcommand("list-scenarios", "print runnable scenario ids");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const char* env_profile = std::getenv("CARTANKIT_TOL_PROFILE");
    const std::string profile = env_profile ? env_profile : "";
    cfg.tol = cartankit::Tolerances::profile(profile);
    for (const auto& o : tol_overrides) cfg.tol.set_from_string(o);

    if (list->parsed()) {
      for (const auto& s : cartankit::scenario::scenarios())
        std::cout << s.id << ": " << s.description << "\n";
      return 0;
    }

    const auto t0 = std::chrono::steady_clock::now();
    cartankit::scenario::RunResult result;
    if (verify->parsed()) {
      result = cartankit::scenario::run_verify(cfg);
    } else {
      if (cfg.scenario.empty()) cfg.scenario = "trivial-so2-sphere";
      result = cartankit::scenario::run_obstruction(cfg);
    }
    const double ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0)
                          .count();

    const json doc = result_to_json(result, cfg, profile, tol_overrides);
    const int rc = emit(doc, out_path);
    if (rc != 0) return rc;

    std::cerr << result.command << " " << result.scenario << ": "
              << (result.overall_pass() ? "pass" : "fail") << " ("
              << result.report.records.size() << " checks, " << ms << " ms)\n";
    if (result.rejected)
      std::cerr << "rejected at stage '" << result.stage
                << "': " << result.reference << " (residual "
                << result.residual << ")\n";
    return result.overall_pass() ? 0 : 1;
  } catch (const cartankit::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::out_of_range& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
}
