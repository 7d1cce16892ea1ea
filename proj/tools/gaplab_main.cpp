#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "gaplab/harness.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) {
    throw gaplab::IoError("cannot read config file: " + path);
  }
  std::ostringstream os;
  os << file.rdbuf();
  return os.str();
}

int run_check(const gaplab::RunConfig& config) {
  gaplab::RunReport report = gaplab::run(config);
  if (config.out.empty()) {
    std::cout << gaplab::emit_report(report, config.format) << "\n";
  } else {
    std::cout << "report written to " << config.out << "\n";
  }
  std::fprintf(stderr, "pass=%zu fail=%zu skipped=%zu wall_ms=%.1f\n",
               report.summary.pass, report.summary.fail,
               report.summary.skipped, report.wall_time_ms);
  return report.summary.fail > 0 ? 1 : 0;
}

int run_demo() {
  gaplab::ScenarioContext ctx = gaplab::make_context(gaplab::demo_scenario());
  std::printf("worked 2x2x2 example: gen_error_direct = %.12g\n\n", ctx.oracle);
  std::printf("%-5s %22s %22s %12s %12s  %s\n", "id", "lhs", "rhs", "abs_err",
              "rel_err", "status");
  const auto results = gaplab::evaluate_catalog(
      ctx, {ctx.scenario.lambda}, {ctx.scenario.beta},
      {gaplab::ReferenceChoice::Scenario});
  bool any_fail = false;
  for (const auto& r : results) {
    std::string status = gaplab::to_string(r.status);
    if (r.status == gaplab::IdentityStatus::Skipped) {
      status += " (" + r.detail + ")";
    }
    any_fail = any_fail || r.status == gaplab::IdentityStatus::Fail;
    std::printf("%-5s %22.15g %22.15g %12.3e %12.3e  %s\n",
                gaplab::to_string(r.id).c_str(), r.lhs, r.rhs, r.abs_err,
                r.rel_err, status.c_str());
  }
  return any_fail ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact generalization-error identities on finite spaces"};
  app.require_subcommand(1);

  auto* check = app.add_subcommand(
      "check", "Verify the identity catalog on generated scenarios");
  std::string config_path;
  std::uint64_t seed = 0;
  std::size_t num_scenarios = 0;
  double tol_rel = -1.0;
  double tol_abs = -1.0;
  std::string mode;
  std::string out;
  std::string format;
  check->add_option("--config", config_path, "JSON run configuration");
  auto* seed_opt = check->add_option("--seed", seed, "base scenario seed");
  auto* count_opt =
      check->add_option("--scenarios", num_scenarios, "number of scenarios");
  check->add_option("--tol-rel", tol_rel, "relative tolerance");
  check->add_option("--tol-abs", tol_abs, "absolute error floor");
  check->add_option("--mode", mode, "full_support|adversarial")
      ->check(CLI::IsMember({"full_support", "adversarial"}));
  check->add_option("--out", out, "report output path");
  check->add_option("--format", format, "json|csv")
      ->check(CLI::IsMember({"json", "csv"}));

  auto* demo = app.add_subcommand(
      "demo", "Run one worked 2x2x2 example and print the identity table");
  (void)demo;

  CLI11_PARSE(app, argc, argv);

  try {
    if (check->parsed()) {
      gaplab::RunConfig config;
      if (!config_path.empty()) {
        config = gaplab::config_from_json(read_file(config_path));
      }
      if (seed_opt->count() > 0) config.seed = seed;
      if (count_opt->count() > 0) config.num_scenarios = num_scenarios;
      if (tol_rel >= 0.0) config.tol.rel = tol_rel;
      if (tol_abs >= 0.0) config.tol.abs_floor = tol_abs;
      if (!mode.empty()) config.mode = gaplab::mode_from_string(mode);
      if (!out.empty()) config.out = out;
      if (!format.empty()) config.format = format;
      gaplab::apply_env_overrides(config);
      return run_check(config);
    }
    return run_demo();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
