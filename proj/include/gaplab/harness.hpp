#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gaplab/identities.hpp"

namespace gaplab {

// full_support draws every weight at 1e-3 or above before normalization so
// all mutual-absolute-continuity hypotheses hold; adversarial deliberately
// plants support violations to exercise the skip paths.
enum class GenerationMode { FullSupport, Adversarial };

std::string to_string(GenerationMode mode);
GenerationMode mode_from_string(const std::string& text);

struct DimRanges {
  std::size_t min_datapoints = 2;
  std::size_t max_datapoints = 4;
  std::size_t min_n = 1;
  std::size_t max_n = 3;
  std::size_t min_models = 2;
  std::size_t max_models = 5;

  bool operator==(const DimRanges& other) const = default;
};

// Ranges must be nonempty and the largest dims combination enumerable.
void validate(const DimRanges& dims);

struct RunConfig {
  std::uint64_t seed = 0;
  std::size_t num_scenarios = 100;
  DimRanges dims;
  std::vector<double> lambdas;  // empty: use each scenario's own lambda
  std::vector<double> betas;    // empty: use each scenario's own beta
  std::vector<ReferenceChoice> references = {ReferenceChoice::Scenario};
  Tolerances tol;
  GenerationMode mode = GenerationMode::FullSupport;
  std::string out;              // empty: report goes to stdout only
  std::string format = "json";  // json | csv

  bool operator==(const RunConfig& other) const;
};

RunConfig config_from_json(const std::string& text);

// Replaces the config seed with GAPLAB_SEED when the variable is set.
void apply_env_overrides(RunConfig& config);

// Deterministic scenario generation from a splitmix64 stream. The draw
// order is fixed: datapoint count, n, model count, loss entries (row-major),
// p_z weights, algorithm rows in dataset-index order, reference_q weights,
// reference_ps weights, lambda, beta, then the adversarial plants. Weights
// are 1e-3 + U[0,1) before normalization; losses are U[0,1); lambda and
// beta are U[0.5, 2).
Scenario generate_scenario(std::uint64_t seed, const DimRanges& dims,
                           GenerationMode mode);

struct ScenarioReport {
  std::uint64_t seed;
  std::size_t num_datapoints;
  std::size_t n;
  std::size_t num_models;
  std::vector<IdentityResult> results;
  std::vector<Triangle> triangles;
};

struct Summary {
  std::size_t pass = 0;
  std::size_t fail = 0;
  std::size_t skipped = 0;
};

struct RunReport {
  RunConfig config;
  std::vector<ScenarioReport> scenarios;
  Summary summary;
  double wall_time_ms = 0.0;
};

// Evaluates the full catalog on num_scenarios generated scenarios (seeds
// config.seed, config.seed+1, ...) and writes the report to config.out when
// set. The caller signals failure through the summary: fails mean a broken
// identity, skips do not.
RunReport run(const RunConfig& config);

// json: {config, scenarios:[{seed, dims, results, triangles}], summary,
// wall_time_ms}; csv: one row per result under the header
// "scenario,identity,lhs,rhs,abs_err,rel_err,status". Numbers carry 17
// significant digits. Identical configs yield identical bytes apart from
// the trailing wall_time_ms field.
std::string emit_report(const RunReport& report, const std::string& format);

// Scenario fixtures: explicit tables (loss row-major by datapoint, weight
// arrays, kernel as array of rows) so an instance can be pinned in tests.
std::string scenario_to_json(const Scenario& scenario);
Scenario scenario_from_json(const std::string& text);

// The fixed worked example behind the `demo` subcommand.
Scenario demo_scenario();

}  // namespace gaplab
