#include "gaplab/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gaplab/rng.hpp"

namespace gaplab {

std::string to_string(GenerationMode mode) {
  return mode == GenerationMode::FullSupport ? "full_support" : "adversarial";
}

GenerationMode mode_from_string(const std::string& text) {
  if (text == "full_support") return GenerationMode::FullSupport;
  if (text == "adversarial") return GenerationMode::Adversarial;
  throw InvalidParameter("unknown generation mode: " + text);
}

bool RunConfig::operator==(const RunConfig& other) const {
  return seed == other.seed && num_scenarios == other.num_scenarios &&
         dims == other.dims && lambdas == other.lambdas &&
         betas == other.betas && references == other.references &&
         tol.rel == other.tol.rel && tol.abs_floor == other.tol.abs_floor &&
         mode == other.mode && out == other.out && format == other.format;
}

namespace {

ReferenceChoice reference_from_string(const std::string& text) {
  if (text == "scenario") return ReferenceChoice::Scenario;
  if (text == "uniform") return ReferenceChoice::Uniform;
  if (text == "counting") return ReferenceChoice::Counting;
  throw InvalidParameter("unknown reference choice: " + text);
}

}  // namespace

RunConfig config_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError(std::string("config parse error: ") + e.what());
  }
  RunConfig config;
  if (j.contains("seed")) config.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("num_scenarios")) {
    config.num_scenarios = j["num_scenarios"].get<std::size_t>();
  }
  if (j.contains("dims")) {
    const auto& d = j["dims"];
    if (d.contains("datapoints")) {
      config.dims.min_datapoints = d["datapoints"][0].get<std::size_t>();
      config.dims.max_datapoints = d["datapoints"][1].get<std::size_t>();
    }
    if (d.contains("n")) {
      config.dims.min_n = d["n"][0].get<std::size_t>();
      config.dims.max_n = d["n"][1].get<std::size_t>();
    }
    if (d.contains("models")) {
      config.dims.min_models = d["models"][0].get<std::size_t>();
      config.dims.max_models = d["models"][1].get<std::size_t>();
    }
  }
  if (j.contains("lambdas")) config.lambdas = j["lambdas"].get<std::vector<double>>();
  if (j.contains("betas")) config.betas = j["betas"].get<std::vector<double>>();
  if (j.contains("references")) {
    config.references.clear();
    for (const auto& r : j["references"]) {
      config.references.push_back(reference_from_string(r.get<std::string>()));
    }
  }
  if (j.contains("tol_rel")) config.tol.rel = j["tol_rel"].get<double>();
  if (j.contains("tol_abs")) config.tol.abs_floor = j["tol_abs"].get<double>();
  if (j.contains("mode")) config.mode = mode_from_string(j["mode"].get<std::string>());
  if (j.contains("out")) config.out = j["out"].get<std::string>();
  if (j.contains("format")) config.format = j["format"].get<std::string>();
  if (config.format != "json" && config.format != "csv") {
    throw InvalidParameter("config: format must be json or csv");
  }
  validate(config.dims);
  return config;
}

void validate(const DimRanges& dims) {
  if (dims.min_datapoints > dims.max_datapoints || dims.min_n > dims.max_n ||
      dims.min_models > dims.max_models) {
    throw InvalidParameter("dims: empty dimension range");
  }
  if (dims.min_datapoints < 1 || dims.min_n < 1 || dims.min_models < 1) {
    throw InvalidParameter("dims: dimensions must be positive");
  }
  // largest combination must stay enumerable
  DatasetSpace(dims.max_datapoints, dims.max_n);
}

void apply_env_overrides(RunConfig& config) {
  if (const char* env = std::getenv("GAPLAB_SEED")) {
    config.seed = std::strtoull(env, nullptr, 10);
  }
}

namespace {

std::vector<double> draw_weights(SplitMix64& rng, std::size_t count) {
  std::vector<double> w(count);
  for (double& x : w) {
    x = 1e-3 + rng.next_unit();
  }
  return w;
}

std::size_t draw_in_range(SplitMix64& rng, std::size_t lo, std::size_t hi) {
  if (lo > hi) {
    throw InvalidParameter("generate_scenario: empty dimension range");
  }
  return lo + rng.next_below(hi - lo + 1);
}

// Removes one atom and renormalizes; used by the adversarial plants.
FiniteMeasure drop_atom(const FiniteMeasure& p, std::size_t atom) {
  std::vector<double> w(p.space_size());
  for (std::size_t i = 0; i < p.space_size(); ++i) {
    w[i] = i == atom ? 0.0 : p.mass(i);
  }
  return FiniteMeasure::from_weights(p.space_id(), w);
}

}  // namespace

Scenario generate_scenario(std::uint64_t seed, const DimRanges& dims,
                           GenerationMode mode) {
  validate(dims);
  SplitMix64 rng(seed);
  const std::size_t k = draw_in_range(rng, dims.min_datapoints, dims.max_datapoints);
  const std::size_t n = draw_in_range(rng, dims.min_n, dims.max_n);
  const std::size_t m = draw_in_range(rng, dims.min_models, dims.max_models);
  const DatasetSpace space(k, n);

  std::vector<double> loss_values(k * m);
  for (double& v : loss_values) {
    v = rng.next_unit();
  }
  LossTable loss(k, m, std::move(loss_values));

  FiniteMeasure p_z =
      FiniteMeasure::from_weights(kDatapointSpaceId, draw_weights(rng, k));

  std::map<std::size_t, FiniteMeasure> rows;
  for (std::size_t z = 0; z < space.size(); ++z) {
    rows.emplace(z, FiniteMeasure::from_weights(kModelSpaceId,
                                                draw_weights(rng, m)));
  }

  FiniteMeasure reference_q =
      FiniteMeasure::from_weights(kModelSpaceId, draw_weights(rng, m));
  FiniteMeasure reference_ps =
      FiniteMeasure::from_weights(kDatapointSpaceId, draw_weights(rng, k));

  const double lambda = 0.5 + 1.5 * rng.next_unit();
  const double beta = 0.5 + 1.5 * rng.next_unit();

  if (mode == GenerationMode::Adversarial) {
    const std::size_t z0 = rng.next_below(space.size());
    const std::size_t th0 = rng.next_below(m);
    rows.erase(z0);
    rows.emplace(z0, FiniteMeasure::point_mass(kModelSpaceId, m, th0));
    reference_q = drop_atom(reference_q, rng.next_below(m));
    reference_ps = drop_atom(reference_ps, rng.next_below(k));
  }

  Kernel algorithm(space.space_id(), space.size(), std::move(rows));
  Scenario scenario{std::move(loss),
                    n,
                    std::move(p_z),
                    std::move(algorithm),
                    lambda,
                    beta,
                    std::move(reference_q),
                    std::move(reference_ps)};
  scenario.validate();
  return scenario;
}

RunReport run(const RunConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  RunReport report;
  report.config = config;
  for (std::size_t i = 0; i < config.num_scenarios; ++i) {
    const std::uint64_t seed = config.seed + i;
    Scenario scenario = generate_scenario(seed, config.dims, config.mode);
    ScenarioContext ctx = make_context(std::move(scenario));

    ScenarioReport sr;
    sr.seed = seed;
    sr.num_datapoints = ctx.scenario.loss.num_datapoints();
    sr.n = ctx.scenario.n;
    sr.num_models = ctx.scenario.loss.num_models();

    const std::vector<double> lambdas =
        config.lambdas.empty() ? std::vector<double>{ctx.scenario.lambda}
                               : config.lambdas;
    const std::vector<double> betas =
        config.betas.empty() ? std::vector<double>{ctx.scenario.beta}
                             : config.betas;
    sr.results = evaluate_catalog(ctx, lambdas, betas, config.references,
                                  config.tol);
    try {
      sr.triangles =
          pythagorean_triangles(ctx, CatalogParams::from_scenario(ctx.scenario));
    } catch (const Error&) {
      // adversarial supports can invalidate the triangle quantities
      sr.triangles.clear();
    }

    for (const IdentityResult& r : sr.results) {
      switch (r.status) {
        case IdentityStatus::Pass: ++report.summary.pass; break;
        case IdentityStatus::Fail: ++report.summary.fail; break;
        case IdentityStatus::Skipped: ++report.summary.skipped; break;
      }
    }
    report.scenarios.push_back(std::move(sr));
  }
  const auto end = std::chrono::steady_clock::now();
  report.wall_time_ms =
      std::chrono::duration<double, std::milli>(end - start).count();

  if (!config.out.empty()) {
    std::ofstream file(config.out, std::ios::binary);
    if (!file) {
      throw IoError("cannot open output path: " + config.out);
    }
    file << emit_report(report, config.format);
    if (!file) {
      throw IoError("failed writing report to: " + config.out);
    }
  }
  return report;
}

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

std::string status_string(const IdentityResult& r) {
  if (r.status == IdentityStatus::Skipped) {
    return "skipped(" + r.detail + ")";
  }
  return to_string(r.status);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) {
    return s;
  }
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

void emit_config(std::ostringstream& os, const RunConfig& c) {
  os << "{\"seed\":" << c.seed << ",\"num_scenarios\":" << c.num_scenarios
     << ",\"dims\":{\"datapoints\":[" << c.dims.min_datapoints << ","
     << c.dims.max_datapoints << "],\"n\":[" << c.dims.min_n << ","
     << c.dims.max_n << "],\"models\":[" << c.dims.min_models << ","
     << c.dims.max_models << "]},\"lambdas\":[";
  for (std::size_t i = 0; i < c.lambdas.size(); ++i) {
    os << (i ? "," : "") << fmt_double(c.lambdas[i]);
  }
  os << "],\"betas\":[";
  for (std::size_t i = 0; i < c.betas.size(); ++i) {
    os << (i ? "," : "") << fmt_double(c.betas[i]);
  }
  os << "],\"references\":[";
  for (std::size_t i = 0; i < c.references.size(); ++i) {
    os << (i ? "," : "") << "\"" << to_string(c.references[i]) << "\"";
  }
  os << "],\"tol_rel\":" << fmt_double(c.tol.rel)
     << ",\"tol_abs\":" << fmt_double(c.tol.abs_floor) << ",\"mode\":\""
     << to_string(c.mode) << "\",\"out\":\"" << json_escape(c.out)
     << "\",\"format\":\"" << c.format << "\"}";
}

std::string emit_json(const RunReport& report) {
  std::ostringstream os;
  os << "{\"config\":";
  emit_config(os, report.config);
  os << ",\"scenarios\":[";
  for (std::size_t s = 0; s < report.scenarios.size(); ++s) {
    const ScenarioReport& sr = report.scenarios[s];
    os << (s ? "," : "") << "{\"seed\":" << sr.seed << ",\"dims\":{"
       << "\"datapoints\":" << sr.num_datapoints << ",\"n\":" << sr.n
       << ",\"models\":" << sr.num_models << "},\"results\":[";
    for (std::size_t i = 0; i < sr.results.size(); ++i) {
      const IdentityResult& r = sr.results[i];
      os << (i ? "," : "") << "{\"id\":\"" << to_string(r.id)
         << "\",\"lhs\":" << fmt_double(r.lhs)
         << ",\"rhs\":" << fmt_double(r.rhs)
         << ",\"abs_err\":" << fmt_double(r.abs_err)
         << ",\"rel_err\":" << fmt_double(r.rel_err) << ",\"status\":\""
         << json_escape(status_string(r)) << "\"}";
    }
    os << "],\"triangles\":[";
    for (std::size_t i = 0; i < sr.triangles.size(); ++i) {
      const Triangle& t = sr.triangles[i];
      os << (i ? "," : "") << "{\"name\":\"" << json_escape(t.name)
         << "\",\"leg_a_sq\":" << fmt_double(t.leg_a_sq)
         << ",\"leg_b_sq\":" << fmt_double(t.leg_b_sq)
         << ",\"hyp_sq\":" << fmt_double(t.hyp_sq) << "}";
    }
    os << "]}";
  }
  os << "],\"summary\":{\"pass\":" << report.summary.pass
     << ",\"fail\":" << report.summary.fail
     << ",\"skipped\":" << report.summary.skipped << "}"
     << ",\"wall_time_ms\":" << fmt_double(report.wall_time_ms) << "}";
  return os.str();
}

std::string emit_csv(const RunReport& report) {
  std::ostringstream os;
  os << "scenario,identity,lhs,rhs,abs_err,rel_err,status\n";
  for (const ScenarioReport& sr : report.scenarios) {
    for (const IdentityResult& r : sr.results) {
      os << sr.seed << "," << to_string(r.id) << "," << fmt_double(r.lhs)
         << "," << fmt_double(r.rhs) << "," << fmt_double(r.abs_err) << ","
         << fmt_double(r.rel_err) << "," << csv_field(status_string(r))
         << "\n";
    }
  }
  return os.str();
}

}  // namespace

std::string emit_report(const RunReport& report, const std::string& format) {
  if (format == "json") return emit_json(report);
  if (format == "csv") return emit_csv(report);
  throw InvalidParameter("emit_report: format must be json or csv");
}

std::string scenario_to_json(const Scenario& scenario) {
  nlohmann::json j;
  const std::size_t k = scenario.loss.num_datapoints();
  const std::size_t m = scenario.loss.num_models();
  j["n"] = scenario.n;
  nlohmann::json loss = nlohmann::json::array();
  for (std::size_t a = 0; a < k; ++a) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t t = 0; t < m; ++t) {
      row.push_back(scenario.loss(a, t));
    }
    loss.push_back(std::move(row));
  }
  j["loss"] = std::move(loss);

  auto weights_of = [](const FiniteMeasure& p) {
    nlohmann::json w = nlohmann::json::array();
    for (std::size_t i = 0; i < p.space_size(); ++i) {
      w.push_back(p.mass(i));
    }
    return w;
  };
  j["p_z"] = weights_of(scenario.p_z_single);
  nlohmann::json rows = nlohmann::json::array();
  const DatasetSpace space = scenario.dataset_space();
  for (std::size_t z = 0; z < space.size(); ++z) {
    rows.push_back(weights_of(scenario.algorithm.row(z)));
  }
  j["algorithm"] = std::move(rows);
  j["lambda"] = scenario.lambda;
  j["beta"] = scenario.beta;
  j["reference_q"]["counting"] = scenario.reference_q.is_counting();
  j["reference_q"]["weights"] = weights_of(scenario.reference_q);
  j["reference_ps"] = weights_of(scenario.reference_ps);
  return j.dump(2);
}

Scenario scenario_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError(std::string("scenario parse error: ") + e.what());
  }
  const auto& loss_rows = j.at("loss");
  const std::size_t k = loss_rows.size();
  const std::size_t m = loss_rows.at(0).size();
  std::vector<double> values;
  values.reserve(k * m);
  for (const auto& row : loss_rows) {
    for (const auto& v : row) {
      values.push_back(v.get<double>());
    }
  }
  LossTable loss(k, m, std::move(values));
  const std::size_t n = j.at("n").get<std::size_t>();
  const DatasetSpace space(k, n);

  auto measure_of = [](const std::string& space_id, const nlohmann::json& w) {
    return FiniteMeasure::from_weights(space_id, w.get<std::vector<double>>());
  };
  FiniteMeasure p_z = measure_of(kDatapointSpaceId, j.at("p_z"));

  std::map<std::size_t, FiniteMeasure> rows;
  const auto& alg = j.at("algorithm");
  for (std::size_t z = 0; z < alg.size(); ++z) {
    rows.emplace(z, measure_of(kModelSpaceId, alg.at(z)));
  }
  Kernel algorithm(space.space_id(), space.size(), std::move(rows));

  FiniteMeasure reference_q =
      j.at("reference_q").at("counting").get<bool>()
          ? FiniteMeasure::counting(kModelSpaceId, m)
          : measure_of(kModelSpaceId, j.at("reference_q").at("weights"));
  FiniteMeasure reference_ps = measure_of(kDatapointSpaceId, j.at("reference_ps"));

  Scenario scenario{std::move(loss),
                    n,
                    std::move(p_z),
                    std::move(algorithm),
                    j.at("lambda").get<double>(),
                    j.at("beta").get<double>(),
                    std::move(reference_q),
                    std::move(reference_ps)};
  scenario.validate();
  return scenario;
}

Scenario demo_scenario() {
  LossTable loss(2, 2, {0.1, 0.9, 0.8, 0.2});
  FiniteMeasure p_z =
      FiniteMeasure::from_weights(kDatapointSpaceId, std::vector<double>{0.3, 0.7});
  const DatasetSpace space(2, 2);
  std::map<std::size_t, FiniteMeasure> rows;
  const double table[4][2] = {{0.6, 0.4}, {0.3, 0.7}, {0.5, 0.5}, {0.2, 0.8}};
  for (std::size_t z = 0; z < 4; ++z) {
    rows.emplace(z, FiniteMeasure::from_weights(
                        kModelSpaceId, std::vector<double>{table[z][0], table[z][1]}));
  }
  Kernel algorithm(space.space_id(), space.size(), std::move(rows));
  Scenario scenario{std::move(loss),
                    2,
                    std::move(p_z),
                    std::move(algorithm),
                    1.0,
                    1.0,
                    FiniteMeasure::uniform(kModelSpaceId, 2),
                    FiniteMeasure::uniform(kDatapointSpaceId, 2)};
  scenario.validate();
  return scenario;
}

}  // namespace gaplab
