#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gaplab/gibbs.hpp"
#include "gaplab/learning.hpp"
#include "gaplab/wcdg.hpp"

namespace gaplab {

// Closed catalog of generalization-error identities. A* tags compare the
// model-side (Gibbs) closed forms against the direct generalization error,
// D* tags the data-side (WCDG) closed forms, and X* tags are structural
// equalities of the joint construction. The catalog is closed: every tag
// maps to exactly one statement.
enum class IdentityId {
  A1, A2, A3, A4, A5, A6, A7, A8, A9, A10, A11, A12, A13, A14, A15,
  D1, D2, D3, D4, D5, D6, D7, D8, D9, D10, D11, D12,
  X1, X2, X3, X4,
};

const std::vector<IdentityId>& all_identities();
std::string to_string(IdentityId id);
IdentityId identity_from_string(const std::string& tag);

enum class IdentityStatus { Pass, Fail, Skipped };
std::string to_string(IdentityStatus status);

struct Tolerances {
  double rel = 1e-9;
  double abs_floor = 1e-12;
};

// One evaluated identity. For gen-error tags, lhs is the direct
// generalization error and rhs the closed form. Standalone equalities
// (A7, A13, D8, D12) report their own two sides; where a tag asserts a
// family of atomwise or rowwise equalities (X1-X4), lhs is the worst
// deviation and rhs is zero, so the absolute floor governs.
// rel_err = abs_err / max(|lhs|, |rhs|), zero when both sides vanish;
// status is pass iff rel_err <= rel or abs_err <= abs_floor.
struct IdentityResult {
  IdentityId id;
  double lhs = 0.0;
  double rhs = 0.0;
  double abs_err = 0.0;
  double rel_err = 0.0;
  IdentityStatus status = IdentityStatus::Skipped;
  std::string detail;  // violated assumption for skips, empty otherwise
};

// Free parameters an identity is evaluated at. Defaults come from the
// scenario's own fields.
struct CatalogParams {
  double lambda;
  double beta;
  FiniteMeasure reference_q;   // over models; probability or counting
  FiniteMeasure reference_ps;  // over datapoints; probability

  static CatalogParams from_scenario(const Scenario& scenario);
};

// Reference choices evaluate_catalog expands per tag side: Q over models for
// A* tags, P_S over datapoints for D* tags. The counting measure is not a
// valid WCDG reference, so a D* tag under Counting reports skipped.
enum class ReferenceChoice { Scenario, Uniform, Counting };
std::string to_string(ReferenceChoice choice);

// A scenario together with its joint constructions and the enumeration
// oracle every gen-error identity is compared against.
struct ScenarioContext {
  Scenario scenario;
  JointModel joint;
  double oracle;  // gen_error_direct of the scenario
};

ScenarioContext make_context(Scenario scenario,
                             std::size_t cap = kDefaultEnumerationCap);

// The definition, as a literal double sum over independent dataset pairs.
// This is the oracle every closed form is checked against.
double gen_error_direct(const DatasetSpace& space, const LossTable& loss,
                        const Kernel& algorithm,
                        const FiniteMeasure& p_datasets);

double gen_error_direct(const ScenarioContext& ctx);

// Population-error minus empirical-risk form; equals the oracle up to
// summation reordering.
double gen_error_population_form(const ScenarioContext& ctx);

// Step one of the model-side method: expected algorithm-driven gap between
// the model marginal and the trained instance.
double gen_error_via_algorithm_gaps(const ScenarioContext& ctx);

// Step one of the data-side method: expected data-driven gap between the
// datapoint marginal and the per-sample likelihood.
double gen_error_via_data_gaps(const ScenarioContext& ctx);

IdentityResult evaluate_identity(const ScenarioContext& ctx, IdentityId id,
                                 const CatalogParams& params,
                                 const Tolerances& tol = {});

// Parameters taken from the scenario itself.
IdentityResult evaluate_identity(const ScenarioContext& ctx, IdentityId id,
                                 const Tolerances& tol = {});

// Cross-product evaluation of the full catalog: A* tags over
// lambdas x references, D* tags over betas x references, X* tags once.
// Ordering is deterministic: tags in enum order, then parameter index,
// then reference index. Per-entry errors become skipped results; the batch
// never aborts.
std::vector<IdentityResult> evaluate_catalog(
    const ScenarioContext& ctx, const std::vector<double>& lambdas,
    const std::vector<double>& betas,
    const std::vector<ReferenceChoice>& references, const Tolerances& tol = {});

// Squared side lengths of the right-triangle constructions implied by the
// Pythagorean lemmas, evaluated at the given parameters. leg_a_sq +
// leg_b_sq = hyp_sq when the corresponding lemma applies.
struct Triangle {
  std::string name;
  double leg_a_sq;
  double leg_b_sq;
  double hyp_sq;
};

std::vector<Triangle> pythagorean_triangles(const ScenarioContext& ctx,
                                            const CatalogParams& params);

}  // namespace gaplab
