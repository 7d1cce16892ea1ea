#include "gaplab/identities.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace gaplab {

const std::vector<IdentityId>& all_identities() {
  static const std::vector<IdentityId> ids = {
      IdentityId::A1,  IdentityId::A2,  IdentityId::A3,  IdentityId::A4,
      IdentityId::A5,  IdentityId::A6,  IdentityId::A7,  IdentityId::A8,
      IdentityId::A9,  IdentityId::A10, IdentityId::A11, IdentityId::A12,
      IdentityId::A13, IdentityId::A14, IdentityId::A15, IdentityId::D1,
      IdentityId::D2,  IdentityId::D3,  IdentityId::D4,  IdentityId::D5,
      IdentityId::D6,  IdentityId::D7,  IdentityId::D8,  IdentityId::D9,
      IdentityId::D10, IdentityId::D11, IdentityId::D12, IdentityId::X1,
      IdentityId::X2,  IdentityId::X3,  IdentityId::X4,
  };
  return ids;
}

std::string to_string(IdentityId id) {
  switch (id) {
    case IdentityId::A1: return "A1";
    case IdentityId::A2: return "A2";
    case IdentityId::A3: return "A3";
    case IdentityId::A4: return "A4";
    case IdentityId::A5: return "A5";
    case IdentityId::A6: return "A6";
    case IdentityId::A7: return "A7";
    case IdentityId::A8: return "A8";
    case IdentityId::A9: return "A9";
    case IdentityId::A10: return "A10";
    case IdentityId::A11: return "A11";
    case IdentityId::A12: return "A12";
    case IdentityId::A13: return "A13";
    case IdentityId::A14: return "A14";
    case IdentityId::A15: return "A15";
    case IdentityId::D1: return "D1";
    case IdentityId::D2: return "D2";
    case IdentityId::D3: return "D3";
    case IdentityId::D4: return "D4";
    case IdentityId::D5: return "D5";
    case IdentityId::D6: return "D6";
    case IdentityId::D7: return "D7";
    case IdentityId::D8: return "D8";
    case IdentityId::D9: return "D9";
    case IdentityId::D10: return "D10";
    case IdentityId::D11: return "D11";
    case IdentityId::D12: return "D12";
    case IdentityId::X1: return "X1";
    case IdentityId::X2: return "X2";
    case IdentityId::X3: return "X3";
    case IdentityId::X4: return "X4";
  }
  throw UnknownIdentity("unknown identity id");
}

IdentityId identity_from_string(const std::string& tag) {
  for (IdentityId id : all_identities()) {
    if (to_string(id) == tag) {
      return id;
    }
  }
  throw UnknownIdentity("unknown identity tag: " + tag);
}

std::string to_string(IdentityStatus status) {
  switch (status) {
    case IdentityStatus::Pass: return "pass";
    case IdentityStatus::Fail: return "fail";
    case IdentityStatus::Skipped: return "skipped";
  }
  return "unknown";
}

std::string to_string(ReferenceChoice choice) {
  switch (choice) {
    case ReferenceChoice::Scenario: return "scenario";
    case ReferenceChoice::Uniform: return "uniform";
    case ReferenceChoice::Counting: return "counting";
  }
  return "unknown";
}

CatalogParams CatalogParams::from_scenario(const Scenario& scenario) {
  return CatalogParams{scenario.lambda, scenario.beta, scenario.reference_q,
                       scenario.reference_ps};
}

double gen_error_direct(const DatasetSpace& space, const LossTable& loss,
                        const Kernel& algorithm,
                        const FiniteMeasure& p_datasets) {
  double acc = 0.0;
  for (const auto& [z, lz] : p_datasets.log_masses()) {
    const FiniteMeasure& row = algorithm.row(z);
    const double train = risk_over_models(space, loss, z, row);
    const double pz = std::exp(lz);
    for (const auto& [u, lu] : p_datasets.log_masses()) {
      const double test = risk_over_models(space, loss, u, row);
      acc += pz * std::exp(lu) * (test - train);
    }
  }
  return acc;
}

double gen_error_direct(const ScenarioContext& ctx) { return ctx.oracle; }

double gen_error_population_form(const ScenarioContext& ctx) {
  const DatasetSpace& space = ctx.joint.dataset_space;
  const LossTable& loss = ctx.scenario.loss;
  double acc = 0.0;
  for (const auto& [z, lz] : ctx.joint.p_datasets.log_masses()) {
    const FiniteMeasure& row = ctx.scenario.algorithm.row(z);
    double inner = 0.0;
    for (const auto& [theta, lt] : row.log_masses()) {
      const double population =
          risk_over_datasets(space, loss, theta, ctx.joint.p_datasets);
      inner += std::exp(lt) * (population - empirical_risk(space, loss, z, theta));
    }
    acc += std::exp(lz) * inner;
  }
  return acc;
}

double gen_error_via_algorithm_gaps(const ScenarioContext& ctx) {
  const DatasetSpace& space = ctx.joint.dataset_space;
  const LossTable& loss = ctx.scenario.loss;
  double acc = 0.0;
  for (const auto& [z, lz] : ctx.joint.p_datasets.log_masses()) {
    acc += std::exp(lz) * gap_algorithm_direct(space, loss, z, ctx.joint.p_theta,
                                               ctx.scenario.algorithm.row(z));
  }
  return acc;
}

double gen_error_via_data_gaps(const ScenarioContext& ctx) {
  const LossTable& loss = ctx.scenario.loss;
  double acc = 0.0;
  for (const auto& [theta, lt] : ctx.joint.p_theta.log_masses()) {
    acc += std::exp(lt) * gap_data_direct(loss, theta, ctx.scenario.p_z_single,
                                          ctx.joint.per_sample.row(theta));
  }
  return acc;
}

ScenarioContext make_context(Scenario scenario, std::size_t cap) {
  JointModel joint = build_joint(scenario, cap);
  const double oracle = gen_error_direct(joint.dataset_space, scenario.loss,
                                         scenario.algorithm, joint.p_datasets);
  return ScenarioContext{std::move(scenario), std::move(joint), oracle};
}

namespace {

// sum_a w(a) * (log num(a) - log den(a)) over the support of w. Every atom
// of supp(w) must belong to supp(num) and supp(den); log-RNDs are formed as
// differences of stored log-masses, never through exp-then-log.
double expect_log_ratio(const FiniteMeasure& w, const FiniteMeasure& num,
                        const FiniteMeasure& den) {
  double acc = 0.0;
  for (const auto& [atom, lw] : w.log_masses()) {
    acc += std::exp(lw) * (num.log_mass(atom) - den.log_mass(atom));
  }
  return acc;
}

class Evaluator {
 public:
  Evaluator(const ScenarioContext& ctx, CatalogParams params, Tolerances tol)
      : ctx_(ctx), params_(std::move(params)), tol_(tol) {}

  IdentityResult evaluate(IdentityId id) const {
    if (auto violated = check_assumptions(id)) {
      IdentityResult r;
      r.id = id;
      r.status = IdentityStatus::Skipped;
      r.detail = *violated;
      return r;
    }
    try {
      return compute(id);
    } catch (const Error& e) {
      IdentityResult r;
      r.id = id;
      r.status = IdentityStatus::Skipped;
      r.detail = e.what();
      return r;
    }
  }

 private:
  const ScenarioContext& ctx_;
  CatalogParams params_;
  Tolerances tol_;

  const DatasetSpace& space() const { return ctx_.joint.dataset_space; }
  const LossTable& loss() const { return ctx_.scenario.loss; }
  const Kernel& alg() const { return ctx_.scenario.algorithm; }
  const Kernel& lik() const { return ctx_.joint.likelihood; }
  const Kernel& per_sample() const { return ctx_.joint.per_sample; }
  const FiniteMeasure& pzn() const { return ctx_.joint.p_datasets; }
  const FiniteMeasure& ptheta() const { return ctx_.joint.p_theta; }
  const FiniteMeasure& pz1() const { return ctx_.scenario.p_z_single; }
  const FiniteMeasure& qref() const { return params_.reference_q; }
  const FiniteMeasure& psref() const { return params_.reference_ps; }
  double lam() const { return params_.lambda; }
  double bet() const { return params_.beta; }

  template <typename F>
  double expect_z(F&& f) const {
    double acc = 0.0;
    for (const auto& [z, lz] : pzn().log_masses()) {
      acc += std::exp(lz) * f(z);
    }
    return acc;
  }

  template <typename F>
  double expect_theta(F&& f) const {
    double acc = 0.0;
    for (const auto& [theta, lt] : ptheta().log_masses()) {
      acc += std::exp(lt) * f(theta);
    }
    return acc;
  }

  FiniteMeasure gibbs_at(const FiniteMeasure& q, std::size_t z) const {
    return gibbs_posterior(GibbsSpec{q, lam()}, space(), loss(), z);
  }

  FiniteMeasure wcdg_at(const FiniteMeasure& ps, std::size_t theta) const {
    return wcdg_measure(WcdgSpec{ps, bet()}, loss(), theta);
  }

  // Gibbs rows over supp(p_datasets) for the fixed reference.
  std::map<std::size_t, FiniteMeasure> gibbs_rows(const FiniteMeasure& q) const {
    std::map<std::size_t, FiniteMeasure> rows;
    for (const auto& [z, lz] : pzn().log_masses()) {
      (void)lz;
      rows.emplace(z, gibbs_at(q, z));
    }
    return rows;
  }

  std::map<std::size_t, FiniteMeasure> wcdg_rows(const FiniteMeasure& ps) const {
    std::map<std::size_t, FiniteMeasure> rows;
    for (const auto& [theta, lt] : ptheta().log_masses()) {
      (void)lt;
      rows.emplace(theta, wcdg_at(ps, theta));
    }
    return rows;
  }

  double model_mutual() const { return mutual_information(alg(), pzn()); }
  double model_lautum() const { return lautum_information(alg(), pzn()); }
  double data_mutual() const { return mutual_information(per_sample(), ptheta()); }
  double data_lautum() const { return lautum_information(per_sample(), ptheta()); }

  // ---- absolute-continuity predicates, a.s. over the joint supports ----

  bool rows_ac(const FiniteMeasure& dominating) const {
    for (const auto& [z, lz] : pzn().log_masses()) {
      (void)lz;
      if (!is_absolutely_continuous(alg().row(z), dominating)) return false;
    }
    return true;
  }

  bool dominates_rows(const FiniteMeasure& p) const {
    for (const auto& [z, lz] : pzn().log_masses()) {
      (void)lz;
      if (!is_absolutely_continuous(p, alg().row(z))) return false;
    }
    return true;
  }

  bool ptheta_ac_q() const { return is_absolutely_continuous(ptheta(), qref()); }
  bool q_ac_ptheta() const { return is_absolutely_continuous(qref(), ptheta()); }

  bool lik_mutual_pzn() const {
    for (const auto& [theta, lt] : ptheta().log_masses()) {
      (void)lt;
      if (!is_absolutely_continuous(pzn(), lik().row(theta))) return false;
    }
    // likelihood rows are dominated by p_datasets by construction
    return true;
  }

  bool per_sample_ac_ps(const FiniteMeasure& ps) const {
    for (const auto& [theta, lt] : ptheta().log_masses()) {
      (void)lt;
      if (!is_absolutely_continuous(per_sample().row(theta), ps)) return false;
    }
    return true;
  }

  bool ps_ac_per_sample(const FiniteMeasure& ps) const {
    for (const auto& [theta, lt] : ptheta().log_masses()) {
      (void)lt;
      if (!is_absolutely_continuous(ps, per_sample().row(theta))) return false;
    }
    return true;
  }

  // Named assumption checks shared across tags.
  std::optional<std::string> need_rows_ac_marginal() const {
    if (!rows_ac(ptheta())) {
      return "(a) P_{Theta|Z=z} absolutely continuous with P_Theta";
    }
    return std::nullopt;
  }

  std::optional<std::string> need_rows_and_marginal_ac_q() const {
    if (!rows_ac(qref()) || !ptheta_ac_q()) {
      return "(a) P_{Theta|Z=z} and P_Theta absolutely continuous with Q";
    }
    return std::nullopt;
  }

  std::optional<std::string> need_marginal_mutual_rows(const char* label) const {
    if (!rows_ac(ptheta()) || !dominates_rows(ptheta())) {
      return std::string(label) +
             " P_Theta and P_{Theta|Z=z} mutually absolutely continuous";
    }
    return std::nullopt;
  }

  std::optional<std::string> need_q_ac_marginal(const char* label) const {
    if (!q_ac_ptheta()) {
      return std::string(label) + " Q absolutely continuous with P_Theta";
    }
    return std::nullopt;
  }

  // Data-side shared hypotheses: (b) model-side mutual continuity,
  // (c) dataset-likelihood mutual continuity.
  std::optional<std::string> need_data_core() const {
    if (auto v = need_marginal_mutual_rows("(b)")) return v;
    if (!lik_mutual_pzn()) {
      return "(c) P_{Z^n|Theta=theta} and P_{Z^n} mutually absolutely continuous";
    }
    return std::nullopt;
  }

  std::optional<std::string> need_ps_probability() const {
    if (!psref().normalized()) {
      return "reference P_S must be a probability measure";
    }
    return std::nullopt;
  }

  std::optional<std::string> need_ps_dominates(const char* label) const {
    if (!per_sample_ac_ps(psref()) ||
        !is_absolutely_continuous(pz1(), psref())) {
      return std::string(label) +
             " P_{Z|Theta=theta} and P_Z absolutely continuous with P_S";
    }
    return std::nullopt;
  }

  std::optional<std::string> need_ps_mutual(const char* label) const {
    if (auto v = need_ps_dominates(label)) return v;
    if (!ps_ac_per_sample(psref()) ||
        !is_absolutely_continuous(psref(), pz1())) {
      return std::string(label) +
             " P_{Z|Theta=theta} and P_Z mutually absolutely continuous with P_S";
    }
    return std::nullopt;
  }

  std::optional<std::string> check_assumptions(IdentityId id) const {
    switch (id) {
      case IdentityId::A1:
        if (auto v = need_rows_ac_marginal()) return v;
        if (!rows_ac(qref()) || !ptheta_ac_q()) {
          return "(b) P_{Theta|Z=z} and P_Theta absolutely continuous with Q";
        }
        return std::nullopt;
      case IdentityId::A2:
        for (const auto& [z, lz] : pzn().log_masses()) {
          (void)lz;
          if (!is_absolutely_continuous(alg().row(z), qref()) ||
              !is_absolutely_continuous(qref(), alg().row(z))) {
            return "(a) P_{Theta|Z=z} and Q mutually absolutely continuous";
          }
        }
        if (!ptheta_ac_q() || !q_ac_ptheta()) {
          return "(b) P_Theta and Q mutually absolutely continuous";
        }
        return std::nullopt;
      case IdentityId::A3:
        return need_rows_ac_marginal();
      case IdentityId::A4:
        return need_marginal_mutual_rows("(a)");
      case IdentityId::A5:
        if (auto v = need_rows_and_marginal_ac_q()) return v;
        return need_q_ac_marginal("(b)");
      case IdentityId::A6:
        if (auto v = need_rows_and_marginal_ac_q()) return v;
        return need_marginal_mutual_rows("(b)");
      case IdentityId::A7:
      case IdentityId::A8:
        if (auto v = need_rows_and_marginal_ac_q()) return v;
        if (auto v = need_q_ac_marginal("(b)")) return v;
        if (!dominates_rows(ptheta())) {
          return "(c) P_Theta absolutely continuous with P_{Theta|Z=z}";
        }
        return std::nullopt;
      case IdentityId::A9:
        if (auto v = need_rows_and_marginal_ac_q()) return v;
        return need_marginal_mutual_rows("(b)");
      case IdentityId::A10:
        return need_marginal_mutual_rows("(a)");
      case IdentityId::A11:
        if (auto v = need_rows_and_marginal_ac_q()) return v;
        if (auto v = need_marginal_mutual_rows("(b)")) return v;
        return need_q_ac_marginal("(c)");
      case IdentityId::A12:
        if (!rows_ac(qref())) {
          return "(a) P_{Theta|Z=z} absolutely continuous with Q";
        }
        return std::nullopt;
      case IdentityId::A13:
        if (auto v = need_rows_and_marginal_ac_q()) return v;
        return need_rows_ac_marginal();
      case IdentityId::A14:
      case IdentityId::A15:
        return std::nullopt;  // evaluated on the constructed Gibbs algorithm
      case IdentityId::D1:
        if (auto v = need_data_core()) return v;
        if (auto v = need_ps_probability()) return v;
        return need_ps_dominates("(d)");
      case IdentityId::D2:
      case IdentityId::D3:
      case IdentityId::D6:
      case IdentityId::D8:
      case IdentityId::D9:
        if (auto v = need_data_core()) return v;
        if (auto v = need_ps_probability()) return v;
        return need_ps_mutual("(d)");
      case IdentityId::D4:
      case IdentityId::D5:
        return need_data_core();
      case IdentityId::D7:
        if (auto v = need_data_core()) return v;
        if (auto v = need_ps_probability()) return v;
        return need_ps_dominates("(d)");
      case IdentityId::D10:
        if (!lik_mutual_pzn()) {
          return "(b) P_{Z^n|Theta=theta} and P_{Z^n} mutually absolutely continuous";
        }
        return need_marginal_mutual_rows("(c)");
      case IdentityId::D11:
        if (auto v = need_data_core()) return v;
        if (auto v = need_ps_probability()) return v;
        return need_ps_mutual("(e)");
      case IdentityId::D12:
        if (auto v = need_ps_probability()) return v;
        return need_ps_dominates("(d)");
      case IdentityId::X1:
        return std::nullopt;
      case IdentityId::X2:
        if (!dominates_rows(ptheta())) {
          return "(a) P_Theta absolutely continuous with P_{Theta|Z=z}";
        }
        for (const auto& [theta, lt] : ptheta().log_masses()) {
          (void)lt;
          if (!is_absolutely_continuous(pzn(), lik().row(theta))) {
            return "(b) P_{Z^n} absolutely continuous with P_{Z^n|Theta=theta}";
          }
        }
        return std::nullopt;
      case IdentityId::X3:
      case IdentityId::X4:
        return std::nullopt;
    }
    throw UnknownIdentity("unknown identity id");
  }

  IdentityResult finish(IdentityId id, double lhs, double rhs,
                        double extra_dev = 0.0) const {
    IdentityResult r;
    r.id = id;
    r.lhs = lhs;
    r.rhs = rhs;
    r.abs_err = std::max(std::abs(lhs - rhs), extra_dev);
    const double denom = std::max(std::abs(lhs), std::abs(rhs));
    r.rel_err = denom > 0.0 ? r.abs_err / denom : 0.0;
    r.status = (r.rel_err <= tol_.rel || r.abs_err <= tol_.abs_floor)
                   ? IdentityStatus::Pass
                   : IdentityStatus::Fail;
    return r;
  }

  IdentityResult compute(IdentityId id) const {
    switch (id) {
      case IdentityId::A1: return a1();
      case IdentityId::A2: return a2();
      case IdentityId::A3: return a3();
      case IdentityId::A4: return a4();
      case IdentityId::A5: return a5();
      case IdentityId::A6: return a6();
      case IdentityId::A7: return a7();
      case IdentityId::A8: return a8();
      case IdentityId::A9: return a9();
      case IdentityId::A10: return a10();
      case IdentityId::A11: return a11();
      case IdentityId::A12: return a12();
      case IdentityId::A13: return a13();
      case IdentityId::A14: return gibbs_self(id);
      case IdentityId::A15: return gibbs_self(id);
      case IdentityId::D1: return d1();
      case IdentityId::D2: return d2();
      case IdentityId::D3: return d3();
      case IdentityId::D4: return d4();
      case IdentityId::D5: return d5();
      case IdentityId::D6: return d6();
      case IdentityId::D7: return d7();
      case IdentityId::D8: return d8();
      case IdentityId::D9: return d9();
      case IdentityId::D10: return d10();
      case IdentityId::D11: return d11();
      case IdentityId::D12: return d12();
      case IdentityId::X1: return x1();
      case IdentityId::X2: return x2();
      case IdentityId::X3: return x3();
      case IdentityId::X4: return x4();
    }
    throw UnknownIdentity("unknown identity id");
  }

  // ---- model-side expressions ----

  IdentityResult a1() const {
    const auto g = gibbs_rows(qref());
    const double rhs = lam() * expect_z([&](std::size_t z) {
      const FiniteMeasure& row = alg().row(z);
      const FiniteMeasure& gz = g.at(z);
      return relative_entropy(ptheta(), gz) - relative_entropy(row, gz) +
             relative_entropy(row, qref()) - relative_entropy(ptheta(), qref());
    });
    return finish(IdentityId::A1, ctx_.oracle, rhs);
  }

  IdentityResult a2() const {
    const auto g = gibbs_rows(qref());
    const double rhs = lam() * expect_z([&](std::size_t z) {
      const FiniteMeasure& gz = g.at(z);
      return expect_log_ratio(alg().row(z), gz, qref()) -
             expect_log_ratio(ptheta(), gz, qref());
    });
    return finish(IdentityId::A2, ctx_.oracle, rhs);
  }

  IdentityResult a3() const {
    const auto g = gibbs_rows(ptheta());
    const double rhs =
        lam() * model_mutual() + lam() * expect_z([&](std::size_t z) {
          const FiniteMeasure& gz = g.at(z);
          return relative_entropy(ptheta(), gz) -
                 relative_entropy(alg().row(z), gz);
        });
    return finish(IdentityId::A3, ctx_.oracle, rhs);
  }

  IdentityResult a4() const {
    // reference is the trained instance itself: Q = P_{Theta|Z=z}
    const double rhs =
        -lam() * model_lautum() + lam() * expect_z([&](std::size_t z) {
          const FiniteMeasure gz = gibbs_posterior(
              GibbsSpec{alg().row(z), lam()}, space(), loss(), z);
          return relative_entropy(ptheta(), gz) -
                 relative_entropy(alg().row(z), gz);
        });
    return finish(IdentityId::A4, ctx_.oracle, rhs);
  }

  IdentityResult a5() const {
    const auto g = gibbs_rows(qref());
    const double rhs =
        lam() * model_mutual() + lam() * expect_z([&](std::size_t z) {
          const FiniteMeasure& gz = g.at(z);
          return relative_entropy(ptheta(), gz) -
                 relative_entropy(alg().row(z), gz);
        });
    return finish(IdentityId::A5, ctx_.oracle, rhs);
  }

  IdentityResult a6() const {
    const auto g = gibbs_rows(qref());
    const double rhs =
        -lam() * model_lautum() + lam() * expect_z([&](std::size_t z) {
          const FiniteMeasure& row = alg().row(z);
          const FiniteMeasure& gz = g.at(z);
          return relative_entropy(ptheta(), gz) - relative_entropy(row, gz) +
                 relative_entropy(row, qref()) -
                 expect_log_ratio(ptheta(), row, qref());
        });
    return finish(IdentityId::A6, ctx_.oracle, rhs);
  }

  IdentityResult a7() const {
    const double lhs = model_mutual() + model_lautum();
    const double rhs = expect_z([&](std::size_t z) {
      const FiniteMeasure& row = alg().row(z);
      return expect_log_ratio(row, row, qref()) -
             expect_log_ratio(ptheta(), row, qref());
    });
    return finish(IdentityId::A7, lhs, rhs);
  }

  IdentityResult a8() const {
    const auto g = gibbs_rows(qref());
    const double rhs = lam() * (model_mutual() + model_lautum()) +
                       lam() * expect_z([&](std::size_t z) {
                         const FiniteMeasure& row = alg().row(z);
                         const FiniteMeasure& gz = g.at(z);
                         return expect_log_ratio(ptheta(), row, gz) -
                                expect_log_ratio(row, row, gz);
                       });
    return finish(IdentityId::A8, ctx_.oracle, rhs);
  }

  IdentityResult a9() const {
    const auto g = gibbs_rows(qref());
    const double rhs = -lam() * (model_mutual() + model_lautum()) +
                       lam() * expect_z([&](std::size_t z) {
                         const FiniteMeasure& row = alg().row(z);
                         const FiniteMeasure& gz = g.at(z);
                         return expect_log_ratio(ptheta(), ptheta(), gz) -
                                expect_log_ratio(row, ptheta(), gz) +
                                expect_log_ratio(row, row, qref()) -
                                expect_log_ratio(ptheta(), row, qref());
                       });
    return finish(IdentityId::A9, ctx_.oracle, rhs);
  }

  IdentityResult a10() const {
    const double rhs = -lam() * (model_mutual() + model_lautum()) +
                       lam() * expect_z([&](std::size_t z) {
                         const FiniteMeasure gz = gibbs_posterior(
                             GibbsSpec{alg().row(z), lam()}, space(), loss(), z);
                         return expect_log_ratio(ptheta(), ptheta(), gz) -
                                expect_log_ratio(alg().row(z), ptheta(), gz);
                       });
    return finish(IdentityId::A10, ctx_.oracle, rhs);
  }

  IdentityResult a11() const {
    const auto g = gibbs_rows(qref());
    const double rhs = lam() * expect_z([&](std::size_t z) {
      const FiniteMeasure& gz = g.at(z);
      return expect_log_ratio(ptheta(), ptheta(), gz) -
             expect_log_ratio(alg().row(z), ptheta(), gz);
    });
    return finish(IdentityId::A11, ctx_.oracle, rhs);
  }

  IdentityResult a12() const {
    const auto g = gibbs_rows(qref());
    double rhs = 0.0;
    for (const auto& [z, lz] : pzn().log_masses()) {
      const FiniteMeasure& row = alg().row(z);
      const double own = relative_entropy(row, g.at(z));
      double inner = 0.0;
      for (const auto& [u, lu] : pzn().log_masses()) {
        inner += std::exp(lu) * (relative_entropy(row, g.at(u)) - own);
      }
      rhs += std::exp(lz) * inner;
    }
    return finish(IdentityId::A12, ctx_.oracle, lam() * rhs);
  }

  IdentityResult a13() const {
    const auto g = gibbs_rows(qref());
    double lhs = 0.0;
    for (const auto& [z, lz] : pzn().log_masses()) {
      double inner = 0.0;
      for (const auto& [u, lu] : pzn().log_masses()) {
        inner += std::exp(lu) * relative_entropy(alg().row(u), g.at(z));
      }
      lhs += std::exp(lz) * inner;
    }
    const double rhs = expect_z([&](std::size_t z) {
      return relative_entropy(ptheta(), g.at(z)) +
             relative_entropy(alg().row(z), ptheta());
    });
    // The same double integral also equals gen_error/lambda plus the expected
    // divergence of each instance from its own Gibbs posterior.
    const double rearranged =
        ctx_.oracle / lam() + expect_z([&](std::size_t z) {
          return relative_entropy(alg().row(z), g.at(z));
        });
    return finish(IdentityId::A13, lhs, rhs, std::abs(lhs - rearranged));
  }

  // A14 and A15 state the generalization error of the Gibbs algorithm itself,
  // so the algorithm is replaced by Gibbs posterior rows before comparing.
  IdentityResult gibbs_self(IdentityId id) const {
    const auto g = gibbs_rows(qref());
    Kernel gibbs_kernel(space().space_id(), space().size(), g);
    const double lhs =
        gen_error_direct(space(), loss(), gibbs_kernel, pzn());
    double rhs = 0.0;
    if (id == IdentityId::A14) {
      rhs = lam() * (mutual_information(gibbs_kernel, pzn()) +
                     lautum_information(gibbs_kernel, pzn()));
    } else {
      for (const auto& [z, lz] : pzn().log_masses()) {
        double inner = 0.0;
        for (const auto& [u, lu] : pzn().log_masses()) {
          inner += std::exp(lu) * relative_entropy(g.at(u), g.at(z));
        }
        rhs += std::exp(lz) * inner;
      }
      rhs *= lam();
    }
    return finish(id, lhs, rhs);
  }

  // ---- data-side expressions ----

  IdentityResult d1() const {
    const auto w = wcdg_rows(psref());
    const double rhs = bet() * expect_theta([&](std::size_t theta) {
      const FiniteMeasure& ps = per_sample().row(theta);
      const FiniteMeasure& wt = w.at(theta);
      return relative_entropy(ps, wt) - relative_entropy(pz1(), wt) -
             relative_entropy(ps, psref()) + relative_entropy(pz1(), psref());
    });
    return finish(IdentityId::D1, ctx_.oracle, rhs);
  }

  IdentityResult d2() const {
    const auto w = wcdg_rows(psref());
    const double rhs = bet() * expect_theta([&](std::size_t theta) {
      const FiniteMeasure& wt = w.at(theta);
      return expect_log_ratio(per_sample().row(theta), psref(), wt) -
             expect_log_ratio(pz1(), psref(), wt);
    });
    return finish(IdentityId::D2, ctx_.oracle, rhs);
  }

  IdentityResult d3() const {
    const auto w = wcdg_rows(psref());
    const double rhs = bet() * expect_theta([&](std::size_t theta) {
      const FiniteMeasure& wt = w.at(theta);
      return expect_log_ratio(per_sample().row(theta), pz1(), wt) -
             expect_log_ratio(pz1(), pz1(), wt);
    });
    return finish(IdentityId::D3, ctx_.oracle, rhs);
  }

  IdentityResult d4() const {
    // reference is the datapoint marginal: P_S = P_Z
    const double rhs =
        -bet() * data_mutual() + bet() * expect_theta([&](std::size_t theta) {
          const FiniteMeasure wt = wcdg_measure(WcdgSpec{pz1(), bet()}, loss(), theta);
          return relative_entropy(per_sample().row(theta), wt) -
                 relative_entropy(pz1(), wt);
        });
    return finish(IdentityId::D4, ctx_.oracle, rhs);
  }

  IdentityResult d5() const {
    // reference is the likelihood itself: P_S = P_{Z|Theta=theta}
    const double rhs =
        bet() * data_lautum() + bet() * expect_theta([&](std::size_t theta) {
          const FiniteMeasure& ps = per_sample().row(theta);
          const FiniteMeasure wt = wcdg_measure(WcdgSpec{ps, bet()}, loss(), theta);
          return relative_entropy(ps, wt) - relative_entropy(pz1(), wt);
        });
    return finish(IdentityId::D5, ctx_.oracle, rhs);
  }

  IdentityResult d6() const {
    const auto w = wcdg_rows(psref());
    const double rhs =
        -bet() * data_mutual() + bet() * expect_theta([&](std::size_t theta) {
          const FiniteMeasure& wt = w.at(theta);
          return relative_entropy(per_sample().row(theta), wt) -
                 relative_entropy(pz1(), wt);
        });
    return finish(IdentityId::D6, ctx_.oracle, rhs);
  }

  IdentityResult d7() const {
    const auto w = wcdg_rows(psref());
    const double rhs =
        bet() * data_lautum() + bet() * expect_theta([&](std::size_t theta) {
          const FiniteMeasure& ps = per_sample().row(theta);
          const FiniteMeasure& wt = w.at(theta);
          return relative_entropy(ps, wt) - relative_entropy(pz1(), wt) -
                 relative_entropy(ps, psref()) +
                 expect_log_ratio(pz1(), ps, psref());
        });
    return finish(IdentityId::D7, ctx_.oracle, rhs);
  }

  IdentityResult d8() const {
    const double lhs = data_mutual() + data_lautum();
    const double rhs = expect_theta([&](std::size_t theta) {
      const FiniteMeasure& ps = per_sample().row(theta);
      return expect_log_ratio(ps, ps, psref()) -
             expect_log_ratio(pz1(), ps, psref());
    });
    return finish(IdentityId::D8, lhs, rhs);
  }

  IdentityResult d9() const {
    const auto w = wcdg_rows(psref());
    const double rhs = -bet() * (data_mutual() + data_lautum()) +
                       bet() * expect_theta([&](std::size_t theta) {
                         const FiniteMeasure& ps = per_sample().row(theta);
                         const FiniteMeasure& wt = w.at(theta);
                         return expect_log_ratio(ps, ps, wt) -
                                expect_log_ratio(pz1(), ps, wt);
                       });
    return finish(IdentityId::D9, ctx_.oracle, rhs);
  }

  IdentityResult d10() const {
    // model-pair expectation over the n-fold likelihood
    double rhs = 0.0;
    for (const auto& [theta, lt] : ptheta().log_masses()) {
      const FiniteMeasure& row = lik().row(theta);
      const double own = risk_over_datasets(space(), loss(), theta, row);
      double inner = 0.0;
      for (const auto& [nu, ln] : ptheta().log_masses()) {
        inner += std::exp(ln) *
                 (risk_over_datasets(space(), loss(), nu, row) - own);
      }
      rhs += std::exp(lt) * inner;
    }
    return finish(IdentityId::D10, ctx_.oracle, rhs);
  }

  IdentityResult d11() const {
    const auto w = wcdg_rows(psref());
    double rhs = 0.0;
    for (const auto& [mu, lm] : ptheta().log_masses()) {
      const FiniteMeasure& ps = per_sample().row(mu);
      const double own = relative_entropy(ps, w.at(mu));
      double inner = 0.0;
      for (const auto& [nu, ln] : ptheta().log_masses()) {
        inner += std::exp(ln) * (own - relative_entropy(ps, w.at(nu)));
      }
      rhs += std::exp(lm) * inner;
    }
    return finish(IdentityId::D11, ctx_.oracle, bet() * rhs);
  }

  IdentityResult d12() const {
    const auto w = wcdg_rows(psref());
    double lhs = 0.0;
    for (const auto& [theta, lt] : ptheta().log_masses()) {
      const FiniteMeasure& ps = per_sample().row(theta);
      double inner = 0.0;
      for (const auto& [nu, ln] : ptheta().log_masses()) {
        inner += std::exp(ln) * relative_entropy(ps, w.at(nu));
      }
      lhs += std::exp(lt) * inner;
    }
    const double rhs = expect_theta([&](std::size_t theta) {
      return relative_entropy(per_sample().row(theta), pz1()) +
             relative_entropy(pz1(), w.at(theta));
    });
    // Dual rearrangement: the double integral equals the expected divergence
    // from each model's own WCDG measure minus gen_error/beta.
    const double rearranged =
        expect_theta([&](std::size_t theta) {
          return relative_entropy(per_sample().row(theta), w.at(theta));
        }) -
        ctx_.oracle / bet();
    return finish(IdentityId::D12, lhs, rhs, std::abs(lhs - rearranged));
  }

  // ---- structural equalities of the joint construction ----

  IdentityResult x1() const {
    double dev = 0.0;
    for (const auto& [theta, lt] : ptheta().log_masses()) {
      const FiniteMeasure& row = lik().row(theta);
      const double pt = std::exp(lt);
      for (const auto& [z, lz] : pzn().log_masses()) {
        const double fwd = row.mass(z) / std::exp(lz);
        const double bwd = alg().row(z).mass(theta) / pt;
        dev = std::max(dev, std::abs(fwd - bwd));
      }
    }
    return finish(IdentityId::X1, dev, 0.0);
  }

  IdentityResult x2() const {
    double dev = 0.0;
    for (const auto& [theta, lt] : ptheta().log_masses()) {
      const FiniteMeasure& row = lik().row(theta);
      const double pt = std::exp(lt);
      for (const auto& [z, lz] : pzn().log_masses()) {
        const double fwd = std::exp(lz) / row.mass(z);
        const double bwd = pt / alg().row(z).mass(theta);
        dev = std::max(dev, std::abs(fwd - bwd));
      }
    }
    return finish(IdentityId::X2, dev, 0.0);
  }

  IdentityResult x3() const {
    const double lhs1 = expect_z([&](std::size_t z) {
      return risk_over_models(space(), loss(), z, ptheta());
    });
    const double rhs1 = expect_theta([&](std::size_t theta) {
      return risk_over_datasets(space(), loss(), theta, pzn());
    });
    const double lhs2 = expect_z([&](std::size_t z) {
      return risk_over_models(space(), loss(), z, alg().row(z));
    });
    const double rhs2 = expect_theta([&](std::size_t theta) {
      return risk_over_datasets(space(), loss(), theta, lik().row(theta));
    });
    const double dev = std::max(std::abs(lhs1 - rhs1), std::abs(lhs2 - rhs2));
    return finish(IdentityId::X3, dev, 0.0);
  }

  // Under the i.i.d. assumption every coordinate marginal of the likelihood
  // mixes back to P_Z over P_Theta, and so does the per-sample law. The
  // per-sample law also reproduces the likelihood's expected empirical risk.
  // (Coordinate marginals agree with each other only for exchangeable
  // algorithms; the general per-sample object is their average.)
  IdentityResult x4() const {
    double dev = 0.0;
    const std::size_t k = loss().num_datapoints();
    for (std::size_t t = 0; t < space().n(); ++t) {
      for (std::size_t a = 0; a < k; ++a) {
        const double mixed = expect_theta([&](std::size_t theta) {
          const FiniteMeasure marg = coordinate_marginal(
              space(), lik().row(theta), t, kDatapointSpaceId, k);
          return marg.mass(a);
        });
        dev = std::max(dev, std::abs(mixed - pz1().mass(a)));
      }
    }
    for (std::size_t a = 0; a < k; ++a) {
      const double mixed = expect_theta([&](std::size_t theta) {
        return per_sample().row(theta).mass(a);
      });
      dev = std::max(dev, std::abs(mixed - pz1().mass(a)));
    }
    for (const auto& [theta, lt] : ptheta().log_masses()) {
      (void)lt;
      const double via_datasets =
          risk_over_datasets(space(), loss(), theta, lik().row(theta));
      const double via_per_sample =
          pointwise_risk(loss(), theta, per_sample().row(theta));
      dev = std::max(dev, std::abs(via_datasets - via_per_sample));
    }
    return finish(IdentityId::X4, dev, 0.0);
  }
};

bool is_model_side(IdentityId id) {
  switch (id) {
    case IdentityId::A1: case IdentityId::A2: case IdentityId::A3:
    case IdentityId::A4: case IdentityId::A5: case IdentityId::A6:
    case IdentityId::A7: case IdentityId::A8: case IdentityId::A9:
    case IdentityId::A10: case IdentityId::A11: case IdentityId::A12:
    case IdentityId::A13: case IdentityId::A14: case IdentityId::A15:
      return true;
    default:
      return false;
  }
}

bool is_data_side(IdentityId id) {
  switch (id) {
    case IdentityId::D1: case IdentityId::D2: case IdentityId::D3:
    case IdentityId::D4: case IdentityId::D5: case IdentityId::D6:
    case IdentityId::D7: case IdentityId::D8: case IdentityId::D9:
    case IdentityId::D10: case IdentityId::D11: case IdentityId::D12:
      return true;
    default:
      return false;
  }
}

FiniteMeasure make_model_reference(const ScenarioContext& ctx,
                                   ReferenceChoice choice) {
  const std::size_t m = ctx.scenario.loss.num_models();
  switch (choice) {
    case ReferenceChoice::Scenario: return ctx.scenario.reference_q;
    case ReferenceChoice::Uniform: return FiniteMeasure::uniform(kModelSpaceId, m);
    case ReferenceChoice::Counting: return FiniteMeasure::counting(kModelSpaceId, m);
  }
  throw InvalidParameter("unknown reference choice");
}

FiniteMeasure make_datapoint_reference(const ScenarioContext& ctx,
                                       ReferenceChoice choice) {
  const std::size_t k = ctx.scenario.loss.num_datapoints();
  switch (choice) {
    case ReferenceChoice::Scenario: return ctx.scenario.reference_ps;
    case ReferenceChoice::Uniform:
      return FiniteMeasure::uniform(kDatapointSpaceId, k);
    case ReferenceChoice::Counting:
      return FiniteMeasure::counting(kDatapointSpaceId, k);
  }
  throw InvalidParameter("unknown reference choice");
}

}  // namespace

IdentityResult evaluate_identity(const ScenarioContext& ctx, IdentityId id,
                                 const CatalogParams& params,
                                 const Tolerances& tol) {
  Evaluator evaluator(ctx, params, tol);
  return evaluator.evaluate(id);
}

IdentityResult evaluate_identity(const ScenarioContext& ctx, IdentityId id,
                                 const Tolerances& tol) {
  return evaluate_identity(ctx, id, CatalogParams::from_scenario(ctx.scenario),
                           tol);
}

std::vector<IdentityResult> evaluate_catalog(
    const ScenarioContext& ctx, const std::vector<double>& lambdas,
    const std::vector<double>& betas,
    const std::vector<ReferenceChoice>& references, const Tolerances& tol) {
  if (lambdas.empty() || betas.empty() || references.empty()) {
    throw EmptyList("evaluate_catalog: parameter lists must be nonempty");
  }
  std::vector<IdentityResult> results;
  const CatalogParams base = CatalogParams::from_scenario(ctx.scenario);
  for (IdentityId id : all_identities()) {
    if (is_model_side(id)) {
      for (double lambda : lambdas) {
        for (ReferenceChoice choice : references) {
          CatalogParams params = base;
          params.lambda = lambda;
          params.reference_q = make_model_reference(ctx, choice);
          results.push_back(evaluate_identity(ctx, id, params, tol));
        }
      }
    } else if (is_data_side(id)) {
      for (double beta : betas) {
        for (ReferenceChoice choice : references) {
          CatalogParams params = base;
          params.beta = beta;
          params.reference_ps = make_datapoint_reference(ctx, choice);
          results.push_back(evaluate_identity(ctx, id, params, tol));
        }
      }
    } else {
      results.push_back(evaluate_identity(ctx, id, base, tol));
    }
  }
  return results;
}

std::vector<Triangle> pythagorean_triangles(const ScenarioContext& ctx,
                                            const CatalogParams& params) {
  std::vector<Triangle> out;
  const DatasetSpace& space = ctx.joint.dataset_space;
  const LossTable& loss = ctx.scenario.loss;
  const FiniteMeasure& pzn = ctx.joint.p_datasets;
  const FiniteMeasure& pt = ctx.joint.p_theta;

  std::map<std::size_t, FiniteMeasure> g;
  for (const auto& [z, lz] : pzn.log_masses()) {
    (void)lz;
    g.emplace(z, gibbs_posterior(GibbsSpec{params.reference_q, params.lambda},
                                 space, loss, z));
  }

  auto ez = [&](auto&& f) {
    double acc = 0.0;
    for (const auto& [z, lz] : pzn.log_masses()) acc += std::exp(lz) * f(z);
    return acc;
  };
  auto eth = [&](auto&& f) {
    double acc = 0.0;
    for (const auto& [th, lt] : pt.log_masses()) acc += std::exp(lt) * f(th);
    return acc;
  };

  const double leg_prior = ez([&](std::size_t z) {
    return relative_entropy(pt, g.at(z));
  });
  const double leg_mi = mutual_information(ctx.scenario.algorithm, pzn);
  double cross = 0.0;
  for (const auto& [z, lz] : pzn.log_masses()) {
    double inner = 0.0;
    for (const auto& [u, lu] : pzn.log_masses()) {
      inner += std::exp(lu) * relative_entropy(ctx.scenario.algorithm.row(u),
                                               g.at(z));
    }
    cross += std::exp(lz) * inner;
  }
  out.push_back({"algorithm_lemma", leg_prior, leg_mi, cross});
  out.push_back({"algorithm_generror", leg_prior, leg_mi,
                 ctx.oracle / params.lambda + ez([&](std::size_t z) {
                   return relative_entropy(ctx.scenario.algorithm.row(z), g.at(z));
                 })});

  {
    Kernel gibbs_kernel(space.space_id(), space.size(), g);
    const double gerr = gen_error_direct(space, loss, gibbs_kernel, pzn);
    out.push_back({"gibbs_self", lautum_information(gibbs_kernel, pzn),
                   mutual_information(gibbs_kernel, pzn), gerr / params.lambda});
  }

  std::map<std::size_t, FiniteMeasure> w;
  for (const auto& [th, lt] : pt.log_masses()) {
    (void)lt;
    w.emplace(th, wcdg_measure(WcdgSpec{params.reference_ps, params.beta},
                               loss, th));
  }
  const double leg_pz = eth([&](std::size_t th) {
    return relative_entropy(ctx.scenario.p_z_single, w.at(th));
  });
  const double leg_mi_data = mutual_information(ctx.joint.per_sample, pt);
  double cross_data = 0.0;
  for (const auto& [th, lt] : pt.log_masses()) {
    const FiniteMeasure& ps = ctx.joint.per_sample.row(th);
    double inner = 0.0;
    for (const auto& [nu, ln] : pt.log_masses()) {
      inner += std::exp(ln) * relative_entropy(ps, w.at(nu));
    }
    cross_data += std::exp(lt) * inner;
  }
  out.push_back({"data_lemma", leg_pz, leg_mi_data, cross_data});
  out.push_back({"data_generror", leg_pz, leg_mi_data,
                 eth([&](std::size_t th) {
                   return relative_entropy(ctx.joint.per_sample.row(th), w.at(th));
                 }) - ctx.oracle / params.beta});
  return out;
}

}  // namespace gaplab
