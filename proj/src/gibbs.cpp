#include "gaplab/gibbs.hpp"

#include <cmath>
#include <utility>

namespace gaplab {

void GibbsSpec::validate() const {
  if (!(lambda > 0.0)) {
    throw InvalidParameter("GibbsSpec: lambda must be positive");
  }
  if (!reference.normalized() && !reference.is_counting()) {
    throw InvalidMeasure("GibbsSpec: reference must be probability or counting");
  }
  if (reference.support_size() == 0) {
    throw EmptySupport("GibbsSpec: reference has empty support");
  }
}

double log_partition(const GibbsSpec& spec, const DatasetSpace& space,
                     const LossTable& loss, std::size_t z, double t) {
  spec.validate();
  std::vector<double> terms;
  terms.reserve(spec.reference.support_size());
  for (const auto& [theta, lq] : spec.reference.log_masses()) {
    terms.push_back(lq + t * empirical_risk(space, loss, z, theta));
  }
  return log_sum_exp(terms);
}

FiniteMeasure gibbs_posterior(const GibbsSpec& spec, const DatasetSpace& space,
                              const LossTable& loss, std::size_t z) {
  spec.validate();
  const double k = log_partition(spec, space, loss, z, -1.0 / spec.lambda);
  std::map<std::size_t, double> logm;
  for (const auto& [theta, lq] : spec.reference.log_masses()) {
    logm.emplace(theta,
                 lq - empirical_risk(space, loss, z, theta) / spec.lambda - k);
  }
  return FiniteMeasure::from_log_weights(spec.reference.space_id(),
                                         spec.reference.space_size(),
                                         std::move(logm));
}

double gap_algorithm_direct(const DatasetSpace& space, const LossTable& loss,
                            std::size_t z, const FiniteMeasure& p1,
                            const FiniteMeasure& p2) {
  return risk_over_models(space, loss, z, p1) -
         risk_over_models(space, loss, z, p2);
}

double gap_from_gibbs(const DatasetSpace& space, const LossTable& loss,
                      std::size_t z, const FiniteMeasure& p,
                      const GibbsSpec& spec) {
  if (!is_absolutely_continuous(p, spec.reference)) {
    throw NotAbsolutelyContinuous("gap_from_gibbs: P not dominated by Q");
  }
  const FiniteMeasure g = gibbs_posterior(spec, space, loss, z);
  return spec.lambda * (relative_entropy(g, spec.reference) +
                        relative_entropy(p, g) -
                        relative_entropy(p, spec.reference));
}

double gap_general_closed_form(const DatasetSpace& space, const LossTable& loss,
                               std::size_t z, const FiniteMeasure& p1,
                               const FiniteMeasure& p2, const GibbsSpec& spec) {
  if (!is_absolutely_continuous(p1, spec.reference) ||
      !is_absolutely_continuous(p2, spec.reference)) {
    throw NotAbsolutelyContinuous(
        "gap_general_closed_form: P1 and P2 must be dominated by Q");
  }
  const FiniteMeasure g = gibbs_posterior(spec, space, loss, z);
  return spec.lambda *
         (relative_entropy(p1, g) - relative_entropy(p2, g) +
          relative_entropy(p2, spec.reference) -
          relative_entropy(p1, spec.reference));
}

double gap_mixture_reference(const DatasetSpace& space, const LossTable& loss,
                             std::size_t z, const FiniteMeasure& p1,
                             const FiniteMeasure& p2, double alpha,
                             double lambda) {
  GibbsSpec spec{convex_combination(p1, p2, alpha), lambda};
  return gap_general_closed_form(space, loss, z, p1, p2, spec);
}

}  // namespace gaplab
