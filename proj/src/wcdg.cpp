#include "gaplab/wcdg.hpp"

#include <cmath>
#include <utility>

namespace gaplab {

void WcdgSpec::validate() const {
  if (!(beta > 0.0)) {
    throw InvalidParameter("WcdgSpec: beta must be positive");
  }
  if (!reference.normalized()) {
    throw InvalidMeasure("WcdgSpec: reference must be a probability measure");
  }
  if (reference.support_size() == 0) {
    throw EmptySupport("WcdgSpec: reference has empty support");
  }
}

double log_mgf(const WcdgSpec& spec, const LossTable& loss, std::size_t theta,
               double t) {
  spec.validate();
  std::vector<double> terms;
  terms.reserve(spec.reference.support_size());
  for (const auto& [a, lp] : spec.reference.log_masses()) {
    terms.push_back(lp + t * loss(a, theta));
  }
  return log_sum_exp(terms);
}

FiniteMeasure wcdg_measure(const WcdgSpec& spec, const LossTable& loss,
                           std::size_t theta) {
  spec.validate();
  const double j = log_mgf(spec, loss, theta, 1.0 / spec.beta);
  std::map<std::size_t, double> logm;
  for (const auto& [a, lp] : spec.reference.log_masses()) {
    logm.emplace(a, lp + loss(a, theta) / spec.beta - j);
  }
  return FiniteMeasure::from_log_weights(spec.reference.space_id(),
                                         spec.reference.space_size(),
                                         std::move(logm));
}

double gap_data_direct(const LossTable& loss, std::size_t theta,
                       const FiniteMeasure& q1, const FiniteMeasure& q2) {
  return pointwise_risk(loss, theta, q1) - pointwise_risk(loss, theta, q2);
}

double gap_from_wcdg(const LossTable& loss, std::size_t theta,
                     const FiniteMeasure& p, const WcdgSpec& spec) {
  if (!is_absolutely_continuous(p, spec.reference)) {
    throw NotAbsolutelyContinuous("gap_from_wcdg: P not dominated by P_S");
  }
  const FiniteMeasure w = wcdg_measure(spec, loss, theta);
  return spec.beta * (relative_entropy(p, spec.reference) -
                      relative_entropy(p, w) -
                      relative_entropy(w, spec.reference));
}

double gap_data_general_closed_form(const LossTable& loss, std::size_t theta,
                                    const FiniteMeasure& p1,
                                    const FiniteMeasure& p2,
                                    const WcdgSpec& spec) {
  if (!is_absolutely_continuous(p1, spec.reference) ||
      !is_absolutely_continuous(p2, spec.reference)) {
    throw NotAbsolutelyContinuous(
        "gap_data_general_closed_form: P1 and P2 must be dominated by P_S");
  }
  const FiniteMeasure w = wcdg_measure(spec, loss, theta);
  return spec.beta *
         (relative_entropy(p2, w) - relative_entropy(p1, w) -
          relative_entropy(p2, spec.reference) +
          relative_entropy(p1, spec.reference));
}

}  // namespace gaplab
