#include "gaplab/learning.hpp"

#include <cmath>
#include <utility>

namespace gaplab {

LossTable::LossTable(std::size_t num_datapoints, std::size_t num_models,
                     std::vector<double> values)
    : num_datapoints_(num_datapoints),
      num_models_(num_models),
      values_(std::move(values)) {
  if (num_datapoints_ == 0 || num_models_ == 0) {
    throw InvalidParameter("LossTable: empty datapoint or model space");
  }
  if (values_.size() != num_datapoints_ * num_models_) {
    throw InvalidParameter("LossTable: expected " +
                           std::to_string(num_datapoints_ * num_models_) +
                           " entries, got " + std::to_string(values_.size()));
  }
  for (double v : values_) {
    if (!std::isfinite(v) || v < 0.0) {
      throw InvalidParameter("LossTable: entries must be finite and >= 0");
    }
  }
}

LossTable LossTable::zero(std::size_t num_datapoints, std::size_t num_models) {
  return LossTable(num_datapoints, num_models,
                   std::vector<double>(num_datapoints * num_models, 0.0));
}

double LossTable::operator()(std::size_t datapoint, std::size_t model) const {
  if (datapoint >= num_datapoints_ || model >= num_models_) {
    throw IndexOutOfRange("LossTable: index out of range");
  }
  return values_[datapoint * num_models_ + model];
}

DatasetSpace::DatasetSpace(std::size_t num_datapoints, std::size_t n,
                           std::size_t cap)
    : num_datapoints_(num_datapoints), n_(n) {
  if (num_datapoints_ == 0 || n_ == 0) {
    throw InvalidParameter("DatasetSpace: num_datapoints and n must be positive");
  }
  double size = 1.0;
  for (std::size_t t = 0; t < n_; ++t) {
    size *= static_cast<double>(num_datapoints_);
    if (size > static_cast<double>(cap)) {
      throw EnumerationCapExceeded("DatasetSpace: " +
                                   std::to_string(num_datapoints_) + "^" +
                                   std::to_string(n_) + " exceeds cap of " +
                                   std::to_string(cap));
    }
  }
  size_ = static_cast<std::size_t>(size);
}

std::string DatasetSpace::space_id() const {
  return tuple_space_id(kDatapointSpaceId, n_);
}

std::size_t DatasetSpace::encode(std::span<const std::size_t> tuple) const {
  if (tuple.size() != n_) {
    throw IndexOutOfRange("encode: tuple length mismatch");
  }
  std::size_t index = 0;
  for (std::size_t t = 0; t < n_; ++t) {
    if (tuple[t] >= num_datapoints_) {
      throw IndexOutOfRange("encode: datapoint index out of range");
    }
    index = index * num_datapoints_ + tuple[t];
  }
  return index;
}

std::vector<std::size_t> DatasetSpace::decode(std::size_t index) const {
  if (index >= size_) {
    throw IndexOutOfRange("decode: dataset index out of range");
  }
  std::vector<std::size_t> tuple(n_);
  for (std::size_t t = n_; t > 0; --t) {
    tuple[t - 1] = index % num_datapoints_;
    index /= num_datapoints_;
  }
  return tuple;
}

void Scenario::validate() const {
  const DatasetSpace space = dataset_space();
  if (p_z_single.space_id() != kDatapointSpaceId ||
      p_z_single.space_size() != loss.num_datapoints()) {
    throw SpaceMismatch("Scenario: p_z_single not on the datapoint space");
  }
  if (!p_z_single.normalized()) {
    throw InvalidMeasure("Scenario: p_z_single must be a probability measure");
  }
  if (algorithm.condition_space_id() != space.space_id() ||
      algorithm.condition_space_size() != space.size()) {
    throw SpaceMismatch("Scenario: algorithm not conditioned on the dataset space");
  }
  if (algorithm.rows().size() != space.size()) {
    throw InvalidMeasure("Scenario: algorithm needs one row per dataset index");
  }
  if (algorithm.target_space_id() != kModelSpaceId ||
      algorithm.target_space_size() != loss.num_models()) {
    throw SpaceMismatch("Scenario: algorithm rows not on the model space");
  }
  if (!(lambda > 0.0) || !(beta > 0.0)) {
    throw InvalidParameter("Scenario: lambda and beta must be positive");
  }
  if (reference_q.space_id() != kModelSpaceId ||
      reference_q.space_size() != loss.num_models()) {
    throw SpaceMismatch("Scenario: reference_q not on the model space");
  }
  if (!reference_q.normalized() && !reference_q.is_counting()) {
    throw InvalidMeasure("Scenario: reference_q must be probability or counting");
  }
  if (reference_ps.space_id() != kDatapointSpaceId ||
      reference_ps.space_size() != loss.num_datapoints()) {
    throw SpaceMismatch("Scenario: reference_ps not on the datapoint space");
  }
  if (!reference_ps.normalized()) {
    throw InvalidMeasure("Scenario: reference_ps must be a probability measure");
  }
}

double empirical_risk(const DatasetSpace& space, const LossTable& loss,
                      std::size_t z, std::size_t theta) {
  const std::vector<std::size_t> tuple = space.decode(z);
  double sum = 0.0;
  for (std::size_t a : tuple) {
    sum += loss(a, theta);
  }
  return sum / static_cast<double>(space.n());
}

double risk_over_models(const DatasetSpace& space, const LossTable& loss,
                        std::size_t z, const FiniteMeasure& p_models) {
  if (p_models.space_id() != kModelSpaceId ||
      p_models.space_size() != loss.num_models()) {
    throw SpaceMismatch("risk_over_models: measure not on the model space");
  }
  if (!p_models.normalized()) {
    throw InvalidMeasure("risk_over_models: measure must be normalized");
  }
  double sum = 0.0;
  for (const auto& [theta, lm] : p_models.log_masses()) {
    sum += std::exp(lm) * empirical_risk(space, loss, z, theta);
  }
  return sum;
}

double risk_over_datasets(const DatasetSpace& space, const LossTable& loss,
                          std::size_t theta, const FiniteMeasure& p_datasets) {
  if (p_datasets.space_id() != space.space_id() ||
      p_datasets.space_size() != space.size()) {
    throw SpaceMismatch("risk_over_datasets: measure not on the dataset space");
  }
  if (!p_datasets.normalized()) {
    throw InvalidMeasure("risk_over_datasets: measure must be normalized");
  }
  double sum = 0.0;
  for (const auto& [z, lm] : p_datasets.log_masses()) {
    sum += std::exp(lm) * empirical_risk(space, loss, z, theta);
  }
  return sum;
}

double pointwise_risk(const LossTable& loss, std::size_t theta,
                      const FiniteMeasure& p_datapoints) {
  if (p_datapoints.space_id() != kDatapointSpaceId ||
      p_datapoints.space_size() != loss.num_datapoints()) {
    throw SpaceMismatch("pointwise_risk: measure not on the datapoint space");
  }
  if (!p_datapoints.normalized()) {
    throw InvalidMeasure("pointwise_risk: measure must be normalized");
  }
  double sum = 0.0;
  for (const auto& [a, lm] : p_datapoints.log_masses()) {
    sum += std::exp(lm) * loss(a, theta);
  }
  return sum;
}

FiniteMeasure coordinate_marginal(const DatasetSpace& space,
                                  const FiniteMeasure& p_datasets,
                                  std::size_t position,
                                  const std::string& datapoint_space_id,
                                  std::size_t num_datapoints) {
  if (position >= space.n()) {
    throw IndexOutOfRange("coordinate_marginal: position out of range");
  }
  std::map<std::size_t, std::vector<double>> terms;
  for (const auto& [z, lm] : p_datasets.log_masses()) {
    const std::vector<std::size_t> tuple = space.decode(z);
    terms[tuple[position]].push_back(lm);
  }
  std::map<std::size_t, double> logm;
  for (const auto& [atom, ts] : terms) {
    logm.emplace(atom, log_sum_exp(ts));
  }
  return FiniteMeasure::from_log_weights(datapoint_space_id, num_datapoints,
                                         std::move(logm));
}

FiniteMeasure per_sample_marginal(const DatasetSpace& space,
                                  const FiniteMeasure& p_datasets,
                                  const std::string& datapoint_space_id,
                                  std::size_t num_datapoints) {
  // Law of a uniformly chosen tuple coordinate. For exchangeable measures
  // every coordinate marginal coincides with it.
  const double log_inv_n = -std::log(static_cast<double>(space.n()));
  std::map<std::size_t, std::vector<double>> terms;
  for (const auto& [z, lm] : p_datasets.log_masses()) {
    const std::vector<std::size_t> tuple = space.decode(z);
    for (std::size_t a : tuple) {
      terms[a].push_back(log_inv_n + lm);
    }
  }
  std::map<std::size_t, double> logm;
  for (const auto& [atom, ts] : terms) {
    logm.emplace(atom, log_sum_exp(ts));
  }
  return FiniteMeasure::from_log_weights(datapoint_space_id, num_datapoints,
                                         std::move(logm));
}

JointModel build_joint(const Scenario& scenario, std::size_t cap) {
  scenario.validate();
  DatasetSpace space(scenario.loss.num_datapoints(), scenario.n, cap);
  FiniteMeasure p_datasets = product_measure(scenario.p_z_single, scenario.n, cap);
  BayesInversion inversion = bayes_invert(scenario.algorithm, p_datasets);

  std::map<std::size_t, FiniteMeasure> per_sample_rows;
  for (const auto& [theta, row] : inversion.posterior.rows()) {
    per_sample_rows.emplace(
        theta, per_sample_marginal(space, row, kDatapointSpaceId,
                                   scenario.loss.num_datapoints()));
  }
  Kernel per_sample(kModelSpaceId, scenario.loss.num_models(),
                    std::move(per_sample_rows));

  return JointModel{std::move(space), std::move(p_datasets),
                    std::move(inversion.marginal),
                    std::move(inversion.posterior), std::move(per_sample)};
}

}  // namespace gaplab
