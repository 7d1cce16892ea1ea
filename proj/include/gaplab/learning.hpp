#pragma once

#include <cstddef>
#include <vector>

#include "gaplab/measures.hpp"

namespace gaplab {

// Tabulated nonnegative loss values, one entry per (datapoint, model) pair.
// The label function and the raw loss are collapsed into this composite:
// every formula downstream consumes only the composed values.
class LossTable {
 public:
  LossTable(std::size_t num_datapoints, std::size_t num_models,
            std::vector<double> values);

  static LossTable zero(std::size_t num_datapoints, std::size_t num_models);

  std::size_t num_datapoints() const { return num_datapoints_; }
  std::size_t num_models() const { return num_models_; }

  double operator()(std::size_t datapoint, std::size_t model) const;
  const std::vector<double>& values() const { return values_; }

  bool operator==(const LossTable& other) const = default;

 private:
  std::size_t num_datapoints_;
  std::size_t num_models_;
  std::vector<double> values_;  // row-major [datapoint][model]
};

// Indexing of ordered n-tuples of datapoints. Tuple indices are mixed-radix
// numbers with the last datapoint as the fastest-varying digit.
class DatasetSpace {
 public:
  DatasetSpace(std::size_t num_datapoints, std::size_t n,
               std::size_t cap = kDefaultEnumerationCap);

  std::size_t num_datapoints() const { return num_datapoints_; }
  std::size_t n() const { return n_; }
  std::size_t size() const { return size_; }
  std::string space_id() const;

  std::size_t encode(std::span<const std::size_t> tuple) const;
  std::vector<std::size_t> decode(std::size_t index) const;

  bool operator==(const DatasetSpace& other) const = default;

 private:
  std::size_t num_datapoints_;
  std::size_t n_;
  std::size_t size_;
};

// Space ids shared by every scenario.
inline constexpr const char* kDatapointSpaceId = "datapoints";
inline constexpr const char* kModelSpaceId = "models";

// A complete problem instance: spaces, loss, single-datapoint measure,
// algorithm, temperatures, and the two reference measures.
struct Scenario {
  LossTable loss;
  std::size_t n;
  FiniteMeasure p_z_single;   // over datapoints
  Kernel algorithm;           // models given dataset indices
  double lambda;
  double beta;
  FiniteMeasure reference_q;  // over models; probability or counting
  FiniteMeasure reference_ps; // over datapoints; probability

  DatasetSpace dataset_space() const { return DatasetSpace(loss.num_datapoints(), n); }

  // Throws on any structural violation (missing algorithm rows, bad spaces,
  // negative losses, nonpositive temperatures).
  void validate() const;

  bool operator==(const Scenario& other) const = default;
};

// L(z, theta): arithmetic mean of the n per-datapoint losses.
double empirical_risk(const DatasetSpace& space, const LossTable& loss,
                      std::size_t z, std::size_t theta);

// R_z(P) = sum_theta P(theta) L(z, theta).
double risk_over_models(const DatasetSpace& space, const LossTable& loss,
                        std::size_t z, const FiniteMeasure& p_models);

// R_theta(P) = sum_z P(z) L(z, theta) over a measure on datasets.
double risk_over_datasets(const DatasetSpace& space, const LossTable& loss,
                          std::size_t theta, const FiniteMeasure& p_datasets);

// sum_{(x,y)} P(x,y) loss(x,y,theta) over a single-datapoint measure.
double pointwise_risk(const LossTable& loss, std::size_t theta,
                      const FiniteMeasure& p_datapoints);

// The joint constructions the method of gaps operates on: the i.i.d. dataset
// measure, the model marginal, the Bayes-inverted likelihood over datasets,
// and its per-datapoint marginal. per_sample(theta) is the law of a
// uniformly chosen coordinate of the likelihood, i.e. the average of the n
// coordinate marginals. For exchangeable algorithms (any Gibbs algorithm,
// or n = 1) every coordinate marginal coincides with it; for algorithms
// that treat positions asymmetrically the coordinate marginals differ and
// only the averaged law makes the data-driven identities exact.
struct JointModel {
  DatasetSpace dataset_space;
  FiniteMeasure p_datasets;  // n-fold product of p_z_single
  FiniteMeasure p_theta;     // marginal over models
  Kernel likelihood;         // datasets given models, rows on supp(p_theta)
  Kernel per_sample;         // datapoints given models, rows on supp(p_theta)
};

JointModel build_joint(const Scenario& scenario,
                       std::size_t cap = kDefaultEnumerationCap);

// Marginal of a measure over datasets onto tuple coordinate `position`.
FiniteMeasure coordinate_marginal(const DatasetSpace& space,
                                  const FiniteMeasure& p_datasets,
                                  std::size_t position,
                                  const std::string& datapoint_space_id,
                                  std::size_t num_datapoints);

// Law of a uniformly chosen coordinate: the average of all n coordinate
// marginals.
FiniteMeasure per_sample_marginal(const DatasetSpace& space,
                                  const FiniteMeasure& p_datasets,
                                  const std::string& datapoint_space_id,
                                  std::size_t num_datapoints);

}  // namespace gaplab
