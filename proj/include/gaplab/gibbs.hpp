#pragma once

#include "gaplab/learning.hpp"
#include "gaplab/measures.hpp"

namespace gaplab {

// Parameters of a Gibbs algorithm: a reference measure over models
// (probability or counting) and a temperature. On a finite model space the
// log-partition function is finite for every real argument, so the admissible
// temperature set is all of (0, inf) and only positivity is checked.
struct GibbsSpec {
  FiniteMeasure reference;
  double lambda;

  void validate() const;
};

// K_{Q,z}(t) = log sum_theta Q(theta) exp(t L(z, theta)); nondecreasing and
// convex in t.
double log_partition(const GibbsSpec& spec, const DatasetSpace& space,
                     const LossTable& loss, std::size_t z, double t);

// The Gibbs posterior: log-mass(theta) = log Q(theta) - L(z,theta)/lambda
// - K_{Q,z}(-1/lambda). Support equals the reference support.
FiniteMeasure gibbs_posterior(const GibbsSpec& spec, const DatasetSpace& space,
                              const LossTable& loss, std::size_t z);

// R_z(P1) - R_z(P2): the algorithm-driven gap, evaluated directly.
double gap_algorithm_direct(const DatasetSpace& space, const LossTable& loss,
                            std::size_t z, const FiniteMeasure& p1,
                            const FiniteMeasure& p2);

// Closed form for R_z(P) - R_z(Gibbs):
// lambda ( D(G||Q) + D(P||G) - D(P||Q) ).
double gap_from_gibbs(const DatasetSpace& space, const LossTable& loss,
                      std::size_t z, const FiniteMeasure& p,
                      const GibbsSpec& spec);

// Closed form for R_z(P1) - R_z(P2) with free reference (Q, lambda):
// lambda ( D(P1||G) - D(P2||G) + D(P2||Q) - D(P1||Q) ).
// The value is independent of the admissible (Q, lambda) choice.
double gap_general_closed_form(const DatasetSpace& space, const LossTable& loss,
                               std::size_t z, const FiniteMeasure& p1,
                               const FiniteMeasure& p2, const GibbsSpec& spec);

// Same gap with Q = alpha P1 + (1-alpha) P2, which is admissible even when
// neither measure dominates the other.
double gap_mixture_reference(const DatasetSpace& space, const LossTable& loss,
                             std::size_t z, const FiniteMeasure& p1,
                             const FiniteMeasure& p2, double alpha,
                             double lambda);

}  // namespace gaplab
