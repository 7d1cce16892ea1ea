#pragma once

#include "gaplab/learning.hpp"
#include "gaplab/measures.hpp"

namespace gaplab {

// Parameters of the worst-case data-generating measure: a probability
// reference over datapoints and the tilt parameter beta. On a finite
// datapoint space the log-MGF is finite everywhere, so the admissible set
// for beta is all of (0, inf) and only positivity is checked.
struct WcdgSpec {
  FiniteMeasure reference;
  double beta;

  void validate() const;
};

// J_{P_S,theta}(t) = log sum_a P_S(a) exp(t loss(a, theta)); convex and
// nondecreasing in t.
double log_mgf(const WcdgSpec& spec, const LossTable& loss, std::size_t theta,
               double t);

// The WCDG measure: log-mass(a) = log P_S(a) + loss(a,theta)/beta
// - J(1/beta). The exponent sign is +loss/beta: mass moves toward high-loss
// datapoints, dual to the Gibbs posterior's -L/lambda.
FiniteMeasure wcdg_measure(const WcdgSpec& spec, const LossTable& loss,
                           std::size_t theta);

// R_theta(Q1) - R_theta(Q2) over single-datapoint measures.
double gap_data_direct(const LossTable& loss, std::size_t theta,
                       const FiniteMeasure& q1, const FiniteMeasure& q2);

// Closed form for R_theta(P) - R_theta(WCDG):
// beta ( D(P||P_S) - D(P||W) - D(W||P_S) ).
double gap_from_wcdg(const LossTable& loss, std::size_t theta,
                     const FiniteMeasure& p, const WcdgSpec& spec);

// Closed form for R_theta(P1) - R_theta(P2) with free reference (P_S, beta):
// beta ( D(P2||W) - D(P1||W) - D(P2||P_S) + D(P1||P_S) ).
double gap_data_general_closed_form(const LossTable& loss, std::size_t theta,
                                    const FiniteMeasure& p1,
                                    const FiniteMeasure& p2,
                                    const WcdgSpec& spec);

}  // namespace gaplab
