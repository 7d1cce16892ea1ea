#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "gaplab/errors.hpp"

namespace gaplab {

inline constexpr std::size_t kDefaultEnumerationCap = 20000;

// log(sum_i exp(v[i])) computed by max-shift. Exact for a single element.
double log_sum_exp(std::span<const double> values);

// A measure with finitely many atoms on an indexed finite set. Atoms are
// dense integers 0..space_size-1; the map holds natural-log masses and an
// atom of zero mass is simply absent (support = key set). A normalized
// measure is a probability measure; the one supported unnormalized case is
// the counting measure (every atom present with log-mass 0).
class FiniteMeasure {
 public:
  FiniteMeasure(std::string space_id, std::size_t space_size,
                std::map<std::size_t, double> log_masses, bool normalized);

  // Probability measure from nonnegative weights (normalizes, drops zeros).
  static FiniteMeasure from_weights(std::string space_id,
                                    std::span<const double> weights);

  // Probability measure from log-weights; shifts by log-sum-exp so the
  // stored masses sum to one.
  static FiniteMeasure from_log_weights(std::string space_id,
                                        std::size_t space_size,
                                        std::map<std::size_t, double> log_weights);

  static FiniteMeasure point_mass(std::string space_id, std::size_t space_size,
                                  std::size_t atom);
  static FiniteMeasure uniform(std::string space_id, std::size_t space_size);
  static FiniteMeasure counting(std::string space_id, std::size_t space_size);

  const std::string& space_id() const { return space_id_; }
  std::size_t space_size() const { return space_size_; }
  bool normalized() const { return normalized_; }
  bool is_counting() const;

  const std::map<std::size_t, double>& log_masses() const { return log_masses_; }
  std::size_t support_size() const { return log_masses_.size(); }
  bool contains(std::size_t atom) const { return log_masses_.count(atom) != 0; }

  // Log-mass of an atom in the support; IndexOutOfRange otherwise.
  double log_mass(std::size_t atom) const;

  // Linear-domain mass; zero for atoms outside the support.
  double mass(std::size_t atom) const;

  bool operator==(const FiniteMeasure& other) const = default;

 private:
  std::string space_id_;
  std::size_t space_size_;
  std::map<std::size_t, double> log_masses_;
  bool normalized_;
};

// A finite family of probability measures over one target space, indexed by
// a conditioning set. Rows exist exactly for the declared condition support.
class Kernel {
 public:
  Kernel(std::string condition_space_id, std::size_t condition_space_size,
         std::map<std::size_t, FiniteMeasure> rows);

  const std::string& condition_space_id() const { return condition_space_id_; }
  std::size_t condition_space_size() const { return condition_space_size_; }
  const std::string& target_space_id() const { return target_space_id_; }
  std::size_t target_space_size() const { return target_space_size_; }

  const std::map<std::size_t, FiniteMeasure>& rows() const { return rows_; }
  bool has_row(std::size_t condition) const { return rows_.count(condition) != 0; }

  // Row for a condition in the declared support; IndexOutOfRange otherwise.
  const FiniteMeasure& row(std::size_t condition) const;

  bool operator==(const Kernel& other) const = default;

 private:
  std::string condition_space_id_;
  std::size_t condition_space_size_;
  std::string target_space_id_;
  std::size_t target_space_size_;
  std::map<std::size_t, FiniteMeasure> rows_;
};

// true iff support(p) is contained in support(q). SpaceMismatch if the
// measures live on different spaces.
bool is_absolutely_continuous(const FiniteMeasure& p, const FiniteMeasure& q);

// Log-densities log dP/dQ on support(p). Atoms of Q outside support(p) carry
// density zero and are absent from the result.
std::map<std::size_t, double> radon_nikodym(const FiniteMeasure& p,
                                            const FiniteMeasure& q);

// D(p2 || p1) in nats, with the convention 0 log 0 = 0. Requires p2 and p1
// normalized, or p1 the counting measure (in which case the value is the
// negative Shannon entropy of p2). A support violation is an error, never
// +infinity.
double relative_entropy(const FiniteMeasure& p2, const FiniteMeasure& p1);

// Mixture measure sum_n prior(n) * rows(n).
FiniteMeasure marginalize(const Kernel& kernel, const FiniteMeasure& prior);

// I(K; prior) = E_prior[ D(row || marginal) ].
double mutual_information(const Kernel& kernel, const FiniteMeasure& prior);

// L(K; prior) = E_prior[ D(marginal || row) ]. Requires every row in the
// prior's support to cover the marginal's support.
double lautum_information(const Kernel& kernel, const FiniteMeasure& prior);

struct BayesInversion {
  Kernel posterior;        // conditions over the original target space
  FiniteMeasure marginal;  // marginal over the original target space
};

// Inverts P(m|n) against prior(n): rows of the result are P(n|m), defined
// exactly on the support of the induced marginal over m.
BayesInversion bayes_invert(const Kernel& kernel, const FiniteMeasure& prior);

// n-fold i.i.d. product over the tuple space, atoms indexed in mixed radix
// with the last datapoint as the fastest-varying digit.
FiniteMeasure product_measure(const FiniteMeasure& p, std::size_t n,
                              std::size_t cap = kDefaultEnumerationCap);

// Space id used for n-fold tuple spaces.
std::string tuple_space_id(const std::string& base_id, std::size_t n);

// alpha * p1 + (1 - alpha) * p2, alpha in (0, 1).
FiniteMeasure convex_combination(const FiniteMeasure& p1,
                                 const FiniteMeasure& p2, double alpha);

}  // namespace gaplab
