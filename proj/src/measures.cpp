#include "gaplab/measures.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace gaplab {

namespace {
constexpr double kNormalizationTol = 1e-12;
}

double log_sum_exp(std::span<const double> values) {
  if (values.empty()) {
    throw EmptyList("log_sum_exp: empty list");
  }
  const double max_val = *std::max_element(values.begin(), values.end());
  if (values.size() == 1) {
    return max_val;
  }
  double sum = 0.0;
  for (double v : values) {
    sum += std::exp(v - max_val);
  }
  return max_val + std::log(sum);
}

FiniteMeasure::FiniteMeasure(std::string space_id, std::size_t space_size,
                             std::map<std::size_t, double> log_masses,
                             bool normalized)
    : space_id_(std::move(space_id)),
      space_size_(space_size),
      log_masses_(std::move(log_masses)),
      normalized_(normalized) {
  std::vector<double> logs;
  logs.reserve(log_masses_.size());
  for (const auto& [atom, lm] : log_masses_) {
    if (atom >= space_size_) {
      throw IndexOutOfRange("FiniteMeasure: atom index " + std::to_string(atom) +
                            " outside space of size " + std::to_string(space_size_));
    }
    if (!std::isfinite(lm)) {
      throw InvalidMeasure("FiniteMeasure: non-finite log-mass at atom " +
                           std::to_string(atom));
    }
    logs.push_back(lm);
  }
  if (normalized_) {
    if (logs.empty()) {
      throw EmptySupport("FiniteMeasure: normalized measure with empty support");
    }
    const double lse = log_sum_exp(logs);
    if (std::abs(lse) > kNormalizationTol) {
      throw InvalidMeasure("FiniteMeasure: log-sum-exp of masses is " +
                           std::to_string(lse) + ", expected 0");
    }
  }
}

FiniteMeasure FiniteMeasure::from_weights(std::string space_id,
                                          std::span<const double> weights) {
  std::map<std::size_t, double> logw;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double w = weights[i];
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw InvalidMeasure("from_weights: weight must be finite and >= 0");
    }
    if (w > 0.0) {
      logw.emplace(i, std::log(w));
    }
  }
  return from_log_weights(std::move(space_id), weights.size(), std::move(logw));
}

FiniteMeasure FiniteMeasure::from_log_weights(
    std::string space_id, std::size_t space_size,
    std::map<std::size_t, double> log_weights) {
  if (log_weights.empty()) {
    throw EmptySupport("from_log_weights: empty support");
  }
  std::vector<double> logs;
  logs.reserve(log_weights.size());
  for (const auto& [atom, lw] : log_weights) {
    (void)atom;
    logs.push_back(lw);
  }
  const double lse = log_sum_exp(logs);
  for (auto& [atom, lw] : log_weights) {
    (void)atom;
    lw -= lse;
  }
  return FiniteMeasure(std::move(space_id), space_size, std::move(log_weights),
                       /*normalized=*/true);
}

FiniteMeasure FiniteMeasure::point_mass(std::string space_id,
                                        std::size_t space_size,
                                        std::size_t atom) {
  return FiniteMeasure(std::move(space_id), space_size, {{atom, 0.0}},
                       /*normalized=*/true);
}

FiniteMeasure FiniteMeasure::uniform(std::string space_id,
                                     std::size_t space_size) {
  if (space_size == 0) {
    throw EmptySupport("uniform: empty space");
  }
  std::map<std::size_t, double> logm;
  const double lm = -std::log(static_cast<double>(space_size));
  for (std::size_t i = 0; i < space_size; ++i) {
    logm.emplace(i, lm);
  }
  return FiniteMeasure(std::move(space_id), space_size, std::move(logm),
                       /*normalized=*/true);
}

FiniteMeasure FiniteMeasure::counting(std::string space_id,
                                      std::size_t space_size) {
  if (space_size == 0) {
    throw EmptySupport("counting: empty space");
  }
  std::map<std::size_t, double> logm;
  for (std::size_t i = 0; i < space_size; ++i) {
    logm.emplace(i, 0.0);
  }
  return FiniteMeasure(std::move(space_id), space_size, std::move(logm),
                       /*normalized=*/false);
}

bool FiniteMeasure::is_counting() const {
  if (normalized_ || log_masses_.size() != space_size_) {
    return false;
  }
  for (const auto& [atom, lm] : log_masses_) {
    (void)atom;
    if (lm != 0.0) {
      return false;
    }
  }
  return true;
}

double FiniteMeasure::log_mass(std::size_t atom) const {
  auto it = log_masses_.find(atom);
  if (it == log_masses_.end()) {
    throw IndexOutOfRange("log_mass: atom " + std::to_string(atom) +
                          " not in support");
  }
  return it->second;
}

double FiniteMeasure::mass(std::size_t atom) const {
  auto it = log_masses_.find(atom);
  return it == log_masses_.end() ? 0.0 : std::exp(it->second);
}

Kernel::Kernel(std::string condition_space_id, std::size_t condition_space_size,
               std::map<std::size_t, FiniteMeasure> rows)
    : condition_space_id_(std::move(condition_space_id)),
      condition_space_size_(condition_space_size),
      rows_(std::move(rows)) {
  if (rows_.empty()) {
    throw EmptySupport("Kernel: no rows");
  }
  const FiniteMeasure& first = rows_.begin()->second;
  target_space_id_ = first.space_id();
  target_space_size_ = first.space_size();
  for (const auto& [cond, row] : rows_) {
    if (cond >= condition_space_size_) {
      throw IndexOutOfRange("Kernel: condition index " + std::to_string(cond) +
                            " outside space of size " +
                            std::to_string(condition_space_size_));
    }
    if (row.space_id() != target_space_id_ ||
        row.space_size() != target_space_size_) {
      throw SpaceMismatch("Kernel: rows over different target spaces");
    }
    if (!row.normalized()) {
      throw InvalidMeasure("Kernel: row " + std::to_string(cond) +
                           " is not normalized");
    }
  }
}

const FiniteMeasure& Kernel::row(std::size_t condition) const {
  auto it = rows_.find(condition);
  if (it == rows_.end()) {
    throw IndexOutOfRange("Kernel: condition " + std::to_string(condition) +
                          " has no row");
  }
  return it->second;
}

namespace {

void check_same_space(const FiniteMeasure& a, const FiniteMeasure& b,
                      const char* op) {
  if (a.space_id() != b.space_id() || a.space_size() != b.space_size()) {
    throw SpaceMismatch(std::string(op) + ": measures on different spaces (" +
                        a.space_id() + " vs " + b.space_id() + ")");
  }
}

}  // namespace

bool is_absolutely_continuous(const FiniteMeasure& p, const FiniteMeasure& q) {
  check_same_space(p, q, "is_absolutely_continuous");
  for (const auto& [atom, lm] : p.log_masses()) {
    (void)lm;
    if (!q.contains(atom)) {
      return false;
    }
  }
  return true;
}

std::map<std::size_t, double> radon_nikodym(const FiniteMeasure& p,
                                            const FiniteMeasure& q) {
  if (!is_absolutely_continuous(p, q)) {
    throw NotAbsolutelyContinuous("radon_nikodym: support(P) not within support(Q)");
  }
  std::map<std::size_t, double> density;
  for (const auto& [atom, lp] : p.log_masses()) {
    density.emplace(atom, lp - q.log_mass(atom));
  }
  return density;
}

double relative_entropy(const FiniteMeasure& p2, const FiniteMeasure& p1) {
  check_same_space(p2, p1, "relative_entropy");
  if (!p2.normalized()) {
    throw InvalidMeasure("relative_entropy: P2 must be a probability measure");
  }
  if (!p1.normalized() && !p1.is_counting()) {
    throw InvalidMeasure(
        "relative_entropy: P1 must be a probability measure or the counting "
        "measure");
  }
  double sum = 0.0;
  for (const auto& [atom, lp2] : p2.log_masses()) {
    auto it = p1.log_masses().find(atom);
    if (it == p1.log_masses().end()) {
      throw NotAbsolutelyContinuous(
          "relative_entropy: support(P2) not within support(P1)");
    }
    sum += std::exp(lp2) * (lp2 - it->second);
  }
  return sum;
}

FiniteMeasure marginalize(const Kernel& kernel, const FiniteMeasure& prior) {
  if (prior.space_id() != kernel.condition_space_id() ||
      prior.space_size() != kernel.condition_space_size()) {
    throw SpaceMismatch("marginalize: prior not on the kernel's condition space");
  }
  if (!prior.normalized()) {
    throw InvalidMeasure("marginalize: prior must be a probability measure");
  }
  // log m(a) = LSE_n [ log prior(n) + log row_n(a) ]
  std::map<std::size_t, std::vector<double>> terms;
  for (const auto& [cond, lp] : prior.log_masses()) {
    const FiniteMeasure& row = kernel.row(cond);
    for (const auto& [atom, lr] : row.log_masses()) {
      terms[atom].push_back(lp + lr);
    }
  }
  std::map<std::size_t, double> logm;
  for (const auto& [atom, ts] : terms) {
    logm.emplace(atom, log_sum_exp(ts));
  }
  return FiniteMeasure::from_log_weights(kernel.target_space_id(),
                                         kernel.target_space_size(),
                                         std::move(logm));
}

double mutual_information(const Kernel& kernel, const FiniteMeasure& prior) {
  const FiniteMeasure marginal = marginalize(kernel, prior);
  double sum = 0.0;
  for (const auto& [cond, lp] : prior.log_masses()) {
    // Row support lies inside the mixture's support by construction.
    sum += std::exp(lp) * relative_entropy(kernel.row(cond), marginal);
  }
  return sum;
}

double lautum_information(const Kernel& kernel, const FiniteMeasure& prior) {
  const FiniteMeasure marginal = marginalize(kernel, prior);
  double sum = 0.0;
  for (const auto& [cond, lp] : prior.log_masses()) {
    sum += std::exp(lp) * relative_entropy(marginal, kernel.row(cond));
  }
  return sum;
}

BayesInversion bayes_invert(const Kernel& kernel, const FiniteMeasure& prior) {
  FiniteMeasure marginal = marginalize(kernel, prior);
  // log row_m(n) = log K(n)(m) + log prior(n) - log marginal(m)
  std::map<std::size_t, std::map<std::size_t, double>> inverted;
  for (const auto& [cond, lp] : prior.log_masses()) {
    const FiniteMeasure& row = kernel.row(cond);
    for (const auto& [atom, lr] : row.log_masses()) {
      inverted[atom].emplace(cond, lr + lp - marginal.log_mass(atom));
    }
  }
  std::map<std::size_t, FiniteMeasure> rows;
  for (auto& [atom, logw] : inverted) {
    rows.emplace(atom,
                 FiniteMeasure::from_log_weights(prior.space_id(),
                                                 prior.space_size(),
                                                 std::move(logw)));
  }
  Kernel posterior(kernel.target_space_id(), kernel.target_space_size(),
                   std::move(rows));
  return BayesInversion{std::move(posterior), std::move(marginal)};
}

std::string tuple_space_id(const std::string& base_id, std::size_t n) {
  return base_id + "^" + std::to_string(n);
}

FiniteMeasure product_measure(const FiniteMeasure& p, std::size_t n,
                              std::size_t cap) {
  if (n == 0) {
    throw InvalidParameter("product_measure: n must be positive");
  }
  if (!p.normalized()) {
    throw InvalidMeasure("product_measure: base measure must be normalized");
  }
  // |support|^n tuples are enumerated; indices are computed in base
  // space_size with the last component fastest-varying.
  double tuples = 1.0;
  for (std::size_t t = 0; t < n; ++t) {
    tuples *= static_cast<double>(p.support_size());
    if (tuples > static_cast<double>(cap)) {
      throw EnumerationCapExceeded("product_measure: |support|^n exceeds cap of " +
                                   std::to_string(cap));
    }
  }
  std::vector<std::pair<std::size_t, double>> atoms(p.log_masses().begin(),
                                                    p.log_masses().end());
  const std::size_t base = p.space_size();
  std::map<std::size_t, double> logm;
  std::vector<std::size_t> digit(n, 0);
  while (true) {
    std::size_t index = 0;
    double lm = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      index = index * base + atoms[digit[t]].first;
      lm += atoms[digit[t]].second;
    }
    logm.emplace(index, lm);
    // odometer increment, last position fastest
    std::size_t t = n;
    while (t > 0) {
      --t;
      if (++digit[t] < atoms.size()) {
        break;
      }
      digit[t] = 0;
      if (t == 0) {
        std::size_t total = 1;
        for (std::size_t k = 0; k < n; ++k) {
          total *= base;
        }
        return FiniteMeasure::from_log_weights(tuple_space_id(p.space_id(), n),
                                               total, std::move(logm));
      }
    }
  }
}

FiniteMeasure convex_combination(const FiniteMeasure& p1,
                                 const FiniteMeasure& p2, double alpha) {
  check_same_space(p1, p2, "convex_combination");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw AlphaOutOfRange("convex_combination: alpha must lie in (0, 1)");
  }
  if (!p1.normalized() || !p2.normalized()) {
    throw InvalidMeasure("convex_combination: both measures must be normalized");
  }
  const double la = std::log(alpha);
  const double lb = std::log1p(-alpha);
  std::map<std::size_t, double> logm;
  for (const auto& [atom, lm] : p1.log_masses()) {
    logm.emplace(atom, la + lm);
  }
  for (const auto& [atom, lm] : p2.log_masses()) {
    auto [it, inserted] = logm.emplace(atom, lb + lm);
    if (!inserted) {
      const double terms[2] = {it->second, lb + lm};
      it->second = log_sum_exp(terms);
    }
  }
  return FiniteMeasure::from_log_weights(p1.space_id(), p1.space_size(),
                                         std::move(logm));
}

}  // namespace gaplab
