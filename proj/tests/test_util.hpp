#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "gaplab/harness.hpp"
#include "gaplab/rng.hpp"

namespace gaplab::testutil {

inline std::vector<double> random_weights(SplitMix64& rng, std::size_t count) {
  std::vector<double> w(count);
  for (double& x : w) {
    x = 1e-3 + rng.next_unit();
  }
  return w;
}

inline FiniteMeasure random_measure(SplitMix64& rng, const std::string& space_id,
                                    std::size_t size) {
  return FiniteMeasure::from_weights(space_id, random_weights(rng, size));
}

inline Kernel random_kernel(SplitMix64& rng, const std::string& cond_space,
                            std::size_t cond_size, const std::string& target_space,
                            std::size_t target_size) {
  std::map<std::size_t, FiniteMeasure> rows;
  for (std::size_t c = 0; c < cond_size; ++c) {
    rows.emplace(c, random_measure(rng, target_space, target_size));
  }
  return Kernel(cond_space, cond_size, std::move(rows));
}

inline Scenario random_scenario(std::uint64_t seed) {
  return generate_scenario(seed, DimRanges{}, GenerationMode::FullSupport);
}

inline std::vector<double> linear_masses(const FiniteMeasure& p) {
  std::vector<double> out(p.space_size(), 0.0);
  for (const auto& [atom, lm] : p.log_masses()) {
    out[atom] = std::exp(lm);
  }
  return out;
}

}  // namespace gaplab::testutil
