#pragma once

#include <cstddef>
#include <vector>

#include "melodikit/rng.hpp"

namespace melodikit {

// Probability vector over the symbol alphabet; the currency of all
// prediction APIs. Entries are nonnegative and sum to 1 (within 1e-12).
struct CategoricalDistribution {
  std::vector<double> probs;

  CategoricalDistribution() = default;
  explicit CategoricalDistribution(std::vector<double> p) : probs(std::move(p)) {}
  static CategoricalDistribution uniform(std::size_t n) {
    return CategoricalDistribution(std::vector<double>(n, 1.0 / static_cast<double>(n)));
  }

  std::size_t size() const { return probs.size(); }
  double operator[](std::size_t i) const { return probs[i]; }

  // Throws ValidationError if entries are negative or do not sum to 1.
  void validate(double tol = 1e-12) const;

  std::size_t sample(Rng &rng) const {
    return rng.categorical(probs.data(), probs.size());
  }
};

// L-infinity distance between two probability vectors of equal length.
double linf_distance(const CategoricalDistribution &a, const CategoricalDistribution &b);

// Total variation distance, 0.5 * sum |a_i - b_i|.
double tv_distance(const CategoricalDistribution &a, const CategoricalDistribution &b);

} // namespace melodikit
