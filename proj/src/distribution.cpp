#include "melodikit/distribution.hpp"

#include <cmath>
#include <cstdlib>

#include "melodikit/errors.hpp"

namespace melodikit {

void CategoricalDistribution::validate(double tol) const {
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0)) throw ValidationError("distribution has a negative or NaN entry");
    sum += p;
  }
  if (std::abs(sum - 1.0) > tol) {
    throw ValidationError("distribution does not sum to 1 (sum = " + std::to_string(sum) + ")");
  }
}

double linf_distance(const CategoricalDistribution &a, const CategoricalDistribution &b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double tv_distance(const CategoricalDistribution &a, const CategoricalDistribution &b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return 0.5 * s;
}

} // namespace melodikit
