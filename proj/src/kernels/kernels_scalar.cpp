#include <algorithm>
#include <cmath>

#include "melodikit/kernels/kernels.hpp"

namespace melodikit::kernels::detail {

double dot_scalar(const double *a, const double *b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy_scalar(double alpha, const double *x, double *y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void sigmoid_scalar(const double *x, double *y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = 1.0 / (1.0 + std::exp(-x[i]));
}

void softmax_inplace_scalar(double *x, std::size_t n) {
  if (n == 0) return;
  double m = x[0];
  for (std::size_t i = 1; i < n; ++i) m = std::max(m, x[i]);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = std::exp(x[i] - m);
    sum += x[i];
  }
  const double inv = 1.0 / sum;
  for (std::size_t i = 0; i < n; ++i) x[i] *= inv;
}

} // namespace melodikit::kernels::detail
