#pragma once

#include <cstddef>
#include <string>

namespace melodikit::kernels {

// Dense inner loops behind the TC-RBM: dot products and rank-1 accumulations
// against the weight tensor, and the logistic / softmax nonlinearities.
// Each kernel has a scalar reference implementation and an AVX2 variant;
// the backend is picked once at runtime from CPU features (override with the
// MELODIKIT_KERNELS environment variable or force_backend()).

enum class Backend { Scalar, Avx2 };

Backend active_backend();
const char *backend_name(Backend b);
bool backend_supported(Backend b);

// Throws ValidationError if the backend is not supported on this CPU.
void force_backend(Backend b);

// sum_i a[i] * b[i]
double dot(const double *a, const double *b, std::size_t n);

// y[i] += alpha * x[i]
void axpy(double alpha, const double *x, double *y, std::size_t n);

// y[i] = 1 / (1 + exp(-x[i]))
void sigmoid(const double *x, double *y, std::size_t n);

// x[i] <- exp(x[i] - max(x)) / sum, in place. Returns nothing; the result
// is a probability vector.
void softmax_inplace(double *x, std::size_t n);

namespace detail {
// Reference implementations; exposed so the equivalence tests can compare
// every backend against them directly.
double dot_scalar(const double *a, const double *b, std::size_t n);
void axpy_scalar(double alpha, const double *x, double *y, std::size_t n);
void sigmoid_scalar(const double *x, double *y, std::size_t n);
void softmax_inplace_scalar(double *x, std::size_t n);

#if defined(__x86_64__) || defined(_M_X64)
double dot_avx2(const double *a, const double *b, std::size_t n);
void axpy_avx2(double alpha, const double *x, double *y, std::size_t n);
void sigmoid_avx2(const double *x, double *y, std::size_t n);
void softmax_inplace_avx2(double *x, std::size_t n);
#endif
} // namespace detail

} // namespace melodikit::kernels
