#include <atomic>
#include <cstdlib>
#include <cstring>
#include <string>

#include "melodikit/errors.hpp"
#include "melodikit/kernels/kernels.hpp"

namespace melodikit::kernels {

namespace {

struct Vtable {
  double (*dot)(const double *, const double *, std::size_t);
  void (*axpy)(double, const double *, double *, std::size_t);
  void (*sigmoid)(const double *, double *, std::size_t);
  void (*softmax_inplace)(double *, std::size_t);
};

constexpr Vtable kScalar = {
    detail::dot_scalar,
    detail::axpy_scalar,
    detail::sigmoid_scalar,
    detail::softmax_inplace_scalar,
};

#if defined(__x86_64__) || defined(_M_X64)
constexpr Vtable kAvx2 = {
    detail::dot_avx2,
    detail::axpy_avx2,
    detail::sigmoid_avx2,
    detail::softmax_inplace_avx2,
};
#endif

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const Vtable *table_for(Backend b) {
#if defined(__x86_64__) || defined(_M_X64)
  if (b == Backend::Avx2) return &kAvx2;
#endif
  (void)b;
  return &kScalar;
}

Backend pick_default() {
  if (const char *env = std::getenv("MELODIKIT_KERNELS")) {
    if (std::strcmp(env, "scalar") == 0) return Backend::Scalar;
    if (std::strcmp(env, "avx2") == 0 && cpu_has_avx2()) return Backend::Avx2;
    // "auto" or anything unrecognized falls through to detection.
  }
  return cpu_has_avx2() ? Backend::Avx2 : Backend::Scalar;
}

std::atomic<Backend> g_backend{Backend::Scalar};
std::atomic<const Vtable *> g_table{nullptr};

const Vtable *table() {
  const Vtable *t = g_table.load(std::memory_order_acquire);
  if (t) return t;
  Backend b = pick_default();
  g_backend.store(b, std::memory_order_relaxed);
  t = table_for(b);
  g_table.store(t, std::memory_order_release);
  return t;
}

} // namespace

Backend active_backend() {
  table();
  return g_backend.load(std::memory_order_relaxed);
}

const char *backend_name(Backend b) {
  switch (b) {
    case Backend::Avx2: return "avx2";
    case Backend::Scalar: return "scalar";
  }
  return "scalar";
}

bool backend_supported(Backend b) {
  return b == Backend::Scalar || (b == Backend::Avx2 && cpu_has_avx2());
}

void force_backend(Backend b) {
  if (!backend_supported(b)) {
    throw ValidationError(std::string("kernel backend not supported on this CPU: ") +
                          backend_name(b));
  }
  g_backend.store(b, std::memory_order_relaxed);
  g_table.store(table_for(b), std::memory_order_release);
}

double dot(const double *a, const double *b, std::size_t n) {
  return table()->dot(a, b, n);
}

void axpy(double alpha, const double *x, double *y, std::size_t n) {
  table()->axpy(alpha, x, y, n);
}

void sigmoid(const double *x, double *y, std::size_t n) {
  table()->sigmoid(x, y, n);
}

void softmax_inplace(double *x, std::size_t n) {
  table()->softmax_inplace(x, n);
}

} // namespace melodikit::kernels
