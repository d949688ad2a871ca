#include "mdlsel/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <string>

#include "mdlsel/errors.hpp"

#if defined(__aarch64__)
#include <arm_neon.h>
#endif

#if defined(__x86_64__) && defined(__GNUC__)
#define MDLSEL_HAVE_AVX2_BUILD 1
#include <immintrin.h>
#else
#define MDLSEL_HAVE_AVX2_BUILD 0
#endif

namespace mdlsel::kernels {

// ---------------------------------------------------------------- scalar --

namespace scalar {

double dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double nrm2sq(const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * a[i];
  return acc;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace scalar

// ------------------------------------------------------------------ avx2 --

#if MDLSEL_HAVE_AVX2_BUILD

namespace avx2 {

__attribute__((target("avx2,fma"))) double dot(const double* a,
                                               const double* b,
                                               std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  acc0 = _mm256_add_pd(acc0, acc1);
  alignas(32) double lane[4];
  _mm256_store_pd(lane, acc0);
  double acc = (lane[0] + lane[1]) + (lane[2] + lane[3]);
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

__attribute__((target("avx2,fma"))) double nrm2sq(const double* a, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256d v0 = _mm256_loadu_pd(a + i);
    __m256d v1 = _mm256_loadu_pd(a + i + 4);
    acc0 = _mm256_fmadd_pd(v0, v0, acc0);
    acc1 = _mm256_fmadd_pd(v1, v1, acc1);
  }
  for (; i + 4 <= n; i += 4) {
    __m256d v0 = _mm256_loadu_pd(a + i);
    acc0 = _mm256_fmadd_pd(v0, v0, acc0);
  }
  acc0 = _mm256_add_pd(acc0, acc1);
  alignas(32) double lane[4];
  _mm256_store_pd(lane, acc0);
  double acc = (lane[0] + lane[1]) + (lane[2] + lane[3]);
  for (; i < n; ++i) acc += a[i] * a[i];
  return acc;
}

__attribute__((target("avx2,fma"))) void axpy(double alpha, const double* x,
                                              double* y, std::size_t n) {
  __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace avx2

#endif  // MDLSEL_HAVE_AVX2_BUILD

// ------------------------------------------------------------------ neon --

#if defined(__aarch64__)

namespace neon {

double dot(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  for (; i + 2 <= n; i += 2) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
  }
  double acc = vaddvq_f64(acc0) + vaddvq_f64(acc1);
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double nrm2sq(const double* a, std::size_t n) { return dot(a, a, n); }

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t vy = vld1q_f64(y + i);
    vy = vfmaq_f64(vy, va, vld1q_f64(x + i));
    vst1q_f64(y + i, vy);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace neon

#endif  // __aarch64__

// -------------------------------------------------------------- dispatch --

namespace {

struct Backend {
  const char* name;
  double (*dot)(const double*, const double*, std::size_t);
  double (*nrm2sq)(const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
};

constexpr Backend kScalar{"scalar", &scalar::dot, &scalar::nrm2sq, &scalar::axpy};

#if MDLSEL_HAVE_AVX2_BUILD
constexpr Backend kAvx2{"avx2", &avx2::dot, &avx2::nrm2sq, &avx2::axpy};
#endif
#if defined(__aarch64__)
constexpr Backend kNeon{"neon", &neon::dot, &neon::nrm2sq, &neon::axpy};
#endif

const Backend* lookup(const char* name) {
  if (std::strcmp(name, "scalar") == 0) return &kScalar;
#if MDLSEL_HAVE_AVX2_BUILD
  if (std::strcmp(name, "avx2") == 0) {
    if (!__builtin_cpu_supports("avx2")) return nullptr;
    return &kAvx2;
  }
#endif
#if defined(__aarch64__)
  if (std::strcmp(name, "neon") == 0) return &kNeon;
#endif
  return nullptr;
}

const Backend* pick_default() {
  if (const char* env = std::getenv("MDLSEL_KERNELS")) {
    if (const Backend* b = lookup(env)) return b;
    // An unusable env request falls back to scalar rather than crashing
    // before main() has a chance to report anything.
    return &kScalar;
  }
#if MDLSEL_HAVE_AVX2_BUILD
  if (__builtin_cpu_supports("avx2")) return &kAvx2;
#endif
#if defined(__aarch64__)
  return &kNeon;
#endif
  return &kScalar;
}

std::atomic<const Backend*> g_backend{nullptr};

const Backend* backend() {
  const Backend* b = g_backend.load(std::memory_order_acquire);
  if (b == nullptr) {
    b = pick_default();
    g_backend.store(b, std::memory_order_release);
  }
  return b;
}

}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
  return backend()->dot(a, b, n);
}

double nrm2sq(const double* a, std::size_t n) { return backend()->nrm2sq(a, n); }

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  backend()->axpy(alpha, x, y, n);
}

const char* active_backend() { return backend()->name; }

void force_backend(const char* name) {
  const Backend* b = lookup(name);
  if (b == nullptr) {
    throw DomainError(std::string("kernel backend unavailable: ") + name);
  }
  g_backend.store(b, std::memory_order_release);
}

}  // namespace mdlsel::kernels
