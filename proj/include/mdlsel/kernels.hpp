#pragma once

#include <cstddef>

// Double-precision vector kernels behind a runtime-dispatched backend.
//
// A scalar reference implementation always exists; on x86-64 an AVX2+FMA
// variant is selected when the CPU supports it, and on aarch64 a NEON
// variant is used.  The backend is picked once at first use and can be
// pinned with the MDLSEL_KERNELS environment variable ("scalar", "avx2",
// "neon") or programmatically via force_backend() (tests use this to check
// that all backends agree).

namespace mdlsel::kernels {

// sum_i a[i] * b[i]
double dot(const double* a, const double* b, std::size_t n);

// sum_i a[i]^2
double nrm2sq(const double* a, std::size_t n);

// y[i] += alpha * x[i]
void axpy(double alpha, const double* x, double* y, std::size_t n);

// Name of the backend currently in use ("scalar", "avx2", "neon").
const char* active_backend();

// Pin a specific backend.  Throws DomainError for an unknown name or a
// backend this build/CPU cannot run.
void force_backend(const char* name);

}  // namespace mdlsel::kernels
