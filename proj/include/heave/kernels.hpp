#pragma once

#include <cstddef>

// Dense inner-loop kernels for the regression and simulation paths.
//
// Every kernel has a scalar reference implementation (namespace
// heave::kernels::scalar) and, on x86-64 with AVX2+FMA, a vectorized
// variant. The active variant is chosen once at startup from CPU
// features; HEAVE_KERNELS=scalar|avx2 in the environment overrides the
// choice (requests for an unsupported backend fall back to scalar).
// The top-level functions dispatch through function pointers, so call
// sites never know which lane they run on. Equivalence of the lanes is
// covered by tests/test_kernels.cpp.

namespace heave::kernels {

enum class Backend { scalar, avx2 };

Backend active_backend();
const char* backend_name();

// sum_i a[i] * b[i]
double dot(const double* a, const double* b, std::size_t n);

// y[i] += alpha * x[i]
void axpy(double alpha, const double* x, double* y, std::size_t n);

// sum_i a[i]^2
double sumsq(const double* a, std::size_t n);

// sum_i (a[i] - b[i])^2
double sumsq_diff(const double* a, const double* b, std::size_t n);

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
double sumsq(const double* a, std::size_t n);
double sumsq_diff(const double* a, const double* b, std::size_t n);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define HEAVE_HAVE_AVX2_LANE 1
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
double sumsq(const double* a, std::size_t n);
double sumsq_diff(const double* a, const double* b, std::size_t n);
}  // namespace avx2
#endif

}  // namespace heave::kernels
