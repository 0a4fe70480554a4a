#include "heave/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace heave::kernels {

namespace {

struct Table {
    Backend backend;
    double (*dot)(const double*, const double*, std::size_t);
    void (*axpy)(double, const double*, double*, std::size_t);
    double (*sumsq)(const double*, std::size_t);
    double (*sumsq_diff)(const double*, const double*, std::size_t);
};

constexpr Table kScalar{Backend::scalar, scalar::dot, scalar::axpy,
                        scalar::sumsq, scalar::sumsq_diff};

#if defined(HEAVE_HAVE_AVX2_LANE)
constexpr Table kAvx2{Backend::avx2, avx2::dot, avx2::axpy,
                      avx2::sumsq, avx2::sumsq_diff};

bool cpu_has_avx2() {
#if defined(__GNUC__) || defined(__clang__)
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}
#endif

Table select_table() {
    const char* forced = std::getenv("HEAVE_KERNELS");
#if defined(HEAVE_HAVE_AVX2_LANE)
    if (forced != nullptr && std::strcmp(forced, "scalar") == 0) return kScalar;
    if (cpu_has_avx2()) return kAvx2;
#else
    (void)forced;
#endif
    return kScalar;
}

const Table& table() {
    static const Table t = select_table();
    return t;
}

}  // namespace

Backend active_backend() { return table().backend; }

const char* backend_name() {
    switch (table().backend) {
        case Backend::avx2: return "avx2";
        case Backend::scalar: break;
    }
    return "scalar";
}

double dot(const double* a, const double* b, std::size_t n) {
    return table().dot(a, b, n);
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    table().axpy(alpha, x, y, n);
}

double sumsq(const double* a, std::size_t n) { return table().sumsq(a, n); }

double sumsq_diff(const double* a, const double* b, std::size_t n) {
    return table().sumsq_diff(a, b, n);
}

}  // namespace heave::kernels
