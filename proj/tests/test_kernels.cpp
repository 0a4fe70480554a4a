#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "heave/kernels.hpp"
#include "heave/rng.hpp"

using namespace heave;

namespace {

std::vector<double> random_vec(std::size_t n, Rng& rng) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.normal();
    return v;
}

const std::vector<std::size_t> kSizes = {0, 1, 2, 3, 4, 5, 7, 8, 15, 16, 17, 31, 64, 100, 1023};

}  // namespace

TEST_CASE("kernel lanes agree: dot") {
    Rng rng(42);
    for (const std::size_t n : kSizes) {
        const auto a = random_vec(n, rng);
        const auto b = random_vec(n, rng);
        const double reference = kernels::scalar::dot(a.data(), b.data(), n);
        const double active = kernels::dot(a.data(), b.data(), n);
        CHECK(active == doctest::Approx(reference).epsilon(1e-12));
    }
}

TEST_CASE("kernel lanes agree: sumsq and sumsq_diff") {
    Rng rng(43);
    for (const std::size_t n : kSizes) {
        const auto a = random_vec(n, rng);
        const auto b = random_vec(n, rng);
        CHECK(kernels::sumsq(a.data(), n) ==
              doctest::Approx(kernels::scalar::sumsq(a.data(), n)).epsilon(1e-12));
        CHECK(kernels::sumsq_diff(a.data(), b.data(), n) ==
              doctest::Approx(kernels::scalar::sumsq_diff(a.data(), b.data(), n)).epsilon(1e-12));
    }
}

TEST_CASE("kernel lanes agree: axpy") {
    Rng rng(44);
    for (const std::size_t n : kSizes) {
        const auto x = random_vec(n, rng);
        auto y1 = random_vec(n, rng);
        auto y2 = y1;
        const double alpha = rng.normal();
        kernels::axpy(alpha, x.data(), y1.data(), n);
        kernels::scalar::axpy(alpha, x.data(), y2.data(), n);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(y1[i] == doctest::Approx(y2[i]).epsilon(1e-12));
        }
    }
}

TEST_CASE("kernels are exact on small integers") {
    // Integer-valued inputs below 2^26 accumulate without rounding, so
    // both lanes must agree bit for bit.
    std::vector<double> a, b;
    for (int i = 0; i < 57; ++i) {
        a.push_back(static_cast<double>(i % 13 - 6));
        b.push_back(static_cast<double>((i * 7) % 11 - 5));
    }
    CHECK(kernels::dot(a.data(), b.data(), a.size()) ==
          kernels::scalar::dot(a.data(), b.data(), a.size()));
    CHECK(kernels::sumsq(a.data(), a.size()) == kernels::scalar::sumsq(a.data(), a.size()));
}

TEST_CASE("backend name is consistent with the enum") {
    const std::string name = kernels::backend_name();
    if (kernels::active_backend() == kernels::Backend::avx2) CHECK(name == "avx2");
    else CHECK(name == "scalar");
}
