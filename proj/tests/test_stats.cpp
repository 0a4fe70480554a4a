#include <doctest.h>

#include <cmath>

#include "heave/error.hpp"
#include "heave/rng.hpp"
#include "heave/stats.hpp"

using namespace heave;

TEST_CASE("normal quantile against published table values") {
    CHECK(stats::normal_quantile(0.5) == 0.0);
    CHECK(stats::normal_quantile(0.975) == doctest::Approx(1.95996398454).epsilon(1e-9));
    CHECK(stats::normal_quantile(0.95) == doctest::Approx(1.64485362695).epsilon(1e-9));
    CHECK(stats::normal_quantile(0.995) == doctest::Approx(2.57582930355).epsilon(1e-9));
    CHECK(stats::normal_quantile(0.9995) == doctest::Approx(3.29052673149).epsilon(1e-9));
    CHECK(stats::normal_quantile(0.022750131948179195) == doctest::Approx(-2.0).epsilon(1e-9));
    CHECK(stats::normal_quantile(0.8413447460685429) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("normal quantile negates exactly on complement pairs") {
    Rng rng(99);
    for (int i = 0; i < 200; ++i) {
        const double q = 0.5 + 0.4999 * rng.uniform();  // upper half
        const double complement = 1.0 - q;              // exact by Sterbenz
        CHECK(stats::normal_quantile(complement) == -stats::normal_quantile(q));
    }
    const double complement = 1.0 - 0.975;
    CHECK(stats::normal_quantile(complement) == -stats::normal_quantile(0.975));
}

TEST_CASE("normal quantile rejects boundary probabilities") {
    CHECK_THROWS_AS(stats::normal_quantile(0.0), ValidationError);
    CHECK_THROWS_AS(stats::normal_quantile(1.0), ValidationError);
    CHECK_THROWS_AS(stats::normal_quantile(-0.1), ValidationError);
    CHECK_THROWS_AS(stats::normal_quantile(1.5), ValidationError);
}

TEST_CASE("normal quantile round-trips through the normal CDF") {
    // Phi(quantile(q)) == q via erfc-based CDF, to 1e-12.
    const auto normal_cdf = [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); };
    for (const double q : {0.001, 0.01, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99, 0.999, 0.9999999}) {
        CHECK(normal_cdf(stats::normal_quantile(q)) == doctest::Approx(q).epsilon(1e-11));
    }
}

TEST_CASE("student t two-sided p against table values") {
    // t crit for alpha=0.05 two-sided: df=20 -> 2.086, df=10 -> 2.228.
    CHECK(stats::student_t_two_sided_p(2.086, 20.0) == doctest::Approx(0.05).epsilon(2e-3));
    CHECK(stats::student_t_two_sided_p(2.228, 10.0) == doctest::Approx(0.05).epsilon(2e-3));
    CHECK(stats::student_t_two_sided_p(0.0, 5.0) == doctest::Approx(1.0));
    CHECK(stats::student_t_two_sided_p(100.0, 50.0) < 1e-10);
}
