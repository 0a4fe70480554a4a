#include <doctest.h>

#include <cmath>

#include "heave/error.hpp"
#include "heave/graph.hpp"
#include "heave/metrics.hpp"
#include "heave/rng.hpp"

using namespace heave;
using graph::Digraph;
using graph::Hierarchy;

namespace {

Digraph random_dag(int n, Rng& rng, double keep = 0.4) {
    Hierarchy h(std::vector<int>(static_cast<std::size_t>(n)));
    for (auto& v : h.levels) v = rng.uniform_int(1, n);
    const auto c = graph::constraint_from_hierarchy(h);
    Digraph g(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j && c.allows(i, j) && rng.bernoulli(keep)) g.set_edge(i, j);
    return g;
}

}  // namespace

TEST_CASE("h_score") {
    SUBCASE("perfect recovery scores 1") {
        Rng rng(1);
        const Digraph g = random_dag(6, rng);
        CHECK(metrics::h_score(g, graph::canonicalize(g)) == 1.0);
    }
    SUBCASE("two-node half agreement") {
        // Estimate without edges canonicalizes to all-ones levels; truth
        // separates the nodes. Labels agree on exactly one ordered pair.
        const Digraph empty(2);
        CHECK(metrics::h_score(empty, Hierarchy({2, 1})) == 0.5);
    }
    SUBCASE("both collapsed to ties scores 1") {
        const Digraph empty(3);
        CHECK(metrics::h_score(empty, Hierarchy({1, 1, 1})) == 1.0);
    }
    SUBCASE("cyclic estimates are rejected") {
        Digraph g(2);
        g.set_edge(0, 1);
        g.set_edge(1, 0);
        CHECK_THROWS_AS(metrics::h_score(g, Hierarchy({1, 2})), ValidationError);
    }
    SUBCASE("property: canonical hierarchy of a DAG always aligns with itself") {
        Rng rng(2);
        for (int trial = 0; trial < 100; ++trial) {
            const Digraph g = random_dag(2 + trial % 8, rng);
            CHECK(metrics::h_score(g, graph::canonicalize(g)) == 1.0);
        }
    }
}

TEST_CASE("f1_score") {
    SUBCASE("exact match of non-empty graphs") {
        Rng rng(3);
        const Digraph g = random_dag(5, rng, 0.7);
        REQUIRE(g.edge_count_off_diagonal() > 0);
        CHECK(metrics::f1_score(g, g) == 1.0);
    }
    SUBCASE("hand count: one hit, one false alarm, one miss") {
        Digraph truth(3);
        truth.set_edge(0, 1);
        truth.set_edge(0, 2);
        Digraph est(3);
        est.set_edge(0, 1);
        est.set_edge(1, 2);
        CHECK(metrics::f1_score(est, truth) == doctest::Approx(0.5));
    }
    SUBCASE("empty estimate against non-empty truth is 0") {
        Digraph truth(3);
        truth.set_edge(0, 1);
        CHECK(metrics::f1_score(Digraph(3), truth) == 0.0);
    }
    SUBCASE("diagonal entries are excluded") {
        Digraph truth(2);
        truth.set_edge(0, 0);
        truth.set_edge(1, 1);
        Digraph est(2);
        CHECK(metrics::f1_score(est, truth) == 0.0);  // no off-diagonal edges anywhere
    }
    SUBCASE("F1 is 1 only for identical off-diagonal edge sets") {
        Rng rng(4);
        for (int trial = 0; trial < 50; ++trial) {
            const Digraph a = random_dag(5, rng, 0.5);
            const Digraph b = random_dag(5, rng, 0.5);
            bool same = true;
            for (int i = 0; i < 5; ++i)
                for (int j = 0; j < 5; ++j)
                    if (i != j && a.edge(i, j) != b.edge(i, j)) same = false;
            if (a.edge_count_off_diagonal() == 0 || b.edge_count_off_diagonal() == 0) continue;
            CHECK((metrics::f1_score(a, b) == 1.0) == same);
        }
    }
}

TEST_CASE("f_star") {
    CHECK(metrics::f_star(0.4, 0.4) == 1.0);
    CHECK(metrics::f_star(0.175, 0.194) == doctest::Approx(0.902).epsilon(1e-3));
    CHECK(metrics::f_star(0.3, 0.4) < metrics::f_star(0.35, 0.4));
    CHECK_THROWS_AS(metrics::f_star(0.1, 0.0), ValidationError);
    CHECK_THROWS_AS(metrics::f_star(0.1, -0.2), ValidationError);
}

TEST_CASE("summarize_population") {
    SUBCASE("identical samples have zero variation") {
        Rng rng(5);
        const Digraph g = random_dag(5, rng);
        const auto summary = metrics::summarize_population({g, g, g});
        for (const double cv : summary.cv) CHECK(cv == 0.0);
    }
    SUBCASE("hand-computed node statistics") {
        // Node 0 canonical levels across samples: 1, 2, 3.
        Digraph s1(3);
        Digraph s2(3);
        s2.set_edge(0, 1);
        Digraph s3(3);
        s3.set_edge(0, 1);
        s3.set_edge(1, 2);
        const auto summary = metrics::summarize_population({s1, s2, s3});
        CHECK(summary.mean_level[0] == doctest::Approx(2.0));
        CHECK(summary.sd_level[0] == doctest::Approx(std::sqrt(2.0 / 3.0)));
        CHECK(summary.cv[0] == doctest::Approx(0.408).epsilon(1e-3));
        CHECK(summary.height == 3);
        CHECK(summary.sample_heights == std::vector<int>{1, 2, 3});
    }
    SUBCASE("constant level-1 nodes have CV exactly zero") {
        Digraph a(2), b(2);
        b.set_edge(0, 1);
        const auto summary = metrics::summarize_population({a, b});
        CHECK(summary.cv[1] == 0.0);  // node 1 is a sink in both samples
    }
    SUBCASE("needs at least two samples") {
        CHECK_THROWS_AS(metrics::summarize_population({Digraph(2)}), ValidationError);
    }
}

TEST_CASE("degree_ccdf") {
    SUBCASE("edgeless graph") {
        const auto ccdf = metrics::degree_ccdf(Digraph(4));
        REQUIRE(ccdf.out_ccdf.size() == 1);
        CHECK(ccdf.out_ccdf[0] == std::pair<int, double>{0, 1.0});
    }
    SUBCASE("star graph out-degrees") {
        Digraph star(4);
        star.set_edge(0, 1);
        star.set_edge(0, 2);
        star.set_edge(0, 3);
        const auto ccdf = metrics::degree_ccdf(star);
        REQUIRE(ccdf.out_ccdf.size() == 4);
        CHECK(ccdf.out_ccdf[0] == std::pair<int, double>{0, 1.0});
        CHECK(ccdf.out_ccdf[1] == std::pair<int, double>{1, 0.25});
        CHECK(ccdf.out_ccdf[2] == std::pair<int, double>{2, 0.25});
        CHECK(ccdf.out_ccdf[3] == std::pair<int, double>{3, 0.25});
        // Every spoke receives one edge.
        CHECK(ccdf.in_ccdf[1] == std::pair<int, double>{1, 0.75});
    }
    SUBCASE("CCDFs start at 1 and weakly decrease") {
        Rng rng(6);
        for (int trial = 0; trial < 50; ++trial) {
            const Digraph g = random_dag(3 + trial % 7, rng, 0.5);
            for (const auto& series :
                 {metrics::degree_ccdf(g).in_ccdf, metrics::degree_ccdf(g).out_ccdf,
                  metrics::degree_ccdf(g).total_ccdf}) {
                CHECK(series.front().second == 1.0);
                for (std::size_t i = 1; i < series.size(); ++i) {
                    CHECK(series[i].second <= series[i - 1].second + 1e-15);
                }
            }
        }
    }
}

TEST_CASE("spearman") {
    SUBCASE("strictly monotone relationships") {
        const std::vector<double> x = {1, 2, 3, 4, 5, 6};
        std::vector<double> y;
        for (const double v : x) y.push_back(std::exp(v));
        auto [rho_up, p_up] = metrics::spearman(x, y);
        CHECK(rho_up == doctest::Approx(1.0));
        CHECK(p_up < 1e-6);
        for (auto& v : y) v = -v;
        auto [rho_down, p_down] = metrics::spearman(x, y);
        CHECK(rho_down == doctest::Approx(-1.0));
    }
    SUBCASE("invariance under strictly monotone transforms") {
        Rng rng(7);
        std::vector<double> x(20), y(20);
        for (std::size_t i = 0; i < 20; ++i) {
            x[i] = rng.normal();
            y[i] = rng.normal();
        }
        const auto base = metrics::spearman(x, y);
        std::vector<double> tx = x, ty = y;
        for (auto& v : tx) v = std::atan(3.0 * v);       // strictly increasing
        for (auto& v : ty) v = v * v * v + 0.5 * v;      // strictly increasing
        const auto transformed = metrics::spearman(tx, ty);
        CHECK(base.first == doctest::Approx(transformed.first));
        CHECK(base.second == doctest::Approx(transformed.second));
    }
    SUBCASE("tied values use mid-ranks") {
        // x ranks: 1.5, 1.5, 3; y ranks: 1, 2.5, 2.5 -> rho = 0.5.
        const auto [rho, p] = metrics::spearman({1.0, 1.0, 2.0}, {3.0, 5.0, 5.0});
        CHECK(rho == doctest::Approx(0.5));
    }
    SUBCASE("degenerate inputs are rejected") {
        CHECK_THROWS_AS(metrics::spearman({1.0, 1.0, 1.0}, {1.0, 2.0, 3.0}), ValidationError);
        CHECK_THROWS_AS(metrics::spearman({1.0, 2.0}, {1.0, 2.0}), ValidationError);
        CHECK_THROWS_AS(metrics::spearman({1.0, 2.0, 3.0}, {1.0, 2.0}), ValidationError);
    }
}

TEST_CASE("bootstrap_mean_ci") {
    SUBCASE("constant samples give a zero-width interval") {
        Rng rng(8);
        const auto [lo, hi] = metrics::bootstrap_mean_ci({2.5, 2.5, 2.5, 2.5}, 0.95, 500, rng);
        CHECK(lo == 2.5);
        CHECK(hi == 2.5);
    }
    SUBCASE("intervals nest as the level grows") {
        std::vector<double> samples;
        Rng data_rng(9);
        for (int i = 0; i < 40; ++i) samples.push_back(data_rng.normal());
        Rng rng_a(10), rng_b(10);
        const auto narrow = metrics::bootstrap_mean_ci(samples, 0.5, 2000, rng_a);
        const auto wide = metrics::bootstrap_mean_ci(samples, 0.99, 2000, rng_b);
        CHECK(wide.first <= narrow.first);
        CHECK(wide.second >= narrow.second);
    }
    SUBCASE("width matches the CLT for standard normal samples") {
        Rng data_rng(11);
        std::vector<double> samples;
        for (int i = 0; i < 100; ++i) samples.push_back(data_rng.normal());
        Rng rng(12);
        const auto [lo, hi] = metrics::bootstrap_mean_ci(samples, 0.95, 4000, rng);
        const double width = hi - lo;
        const double expected = 2.0 * 1.959964 / std::sqrt(100.0);
        CHECK(width > 0.7 * expected);
        CHECK(width < 1.3 * expected);
        // Interval contains the sample mean.
        double mean = 0.0;
        for (const double s : samples) mean += s;
        mean /= samples.size();
        CHECK(lo <= mean);
        CHECK(hi >= mean);
    }
    SUBCASE("degenerate inputs are rejected") {
        Rng rng(13);
        CHECK_THROWS_AS(metrics::bootstrap_mean_ci({1.0}, 0.95, 100, rng), ValidationError);
        CHECK_THROWS_AS(metrics::bootstrap_mean_ci({1.0, 2.0}, 0.0, 100, rng), ValidationError);
    }
}

TEST_CASE("significance stars") {
    CHECK(std::string(metrics::significance_stars(0.2)) == "");
    CHECK(std::string(metrics::significance_stars(0.05)) == "*");
    CHECK(std::string(metrics::significance_stars(0.009)) == "**");
    CHECK(std::string(metrics::significance_stars(0.0005)) == "***");
}
