#include "rex/random.hpp"

#include "support/stats.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <vector>

using namespace rex;

namespace {

std::vector<double> uniform_draws(RandomStream rng, int n) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out.push_back(rng.next_double());
    return out;
}

} // namespace

TEST_CASE("derived streams are pure functions of (seed, label)") {
    RandomStream a = RandomStream::derive(42, "search/problem-3");
    RandomStream b = RandomStream::derive(42, "search/problem-3");
    for (int i = 0; i < 100; ++i) REQUIRE(a.next_u64() == b.next_u64());
}

TEST_CASE("distinct labels give statistically independent streams") {
    const int n = 10000;
    const auto xs = uniform_draws(RandomStream::derive(42, "a"), n);
    const auto ys = uniform_draws(RandomStream::derive(42, "b"), n);
    const double d = testsupport::ks_two_sample(xs, ys);
    REQUIRE(d < testsupport::ks_critical(0.001, n, n));
}

TEST_CASE("distinct seeds differ from the first draw") {
    RandomStream a = RandomStream::derive(1, "x");
    RandomStream b = RandomStream::derive(2, "x");
    REQUIRE(a.next_u64() != b.next_u64());
}

TEST_CASE("uniform helpers stay inside their ranges") {
    RandomStream rng = RandomStream::derive(7, "ranges");
    for (int i = 0; i < 20000; ++i) {
        const double u = rng.next_double();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        const double v = rng.next_open01();
        REQUIRE(v > 0.0);
        REQUIRE(v < 1.0);
        const auto k = rng.next_below(7);
        REQUIRE(k < 7);
    }
}

TEST_CASE("gamma sampler matches Gamma moments") {
    const int n = 100000;

    SECTION("shape 1 is Exponential(1)") {
        RandomStream rng = RandomStream::derive(11, "gamma1");
        std::vector<double> xs;
        for (int i = 0; i < n; ++i) xs.push_back(gamma_sample(1.0, rng));
        const auto s = testsupport::sample_stats(xs);
        REQUIRE(s.mean == Catch::Approx(1.0).margin(0.02));
        REQUIRE(s.variance == Catch::Approx(1.0).margin(0.05));
    }

    SECTION("shape 5") {
        RandomStream rng = RandomStream::derive(11, "gamma5");
        std::vector<double> xs;
        for (int i = 0; i < n; ++i) xs.push_back(gamma_sample(5.0, rng));
        REQUIRE(testsupport::sample_stats(xs).mean == Catch::Approx(5.0).margin(0.05));
    }

    SECTION("shape 0.5 uses the boosting identity and stays positive") {
        RandomStream rng = RandomStream::derive(11, "gamma05");
        std::vector<double> xs;
        for (int i = 0; i < n; ++i) {
            const double x = gamma_sample(0.5, rng);
            REQUIRE(x > 0.0);
            xs.push_back(x);
        }
        REQUIRE(testsupport::sample_stats(xs).mean == Catch::Approx(0.5).margin(0.02));
    }

    SECTION("invalid shape") {
        RandomStream rng;
        REQUIRE_THROWS_AS(gamma_sample(0.0, rng), DomainError);
        REQUIRE_THROWS_AS(gamma_sample(-1.0, rng), DomainError);
    }
}

TEST_CASE("beta sampler matches closed-form moments on the grid") {
    const int n = 100000;
    struct Case {
        double a, b;
    };
    const Case grid[] = {{1, 1}, {2, 5}, {11, 11}, {1, 301}, {101, 21}};
    for (const Case& c : grid) {
        DYNAMIC_SECTION("Beta(" << c.a << "," << c.b << ")") {
            RandomStream rng = RandomStream::derive(13, "beta-grid");
            std::vector<double> xs;
            for (int i = 0; i < n; ++i) {
                const double x = beta_sample(c.a, c.b, rng);
                REQUIRE(x > 0.0);
                REQUIRE(x < 1.0);
                xs.push_back(x);
            }
            const auto m = testsupport::beta_moments(c.a, c.b);
            const auto s = testsupport::sample_stats(xs);
            REQUIRE(std::fabs(s.mean - m.mean) < 4.0 * testsupport::se_mean(m.variance, s.n));
            REQUIRE(std::fabs(s.variance - m.variance) <
                    4.0 * testsupport::se_variance(m.variance, m.mu4, s.n));
        }
    }
}

TEST_CASE("Beta(1,1) is uniform and Beta(21,1) concentrates near 1") {
    const int n = 100000;
    {
        RandomStream rng = RandomStream::derive(17, "beta11");
        std::vector<double> xs;
        for (int i = 0; i < n; ++i) xs.push_back(beta_sample(1.0, 1.0, rng));
        REQUIRE(testsupport::sample_stats(xs).mean == Catch::Approx(0.5).margin(0.005));
    }
    {
        RandomStream rng = RandomStream::derive(17, "beta21_1");
        std::vector<double> xs;
        for (int i = 0; i < n; ++i) xs.push_back(beta_sample(21.0, 1.0, rng));
        REQUIRE(testsupport::sample_stats(xs).mean == Catch::Approx(21.0 / 22.0).margin(0.005));
    }
}

TEST_CASE("Beta(11,11) variance matches the closed form") {
    const int n = 100000;
    RandomStream rng = RandomStream::derive(19, "beta-var");
    std::vector<double> xs;
    for (int i = 0; i < n; ++i) xs.push_back(beta_sample(11.0, 11.0, rng));
    const auto m = testsupport::beta_moments(11.0, 11.0);
    REQUIRE(m.variance == Catch::Approx(121.0 / (484.0 * 23.0)).epsilon(1e-12));
    const auto s = testsupport::sample_stats(xs);
    REQUIRE(std::fabs(s.variance - m.variance) <
            3.0 * testsupport::se_variance(m.variance, m.mu4, s.n));
}

TEST_CASE("beta sampler rejects bad parameters") {
    RandomStream rng;
    REQUIRE_THROWS_AS(beta_sample(0.0, 1.0, rng), DomainError);
    REQUIRE_THROWS_AS(beta_sample(1.0, -2.0, rng), DomainError);
}

TEST_CASE("sample sequences replay bit-exactly") {
    RandomStream a = RandomStream::derive(23, "replay");
    RandomStream b = RandomStream::derive(23, "replay");
    for (int i = 0; i < 1000; ++i) {
        REQUIRE(gamma_sample(2.5, a) == gamma_sample(2.5, b));
        REQUIRE(beta_sample(3.0, 7.0, a) == beta_sample(3.0, 7.0, b));
        REQUIRE(a.next_normal() == b.next_normal());
    }
}
