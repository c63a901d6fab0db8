#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "exactq/distributions.hpp"
#include "exactq/stats.hpp"
#include "support.hpp"

using namespace exactq;

namespace {
std::vector<double> draw_many(const DistributionSpec& d, std::size_t n, std::uint64_t seed) {
    RngStream rng(seed);
    std::vector<double> xs(n);
    for (double& x : xs) x = sample(d, rng);
    return xs;
}
}  // namespace

TEST_SUITE("dists") {

TEST_CASE("analytic means") {
    CHECK(mean(DistributionSpec::exponential(2.0)) == doctest::Approx(0.5));
    CHECK(mean(DistributionSpec::erlang(3, 6.0)) == doctest::Approx(0.5));
    CHECK(mean(DistributionSpec::deterministic(0.7)) == doctest::Approx(0.7));
    CHECK(mean(DistributionSpec::uniform(0.5, 1.5)) == doctest::Approx(1.0));
    CHECK(mean(DistributionSpec::hyperexponential({0.3, 0.7}, {2.0, 5.0})) ==
          doctest::Approx(0.3 / 2.0 + 0.7 / 5.0));
}

TEST_CASE("mgf values and domain") {
    CHECK(mgf(DistributionSpec::exponential(3.0), 1.0) == doctest::Approx(1.5));
    CHECK(mgf(DistributionSpec::deterministic(1.0), 0.5) ==
          doctest::Approx(std::exp(0.5)));
    CHECK(mgf(DistributionSpec::erlang(2, 4.0), 2.0) == doctest::Approx(4.0));
    // negative arguments are in the domain (used by the arrival walk)
    CHECK(mgf(DistributionSpec::exponential(3.0), -1.0) == doctest::Approx(0.75));
    CHECK(mgf(DistributionSpec::uniform(0.5, 1.5), 0.0) == doctest::Approx(1.0));
    CHECK_THROWS_AS((void)mgf(DistributionSpec::exponential(3.0), 3.0), std::domain_error);
    CHECK_THROWS_WITH_AS((void)mgf(DistributionSpec::erlang(2, 4.0), 5.0),
                         doctest::Contains("theta_max"), std::domain_error);
}

TEST_CASE("spec validation") {
    CHECK_THROWS_AS(DistributionSpec::exponential(0.0), ConfigError);
    CHECK_THROWS_AS(DistributionSpec::erlang(0, 1.0), ConfigError);
    CHECK_THROWS_AS(DistributionSpec::uniform(1.0, 0.5), ConfigError);
    CHECK_THROWS_AS(DistributionSpec::deterministic(-1.0), ConfigError);
    CHECK_THROWS_AS(DistributionSpec::hyperexponential({0.5, 0.2}, {1.0, 2.0}), ConfigError);
    CHECK_THROWS_AS(DistributionSpec::hyperexponential({0.5, 0.5}, {1.0}), ConfigError);
}

TEST_CASE("deterministic sampling is the point mass") {
    auto d = DistributionSpec::deterministic(0.7);
    RngStream rng(1);
    for (int i = 0; i < 10; ++i) CHECK(sample(d, rng) == 0.7);
}

TEST_CASE("law of large numbers for the mean") {
    auto d = DistributionSpec::exponential(2.0);
    auto xs = draw_many(d, 100000, 42);
    double m = 0.0;
    for (double x : xs) m += x;
    m /= static_cast<double>(xs.size());
    double se = std::sqrt(variance(d) / static_cast<double>(xs.size()));
    CHECK(std::abs(m - 0.5) < 3.0 * se);
}

TEST_CASE("erlang sample variance against the analytic oracle") {
    auto d = DistributionSpec::erlang(3, 6.0);
    auto xs = draw_many(d, 100000, 43);
    double n = static_cast<double>(xs.size());
    double m = 0.0;
    for (double x : xs) m += x;
    m /= n;
    double s2 = 0.0;
    for (double x : xs) s2 += (x - m) * (x - m);
    s2 /= n - 1.0;
    double var = variance(d);  // 3/36
    CHECK(var == doctest::Approx(3.0 / 36.0));
    // Var(sample variance) ~ var^2 (2/(n-1) + kurt_excess/n), excess = 6/k = 2
    double se = var * std::sqrt(2.0 / (n - 1.0) + 2.0 / n);
    CHECK(std::abs(s2 - var) < 3.0 * se);
}

TEST_CASE("equilibrium of an exponential is itself") {
    auto d = DistributionSpec::exponential(3.0);
    RngStream rng(7);
    std::vector<double> xs(10000);
    for (double& x : xs) x = sample_equilibrium(d, rng);
    auto ks = ks_test(xs, [&](double x) { return cdf(d, x); });
    CHECK(ks.p_value > 0.01);
}

TEST_CASE("equilibrium of a point mass is uniform") {
    auto d = DistributionSpec::deterministic(0.7);
    RngStream rng(8);
    std::vector<double> xs(10000);
    for (double& x : xs) x = sample_equilibrium(d, rng);
    auto ks = ks_test(xs, [](double x) {
        return std::clamp(x / 0.7, 0.0, 1.0);
    });
    CHECK(ks.p_value > 0.01);
}

TEST_CASE("erlang equilibrium matches the integrated tail") {
    auto d = DistributionSpec::erlang(3, 6.0);
    // closed-form mixture CDF used by the sampler
    auto mixture_cdf = [&](double x) {
        double acc = 0.0;
        for (int j = 1; j <= 3; ++j) acc += cdf(DistributionSpec::erlang(j, 6.0), x);
        return acc / 3.0;
    };
    // independent quadrature of (1/mean) * integral of the tail
    for (double x : {0.1, 0.3, 0.5, 0.8, 1.2, 2.0}) {
        double quad = test::simpson([&](double u) { return 1.0 - cdf(d, u); }, x) / mean(d);
        CHECK(std::abs(mixture_cdf(x) - quad) < 1e-6);
    }
    RngStream rng(9);
    std::vector<double> xs(10000);
    for (double& x : xs) x = sample_equilibrium(d, rng);
    CHECK(ks_test(xs, mixture_cdf).p_value > 0.01);
}

TEST_CASE("hyperexponential equilibrium reweights by p_i/rate_i") {
    auto d = DistributionSpec::hyperexponential({0.3, 0.7}, {2.0, 5.0});
    auto eq_cdf = [&](double x) {
        double w1 = 0.3 / 2.0, w2 = 0.7 / 5.0;
        double z = w1 + w2;
        return (w1 * -std::expm1(-2.0 * x) + w2 * -std::expm1(-5.0 * x)) / z;
    };
    RngStream rng(10);
    std::vector<double> xs(10000);
    for (double& x : xs) x = sample_equilibrium(d, rng);
    CHECK(ks_test(xs, eq_cdf).p_value > 0.01);
}

TEST_CASE("residual given age: memoryless, point mass, uniform window") {
    RngStream rng(11);
    auto e = DistributionSpec::exponential(2.0);
    std::vector<double> xs(10000);
    for (double& x : xs) x = sample_residual_given_age(e, 1.7, rng);
    CHECK(ks_test(xs, [&](double x) { return cdf(e, x); }).p_value > 0.01);

    CHECK(sample_residual_given_age(DistributionSpec::deterministic(1.0), 0.2, rng) ==
          doctest::Approx(0.8));

    auto u = DistributionSpec::uniform(0.5, 1.5);
    std::vector<double> ys(10000);
    for (double& y : ys) y = sample_residual_given_age(u, 1.0, rng);
    for (double y : ys) CHECK((y > 0.0 && y < 0.5));
    CHECK(ks_test(ys, [](double y) { return std::clamp(y / 0.5, 0.0, 1.0); }).p_value > 0.01);
}

TEST_CASE("residual at age zero is the plain law") {
    auto d = DistributionSpec::erlang(2, 3.0);
    RngStream rng(12);
    std::vector<double> xs(10000);
    for (double& x : xs) x = sample_residual_given_age(d, 0.0, rng);
    CHECK(ks_test(xs, [&](double x) { return cdf(d, x); }).p_value > 0.01);
}

TEST_CASE("residual outside the support tail is a domain error") {
    RngStream rng(13);
    CHECK_THROWS_AS(
        (void)sample_residual_given_age(DistributionSpec::deterministic(1.0), 1.0, rng),
        std::domain_error);
    CHECK_THROWS_AS(
        (void)sample_residual_given_age(DistributionSpec::uniform(0.5, 1.5), 1.5, rng),
        std::domain_error);
}

TEST_CASE("jensen bound on a theta grid") {
    std::vector<DistributionSpec> ds = {
        DistributionSpec::exponential(3.0), DistributionSpec::erlang(2, 4.0),
        DistributionSpec::hyperexponential({0.3, 0.7}, {2.0, 5.0}),
        DistributionSpec::uniform(0.5, 1.5), DistributionSpec::deterministic(0.7)};
    for (const auto& d : ds) {
        double cap = std::min(theta_max(d), 5.0);
        for (int i = 0; i < 10; ++i) {
            double th = cap * (i + 0.5) / 11.0;
            CHECK(mgf(d, th) >= std::exp(th * mean(d)) * (1.0 - 1e-12));
        }
    }
}

TEST_CASE("tilted sampling matches the tilted density") {
    // exp(s x) tilt of Exponential(rate) is Exponential(rate - s)
    auto d = DistributionSpec::exponential(3.0);
    RngStream rng(14);
    std::vector<double> xs(10000);
    for (double& x : xs) x = sample_exp_tilted(d, 1.0, rng);
    CHECK(ks_test(xs, [](double x) { return -std::expm1(-2.0 * x); }).p_value > 0.01);
    // negative tilt of a uniform: density ~ exp(s x) on [lo, hi]
    auto u = DistributionSpec::uniform(0.5, 1.5);
    double s = -2.0;
    std::vector<double> ys(10000);
    for (double& y : ys) y = sample_exp_tilted(u, s, rng);
    auto tilt_cdf = [&](double y) {
        if (y <= 0.5) return 0.0;
        if (y >= 1.5) return 1.0;
        return (std::exp(s * y) - std::exp(s * 0.5)) / (std::exp(s * 1.5) - std::exp(s * 0.5));
    };
    CHECK(ks_test(ys, tilt_cdf).p_value > 0.01);
}

TEST_CASE("identical seeds give byte-identical draws") {
    auto d = DistributionSpec::hyperexponential({0.3, 0.7}, {2.0, 5.0});
    RngStream a(99), b(99);
    for (int i = 0; i < 200; ++i) {
        CHECK(sample(d, a) == sample(d, b));
        CHECK(sample_equilibrium(d, a) == sample_equilibrium(d, b));
        CHECK(sample_residual_given_age(d, 0.3, a) == sample_residual_given_age(d, 0.3, b));
    }
}

}  // TEST_SUITE
