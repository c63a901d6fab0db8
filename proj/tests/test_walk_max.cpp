#include <doctest.h>

#include <cmath>
#include <functional>
#include <vector>

#include "exactq/stats.hpp"
#include "exactq/walk_max.hpp"
#include "support.hpp"

using namespace exactq;

namespace {

WalkSpec arrival_exp1_a2() {
    return {WalkFlavor::ArrivalType, DistributionSpec::exponential(1.0), 2.0, 1};
}

// independent bisection on a literal psi, no library calls
double bisect_root(const std::function<double(double)>& psi, double lo, double hi) {
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        (psi(mid) < 1.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_SUITE("rwmax") {

TEST_CASE("cramer root for the arrival flavor") {
    WalkSpec spec = arrival_exp1_a2();
    double root = cramer_root(spec);
    CHECK(std::abs(spec.psi(root) - 1.0) <= 1e-10);
    // oracle: psi(t) = e^t / (1 + 2t)
    double expect = bisect_root([](double t) { return std::exp(t) / (1.0 + 2.0 * t); },
                                0.5, 4.0);
    CHECK(root == doctest::Approx(expect).epsilon(1e-8));
    CHECK(root == doctest::Approx(1.2564).epsilon(1e-3));
}

TEST_CASE("cramer root for the service flavor") {
    WalkSpec spec{WalkFlavor::ServiceType, DistributionSpec::exponential(1.0), 0.7, 1};
    double root = cramer_root(spec);
    CHECK(std::abs(spec.psi(root) - 1.0) <= 1e-10);
    // oracle: psi(t) = e^{-t} / (1 - 0.7 t)
    double expect = bisect_root([](double t) { return std::exp(-t) / (1.0 - 0.7 * t); },
                                0.2, 1.42);
    CHECK(root == doctest::Approx(expect).epsilon(1e-8));
    CHECK(root == doctest::Approx(0.76).epsilon(0.01));
}

TEST_CASE("nonnegative drift is a configuration error") {
    WalkSpec spec{WalkFlavor::ArrivalType, DistributionSpec::exponential(1.0), 0.5, 1};
    CHECK_THROWS_AS((void)cramer_root(spec), ConfigError);
}

TEST_CASE("walk that never rises has no root and never crosses") {
    WalkSpec spec{WalkFlavor::ArrivalType, DistributionSpec::deterministic(1.0), 2.0, 1};
    CHECK_THROWS_AS((void)cramer_root(spec), UnsupportedSpecError);
    RngStream rng(1);
    for (double b : {0.0, 0.5, 3.0})
        for (int i = 0; i < 50; ++i) CHECK_FALSE(cross_test(spec, b, rng).crossed);
}

TEST_CASE("cross_test rejects a negative gap") {
    RngStream rng(2);
    CHECK_THROWS_AS((void)cross_test(arrival_exp1_a2(), -0.1, rng), std::domain_error);
}

TEST_CASE("crossed segments are first passages") {
    WalkSpec spec = arrival_exp1_a2();
    RngStream rng(3);
    int crossed = 0;
    for (int i = 0; i < 2000 && crossed < 50; ++i) {
        auto r = cross_test(spec, 1.0, rng);
        if (!r.crossed) continue;
        ++crossed;
        double s = 0.0;
        for (std::size_t k = 0; k < r.segment.size(); ++k) {
            s += r.segment[k];
            if (k + 1 < r.segment.size())
                CHECK(s <= 1.0);
            else
                CHECK(s > 1.0);
        }
    }
    CHECK(crossed == 50);
}

TEST_CASE("crossing probability matches the brute-force oracle") {
    WalkSpec spec = arrival_exp1_a2();
    const double b = 1.0;
    const int n = 100000;
    RngStream rng_exact(4), rng_brute(5);
    int hits = 0;
    for (int i = 0; i < n; ++i) hits += cross_test(spec, b, rng_exact).crossed;
    int brute_hits = 0;
    for (int i = 0; i < n; ++i) brute_hits += test::brute_force_sup(spec, rng_brute) > b;
    double p1 = hits / double(n), p2 = brute_hits / double(n);
    double se = std::sqrt(p1 * (1 - p1) / n + p2 * (1 - p2) / n);
    CHECK(std::abs(p1 - p2) < 3.0 * se);
}

TEST_CASE("conditional step: deterministic walk and rejection rule") {
    WalkSpec det{WalkFlavor::ArrivalType, DistributionSpec::deterministic(1.0), 2.0, 1};
    RngStream rng(6);
    CHECK(conditional_step(det, 0.5, rng) == doctest::Approx(-1.0));

    WalkSpec spec = arrival_exp1_a2();
    for (int i = 0; i < 2000; ++i) {
        double h = 0.2 + 3.0 * rng.uniform01();
        CHECK(conditional_step(spec, h, rng) < h);
    }
}

TEST_CASE("conditional step matches the brute-force conditioned law") {
    WalkSpec spec = arrival_exp1_a2();
    const double h = 3.0;
    const int n = 20000;
    RngStream rng_exact(7), rng_brute(8);
    std::vector<double> exact(n), brute(n);
    double mean_exact = 0.0;
    for (int i = 0; i < n; ++i) {
        exact[i] = conditional_step(spec, h, rng_exact);
        brute[i] = test::brute_force_conditional_step(spec, h, rng_brute);
        mean_exact += exact[i];
    }
    mean_exact /= n;
    CHECK(mean_exact < spec.drift());  // conditioning pushes the step down
    CHECK(ks_test_two_sample(exact, brute).p_value > 0.01);
}

TEST_CASE("deterministic stream: S and M coincide") {
    WalkSpec det{WalkFlavor::ArrivalType, DistributionSpec::deterministic(1.0), 2.0, 1};
    MaxWalkStream w(det, RngStream(9));
    w.extend(30);
    for (std::size_t k = 0; k <= 30; ++k) {
        CHECK(w.s(k) == doctest::Approx(-double(k)));
        CHECK(w.m(k) == doctest::Approx(w.s(k)));
    }
}

TEST_CASE("M chain identity and nonnegative gap") {
    MaxWalkStream w(arrival_exp1_a2(), RngStream(10));
    w.extend(300);
    for (std::size_t k = 0; k < 300; ++k) {
        CHECK(w.m(k) == doctest::Approx(std::max(w.s(k), w.m(k + 1))).epsilon(1e-12));
        CHECK(w.m(k) >= w.s(k));
    }
}

TEST_CASE("prefix stability and write-once maxima") {
    MaxWalkStream w1(arrival_exp1_a2(), RngStream(11));
    MaxWalkStream w2(arrival_exp1_a2(), RngStream(11));
    w1.extend(60);
    std::vector<double> snap_s, snap_m;
    for (std::size_t k = 0; k <= 60; ++k) {
        snap_s.push_back(w1.s(k));
        snap_m.push_back(w1.m(k));
    }
    w1.extend(400);
    w2.extend(400);
    for (std::size_t k = 0; k <= 60; ++k) {
        CHECK(w1.s(k) == snap_s[k]);   // write-once
        CHECK(w1.m(k) == snap_m[k]);
    }
    for (std::size_t k = 0; k <= 400; ++k) {
        CHECK(w1.s(k) == w2.s(k));     // same rng stream, same realization
        CHECK(w1.m(k) == w2.m(k));
    }
}

TEST_CASE("service-flavor stream starts at (a/c) V") {
    WalkSpec spec{WalkFlavor::ServiceType, DistributionSpec::exponential(1.0), 0.7, 1};
    MaxWalkStream w(spec, RngStream(12));
    CHECK(w.s(0) > 0.0);
    w.extend(100);
    for (std::size_t k = 0; k < 100; ++k)
        CHECK(w.m(k) == doctest::Approx(std::max(w.s(k), w.m(k + 1))).epsilon(1e-12));
}

TEST_CASE("M0 law matches the truncated brute force") {
    WalkSpec spec = arrival_exp1_a2();
    const int n_exact = 3000, n_brute = 30000;
    std::vector<double> exact(n_exact), brute(n_brute);
    for (int i = 0; i < n_exact; ++i) {
        MaxWalkStream w(spec, RngStream(1000 + i));
        exact[i] = w.m(0);
    }
    RngStream rng(13);
    for (int i = 0; i < n_brute; ++i) brute[i] = test::brute_force_m0(spec, 0.0, rng);
    CHECK(ks_test_two_sample(exact, brute).p_value > 0.01);
}

TEST_CASE("proposal counter only grows") {
    MaxWalkStream w(arrival_exp1_a2(), RngStream(14));
    auto before = w.proposal_increments();
    w.extend(50);
    CHECK(w.proposal_increments() > before);
}

}  // TEST_SUITE
