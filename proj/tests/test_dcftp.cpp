#include <doctest.h>

#include <cmath>

#include "exactq/analytics.hpp"
#include "exactq/dcftp.hpp"
#include "exactq/stats.hpp"
#include "support.hpp"

using namespace exactq;

namespace {

DcftpConfig mm2_config(std::uint64_t seed) {
    DcftpConfig cfg;
    cfg.interarrival = DistributionSpec::exponential(3.0);
    cfg.service = DistributionSpec::exponential(2.0);
    cfg.servers = 2;
    cfg.seed = seed;
    return cfg;
}

}  // namespace

TEST_SUITE("driver") {

TEST_CASE("detect_coalescence: immediate and never") {
    std::vector<KWVector> upper{{0.0, 0.0}, {0.0, 1.0}};
    std::vector<KWVector> lower{{0.0, 0.0}, {0.0, 1.0}};
    std::vector<double> times{-5.0, -4.0};
    auto hit = detect_coalescence(upper, lower, times);
    REQUIRE(hit.has_value());
    CHECK(*hit == 0);

    std::vector<KWVector> upper2{{0.1, 0.2}, {0.1, 0.3}};
    std::vector<KWVector> lower2{{0.0, 0.0}, {0.0, 0.0}};
    CHECK_FALSE(detect_coalescence(upper2, lower2, times).has_value());
}

TEST_CASE("detection requires the service start at or before zero") {
    // equal vectors but the waiting time pushes the start past zero
    std::vector<KWVector> upper{{3.0}, {0.5}};
    std::vector<KWVector> lower{{3.0}, {0.5}};
    std::vector<double> times{-2.0, -0.2};
    auto hit = detect_coalescence(upper, lower, times);
    REQUIRE(hit.has_value());
    CHECK(*hit == 1);  // -2 + 3 > 0 fails, -0.2 + 0.5 > 0 fails...
}

TEST_CASE("hand trace, single server") {
    // five arrivals; the recursions from w+=(2.0) and w-=(0) both clamp to
    // zero once the gaps outpace the services
    TrafficTrace trace{{-10.0, 1.0, 0.5}, {-9.0, 2.0, 0.5}, {-7.0, 1.0, 4.0},
                       {-6.0, 3.0, 0.5}, {-3.0, 1.0, 0.5}};
    auto upper = kw_run(trace, {2.0}, 0, 4);
    auto lower = kw_run(trace, {0.0}, 0, 4);
    std::vector<double> times;
    for (const auto& e : trace) times.push_back(e.time);
    // hand: upper W = 2, 1.5, 0, 3, 0.5 ; lower W = 0, 0, 0, 3, 0.5
    CHECK(upper[0][0] == doctest::Approx(2.0));
    CHECK(upper[1][0] == doctest::Approx(1.5));
    CHECK(upper[2][0] == doctest::Approx(0.0));
    CHECK(upper[3][0] == doctest::Approx(3.0));
    CHECK(lower[2][0] == doctest::Approx(0.0));
    CHECK(lower[3][0] == doctest::Approx(3.0));
    auto hit = detect_coalescence(upper, lower, times);
    REQUIRE(hit.has_value());
    CHECK(*hit == 2);  // first equality with T_n + W <= 0
    CHECK(times[*hit] + upper[*hit][0] == doctest::Approx(-7.0));
}

TEST_CASE("identical seeds reproduce the sample byte for byte") {
    StationarySample a = sample_stationary(mm2_config(123), 5);
    StationarySample b = sample_stationary(mm2_config(123), 5);
    CHECK(a.z0.queue == b.z0.queue);
    CHECK(a.z0.remaining == b.z0.remaining);
    CHECK(a.z0.since_arrival == b.z0.since_arrival);
    CHECK(a.coalescence_time == b.coalescence_time);
    CHECK(a.renewals == b.renewals);
    CHECK(a.proposal_increments == b.proposal_increments);
}

TEST_CASE("structural invariants hold across replications") {
    DcftpConfig cfg = mm2_config(2024);
    cfg.check_invariants = true;
    for (std::uint64_t r = 0; r < 40; ++r) CHECK_NOTHROW((void)sample_stationary(cfg, r));
}

TEST_CASE("near-trivial load: empty-system probability") {
    DcftpConfig cfg;
    cfg.interarrival = DistributionSpec::exponential(0.1);
    cfg.service = DistributionSpec::exponential(10.0);
    cfg.servers = 2;
    cfg.seed = 31;
    const int reps = 5000;
    int empty = 0;
    for (int r = 0; r < reps; ++r) {
        StationarySample s = sample_stationary(cfg, static_cast<std::uint64_t>(r));
        empty += s.in_system() == 0;
    }
    double p0 = erlang_c_pmf({0.1, 10.0, 2}, 0)[0];
    double se = std::sqrt(p0 * (1.0 - p0) / reps);
    CHECK(std::abs(empty / double(reps) - p0) < 3.0 * se);
}

TEST_CASE("mean coalescence time is stable") {
    DcftpConfig cfg = mm2_config(77);
    std::vector<double> ts(1000);
    parallel_for_reps(ts.size(), 4,
                      [&](std::size_t r) { ts[r] = sample_stationary(cfg, r).coalescence_time; });
    MeanCi ci = mean_ci95(ts);
    CHECK(ci.mean > 0.0);
    CHECK(ci.half_width / ci.mean < 0.10);  // standard error < 10% of the mean
}

TEST_CASE("optional workload vector at the first arrival after zero") {
    DcftpConfig cfg = mm2_config(55);
    cfg.want_w1 = true;
    StationarySample s = sample_stationary(cfg, 2);
    REQUIRE(s.w1.has_value());
    CHECK(s.w1->size() == 2);
    CHECK((*s.w1)[0] >= 0.0);
    CHECK((*s.w1)[0] <= (*s.w1)[1]);
}

TEST_CASE("driver rejects atomic laws and instability") {
    DcftpConfig atom;
    atom.interarrival = DistributionSpec::deterministic(1.0);
    atom.service = DistributionSpec::exponential(2.0);
    atom.servers = 1;
    CHECK_THROWS_AS((void)sample_stationary(atom, 0), ConfigError);

    DcftpConfig unstable;
    unstable.interarrival = DistributionSpec::exponential(3.0);
    unstable.service = DistributionSpec::exponential(1.0);
    unstable.servers = 2;
    CHECK_THROWS_AS((void)sample_stationary(unstable, 0), ConfigError);
}

TEST_CASE("resource cap raises after the configured doublings") {
    DcftpConfig cfg = mm2_config(1);
    cfg.max_doublings = 0;
    CHECK_THROWS_AS((void)sample_stationary(cfg, 0), ResourceCapError);
}

TEST_CASE("diagnostics are filled") {
    StationarySample s = sample_stationary(mm2_config(9), 0);
    CHECK(s.coalescence_time > 0.0);
    CHECK(s.coalescence_time <= s.horizon_time + 1e-9);
    CHECK(s.horizon_k >= 1);
    CHECK(s.window_arrivals > 0);
    CHECK(s.detect_offset >= 0);
    CHECK(s.detect_offset < s.window_arrivals);
    CHECK(s.renewals.size() == 3);
    for (auto n : s.renewals) CHECK(n > 0);
    // state sanity: sorted remaining, FCFS work conservation
    for (std::size_t j = 1; j < s.z0.remaining.size(); ++j)
        CHECK(s.z0.remaining[j] >= s.z0.remaining[j - 1]);
    if (s.z0.queue > 0)
        for (double r : s.z0.remaining) CHECK(r > 0.0);
    CHECK(s.z0.since_arrival >= 0.0);
}

}  // TEST_SUITE
