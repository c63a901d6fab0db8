#pragma once

// Shared helpers for the unit and acceptance suites: brute-force oracles that
// deliberately avoid the library's sampling machinery, plus small generators.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "exactq/distributions.hpp"
#include "exactq/kiefer_wolfowitz.hpp"
#include "exactq/rng.hpp"
#include "exactq/walk_max.hpp"

namespace exactq::test {

// Crude direct simulation of sup_{n>=1} S_n for a negative-drift walk,
// truncated once the walk falls `depth` below its running maximum. The
// truncation error is exponentially small in depth.
inline double brute_force_sup(const WalkSpec& spec, RngStream& rng, double depth = 40.0) {
    double s = 0.0, best = -1e300;
    while (true) {
        s += spec.sample_increment(rng);
        best = std::max(best, s);
        if (s < best - depth) return best;
    }
}

// Brute-force draw of M_0 = max(S_0, sup_{n>=1} S_n) for a walk started at s0.
inline double brute_force_m0(const WalkSpec& spec, double s0, RngStream& rng,
                             double depth = 40.0) {
    return std::max(s0, s0 + brute_force_sup(spec, rng, depth));
}

// One step of the walk conditioned on the entire future staying below the
// headroom, by accepting unconditioned futures whose truncated sup stays
// under it. Independent of the tilted rejection machinery.
inline double brute_force_conditional_step(const WalkSpec& spec, double headroom,
                                           RngStream& rng, double depth = 40.0) {
    while (true) {
        double x = spec.sample_increment(rng);
        if (x >= headroom) continue;
        if (x + brute_force_sup(spec, rng, depth) < headroom) return x;
    }
}

// Random FCFS traffic for property tests: exponential-ish gaps and services
// with a modest load.
inline TrafficTrace random_trace(int servers, std::size_t n, RngStream& rng,
                                 double load = 0.8) {
    TrafficTrace trace;
    trace.reserve(n);
    double time = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double gap = -std::log(rng.uniform01());
        double service = -std::log(rng.uniform01()) * load * servers;
        trace.push_back({time, gap, service});
        time += gap;
    }
    return trace;
}

inline bool leq_entrywise(const KWVector& a, const KWVector& b, double tol = 1e-12) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] > b[i] + tol) return false;
    return true;
}

// Numeric integral of f over [0, x] by composite Simpson.
template <class F>
double simpson(F f, double x, int panels = 4000) {
    double h = x / (2 * panels);
    double acc = f(0.0) + f(x);
    for (int i = 1; i < 2 * panels; ++i) acc += f(i * h) * (i % 2 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

}  // namespace exactq::test
