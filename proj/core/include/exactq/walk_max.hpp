#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "exactq/distributions.hpp"
#include "exactq/errors.hpp"
#include "exactq/rng.hpp"

namespace exactq {

// A Cramer root was required but psi(theta) never reaches 1 on the feasible
// range (increment essentially bounded above by zero, or too heavy a tail).
class UnsupportedSpecError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

enum class WalkFlavor { ArrivalType, ServiceType };

// Increment law of a negative-drift random walk derived from a renewal
// stream compensated at rate a:
//   ArrivalType:  X = 1 - a*A,      A ~ base   (requires a > 1/E[A])
//   ServiceType:  X = (a/c)*V - 1,  V ~ base   (requires a < c/E[V])
struct WalkSpec {
    WalkFlavor flavor = WalkFlavor::ArrivalType;
    DistributionSpec base;
    double a = 0.0;
    int servers = 1;  // c, used by ServiceType

    double drift() const;           // E[X], must be < 0
    double increment_sup() const;   // essential supremum of X
    double psi(double theta) const; // E[exp(theta*X)]
    double psi_theta_max() const;   // sup of the finite domain of psi
    double sample_increment(RngStream& rng) const;
    // increment under the exponentially tilted law, density \propto e^{theta x}
    double sample_increment_tilted(double theta, RngStream& rng) const;
    void validate() const;          // throws ConfigError on nonnegative drift
};

// Positive root of psi(theta) = 1, |psi(root)-1| <= 1e-10, by bracketed
// bisection. Throws ConfigError on nonnegative drift, UnsupportedSpecError
// when no bracket exists below psi_theta_max (for this catalog that happens
// exactly when the increment is a.s. <= 0, so the walk never rises).
double cramer_root(const WalkSpec& spec);

struct CrossResult {
    bool crossed = false;
    // When crossed: increments of the walk conditioned on first passage over
    // the gap, up to and including the first index whose partial sum exceeds
    // it. Empty otherwise.
    std::vector<double> segment;
};

// Exact Bernoulli draw of the event { sup_{n>=1} S_n > gap } for the walk
// started at 0 with iid WalkSpec increments. Tilted proposal up to first
// passage, accepted with probability exp(-theta* S_tau).
CrossResult cross_test(const WalkSpec& spec, double gap, RngStream& rng);

// One increment of the walk conditioned on the whole future staying strictly
// below the headroom: retrospective rejection via cross_test. headroom >= 0.
double conditional_step(const WalkSpec& spec, double headroom, RngStream& rng);

// Lazily extendable exact joint realization of the walk S_n and its
// infinite-horizon running maxima M_n = sup_{k>=n} S_k.
//
// The determination scheme alternates record tests and ceiling-conditioned
// steps. Invariant state: M exact and write-once for all indices <= d; a
// binding ceiling L (+inf before the first determination) that the entire
// future beyond the materialized path is conditioned to stay strictly below;
// at every determination point S_d = M_d = L. A record test samples, exactly,
// whether the future ever exceeds the running maximum of the path since d;
// a "no" freezes that block of M values at the record and tightens L to it.
class MaxWalkStream {
public:
    // Default start: 0 for ArrivalType, (a/c)*V with V ~ base for ServiceType.
    MaxWalkStream(WalkSpec spec, RngStream rng);
    MaxWalkStream(WalkSpec spec, double s0, RngStream rng);

    // Ensure M_k exact for all k <= n.
    void extend(std::size_t n);
    // Ensure S_k materialized for all k <= n (runs the same cycles).
    void ensure_path(std::size_t n);

    // Largest index with exact M; -1 before the first determination.
    std::ptrdiff_t determined_upto() const { return static_cast<std::ptrdiff_t>(M_.size()) - 1; }
    std::size_t path_length() const { return S_.size() - 1; }  // largest index with S

    double s(std::size_t k) const { return S_[k]; }
    double m(std::size_t k);  // extends on demand
    double increment(std::size_t k) const { return S_[k] - S_[k - 1]; }

    const WalkSpec& spec() const { return spec_; }
    bool never_rises() const { return !theta_; }
    double theta_star() const { return theta_ ? *theta_ : 0.0; }

    // Every increment drawn by the machinery, including rejected proposal
    // bundles (diagnostic; reproducible for a fixed seed).
    std::uint64_t proposal_increments() const { return proposals_; }

private:
    void cycle();
    CrossResult cross_internal(double gap);
    double conditional_step_internal(double headroom);
    void append_value(double s_value);
    void determine_block();

    WalkSpec spec_;
    RngStream rng_;
    std::optional<double> theta_;
    std::vector<double> S_;
    std::vector<double> M_;
    double ceiling_;
    // running maximum and its last attainment index over the undetermined
    // block (determined_upto, path end]
    double block_max_ = 0.0;
    std::size_t block_argmax_ = 0;
    std::uint64_t proposals_ = 0;
};

}  // namespace exactq
