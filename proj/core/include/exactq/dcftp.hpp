#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "exactq/distributions.hpp"
#include "exactq/kiefer_wolfowitz.hpp"
#include "exactq/vacation.hpp"

namespace exactq {

struct DcftpConfig {
    DistributionSpec interarrival;  // G
    DistributionSpec service;       // F
    int servers = 1;
    double a = 0.0;        // compensation rate; 0 selects (lambda + c mu)/2
    double t0 = 10.0;      // inspection horizons are t0 * 2^k, k = 1, 2, ...
    std::uint64_t seed = 1;
    int max_doublings = 40;
    bool want_w1 = false;
    // Assert the structural invariants (sandwich, queue dominance, absorbing
    // coalescence, reconstruction equality) on this replication; throws
    // std::logic_error on any violation.
    bool check_invariants = false;

    VacationParams vacation_params() const {
        return {interarrival, service, servers, a};
    }
    void validate() const { vacation_params().validate(); }
};

// One exact draw from the steady state, with diagnostics.
struct StationarySample {
    QueueState z0;                 // state at time 0
    std::optional<KWVector> w1;    // stationary workload vector seen at T_1
    double coalescence_time = 0.0; // T > 0: coalescence detected at -T
    int horizon_k = 0;             // successful doubling index
    double horizon_time = 0.0;     // t0 * 2^horizon_k
    std::int64_t window_arrivals = 0;  // arrivals in the successful window
    std::int64_t detect_offset = 0;    // arrivals from the window start to detection
    std::vector<std::uint64_t> renewals;  // materialized epochs per stream 0..c
    std::uint64_t proposal_increments = 0;

    std::int64_t in_system() const;  // waiting + in service
};

// Fact III detection: the smallest index n with upper[n] == lower[n]
// entrywise (tolerance 1e-9 * (1 + magnitude)) and times[n] + upper[n][0] <= 0.
std::optional<std::size_t> detect_coalescence(const std::vector<KWVector>& upper,
                                              const std::vector<KWVector>& lower,
                                              const std::vector<double>& times);

bool kw_equal(const KWVector& x, const KWVector& y);

// Run the dominated-CFTP sampler for one replication. All randomness is
// derived from (config.seed, replication), so draws are reproducible and
// independent across replications.
StationarySample sample_stationary(const DcftpConfig& config, std::uint64_t replication);

}  // namespace exactq
