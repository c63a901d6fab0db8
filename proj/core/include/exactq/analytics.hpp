#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "exactq/dcftp.hpp"
#include "exactq/rng.hpp"
#include "exactq/stats.hpp"

namespace exactq {

struct MmcParams {
    double lambda = 0.0;
    double mu = 0.0;
    int servers = 1;

    double rho() const { return lambda / (servers * mu); }
    void validate() const;
};

// Stationary number-in-system law of an M/M/c queue: entries 0..n_max plus a
// pooled tail cell at the back. Sums to 1.
std::vector<double> erlang_c_pmf(const MmcParams& p, int n_max);

// Stationary number-waiting law of the M/M/c vacation system. All c servers
// run activities back to back, so completions form a Poisson(c mu) process
// and the queue is a birth-death chain with Geometric(1-rho) marginal.
// Entries 0..n_max plus a pooled tail cell.
std::vector<double> vacation_mmc_qlen_pmf(const MmcParams& p, int n_max);

enum class ScalingRegime { QD, QED };  // quality-driven, quality-and-efficiency
MmcParams regime_params(ScalingRegime regime, double s);

// One replication of the forward-coupled coalescence experiment: the upper
// queue starts with a Geometric(1-rho) backlog and all servers busy with
// equilibrium residuals, the lower queue starts empty, both consume the same
// arrivals and per-customer service requirements. Returns the first time the
// two states agree exactly (0 when start_equal makes both begin empty).
double forward_coupled_coalescence_time(const MmcParams& p, RngStream& rng,
                                        bool start_equal = false);

struct CoalescenceStudyRow {
    double scale = 0.0;
    std::size_t reps = 0;
    MeanCi t;
};

CoalescenceStudyRow coalescence_study_point(ScalingRegime regime, double s,
                                            std::size_t reps, std::uint64_t seed,
                                            int threads);

struct ComplexityRow {
    double lambda = 0.0;
    double rho = 0.0;
    double mean_renewals = 0.0;   // materialized epochs, all streams + forward side
    double mean_proposals = 0.0;  // all increment draws inside the walk machinery
    double mean_sampled = 0.0;    // renewals + proposals: every renewal gap drawn
    double mean_t = 0.0;          // mean coalescence time
    double mean_horizon = 0.0;    // mean successful inspection horizon, time units
    double scaled_sampled = 0.0;  // mean_sampled * (1 - rho)^2
};

// Inspection horizons are measured in arrivals: the k-th check covers about
// t0_arrivals * 2^k interarrival times, so the low-traffic rows are not
// padded by a fixed-time floor.
std::vector<ComplexityRow> complexity_study(const std::vector<double>& lambdas,
                                            double mu, int servers, double t0_arrivals,
                                            std::size_t reps, std::uint64_t seed,
                                            int threads);

// Replication-parallel map; fn(r) must only touch state owned by r.
// Propagates the first exception after all workers join.
void parallel_for_reps(std::size_t reps, int threads,
                       const std::function<void(std::size_t)>& fn);

}  // namespace exactq
