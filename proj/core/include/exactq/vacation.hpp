#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "exactq/distributions.hpp"
#include "exactq/kiefer_wolfowitz.hpp"
#include "exactq/rng.hpp"
#include "exactq/walk_max.hpp"

namespace exactq {

struct VacationParams {
    DistributionSpec interarrival;  // G
    DistributionSpec service;       // F
    int servers = 1;                // c
    double a = 0.0;                 // compensation rate; 0 selects the midpoint

    double lambda() const { return 1.0 / mean(interarrival); }
    double mu() const { return 1.0 / mean(service); }
    double rho() const { return lambda() / (servers * mu()); }
    // a in (lambda, c*mu); defaults to the midpoint of that interval
    double resolved_a() const { return a > 0.0 ? a : 0.5 * (lambda() + servers * mu()); }
    void validate(bool allow_atoms = false) const;
};

// One time-stationary renewal stream, simulated in "simulation time" u >= 0
// which runs backwards through original time (epoch k sits at original time
// -epoch(k)). Walk-backed streams also carry the compensated random walk and
// its exact future maxima; the epochs are recovered from the walk's partial
// sums, so the conditioning done by the maximum sampler and the epochs stay
// consistent by construction. The forward side (original time > 0) is
// completed lazily: first gap from the residual-given-age law, then iid.
class RenewalStream {
public:
    static RenewalStream arrival(const DistributionSpec& G, double a,
                                 RngStream walk_rng, RngStream fwd_rng);
    static RenewalStream service(const DistributionSpec& F, double a, int c,
                                 RngStream walk_rng, RngStream fwd_rng);
    static RenewalStream scripted(std::vector<double> sim_epochs,
                                  std::vector<double> forward_epochs);

    double epoch(std::size_t k);            // k >= 1, simulation time
    std::size_t count_upto(double t);       // N(t) = #epochs <= t
    void materialize_through(double t);     // epochs beyond t exist

    // Exact sup over s >= t of this stream's compensated component
    // (N0(s) - a s for the arrival stream, (a/c)s - Ni(s) for a service one).
    double future_component_max(double t);

    double forward_epoch(std::size_t j);    // j >= 1, original time > 0

    std::size_t epochs_materialized() const { return epochs_.size(); }
    std::size_t forward_materialized() const { return forward_.size(); }
    std::uint64_t proposal_increments() const { return walk_ ? walk_->proposal_increments() : 0; }
    bool walk_backed() const { return walk_.has_value(); }
    const std::vector<double>& epochs() const { return epochs_; }

private:
    RenewalStream() = default;
    void materialize_count(std::size_t k);

    enum class Kind { Arrival, Service, Scripted };
    Kind kind_ = Kind::Scripted;
    double a_ = 0.0;
    int c_ = 1;
    DistributionSpec base_;
    std::optional<MaxWalkStream> walk_;
    std::optional<RngStream> fwd_rng_;
    std::vector<double> epochs_;    // ascending simulation times
    std::vector<double> forward_;   // ascending original times > 0
};

// Per-customer record produced by the vacation coupling.
struct ArrivalRecord {
    double time = 0.0;           // original arrival time in [-tau, 0)
    double interarrival = 0.0;   // gap to the next arrival; NaN for the last
    double service = 0.0;        // V_n: full length of the assigned activity
    double delay = 0.0;          // D_n: waiting time inside the vacation queue
    int server = 0;              // initiating stream id, 1..c
    double service_start = 0.0;  // epoch where the assigned activity starts
    bool assigned = false;
};

struct CouplingTrace {
    double window = 0.0;   // tau; arrivals cover [-tau, 0)
    std::int64_t q0 = 0;   // Q_v(-tau)
    std::vector<ArrivalRecord> arrivals;
    // services handed to the q0 customers already queued at -tau, pop order
    std::vector<double> initial_services;
    // (original event time, vacation queue length after the event)
    std::vector<std::pair<double, std::int64_t>> qv_path;

    TrafficTrace traffic() const;  // (time, interarrival, service) view
};

// Merged view of the c+1 stationary renewal streams with exact running
// maxima, queue-length extraction, and the service-time coupling.
class VacationTimeline {
public:
    VacationTimeline(const VacationParams& params, std::uint64_t seed,
                     std::uint64_t replication);
    // Scripted streams for tests: no walks, so running_max_x is unavailable
    // and extract_services requires an explicit q0.
    VacationTimeline(int servers, std::vector<std::vector<double>> sim_epochs,
                     std::vector<std::vector<double>> forward_epochs);

    int servers() const { return c_; }

    std::int64_t x_at(double t);          // X(t) = N0(t) - sum_i Ni(t)
    std::int64_t running_max_x(double t); // exact sup_{s>=t} X(s)
    std::int64_t q_v(double t);           // Q_v(-t) = M(t) - X(t)

    // Replay the vacation dynamics over original time [-tau, 0] and extract
    // every window arrival's service time, delay and initiating server.
    CouplingTrace extract_services(double tau,
                                   std::optional<std::int64_t> q0_override = {});

    // Q_v after each window event computed from the exact maxima alone
    // (no dynamics replay): the independent route against qv_path.
    std::vector<std::pair<double, std::int64_t>> qv_from_maxima(double tau);

    // Remaining activity times of streams 1..c just before original time t
    // (exactly 0 for a stream with an epoch at t).
    std::vector<double> residuals_before(double t);

    // Vacation-system Kiefer-Wolfowitz vector seen by trace arrival k:
    // delay * 1 + sorted residuals at the service start.
    KWVector w_v_at(const CouplingTrace& trace, std::size_t k);

    double first_forward_arrival();  // T_1^0 > 0

    std::vector<std::uint64_t> renewal_counts() const;  // per stream, incl. forward
    std::uint64_t proposal_increments() const;

    // Diagnostic dump over the window: time, stream_id, X, M, Q_v.
    void dump_csv(std::ostream& os, double tau);

private:
    struct Event {
        double u;        // simulation time
        int stream;      // 0..c
    };
    std::vector<Event> merged_events(double tau);

    int c_ = 1;
    std::vector<RenewalStream> streams_;
};

}  // namespace exactq
