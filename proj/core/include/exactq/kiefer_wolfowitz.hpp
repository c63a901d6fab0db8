#pragma once

#include <cstdint>
#include <deque>
#include <vector>

#include "exactq/errors.hpp"

namespace exactq {

// Sorted (ascending) vector of the c virtual workloads seen by an arrival.
// First entry = the arrival's waiting time.
using KWVector = std::vector<double>;

// One recursion step: the arriving customer's service joins the smallest
// workload (the server that frees first under FCFS), every coordinate ages
// by the interarrival, clamps at zero, and the vector is re-sorted.
KWVector kw_step(KWVector w, double service, double interarrival);

struct TrafficEntry {
    double time = 0.0;
    double interarrival = 0.0;  // gap to the next arrival
    double service = 0.0;
};
using TrafficTrace = std::vector<TrafficEntry>;

// Kiefer–Wolfowitz vectors observed by arrivals from..to inclusive, given
// the vector seen at `from` is w0.
std::vector<KWVector> kw_run(const TrafficTrace& trace, const KWVector& w0,
                             std::size_t from, std::size_t to);

struct QueueState {
    std::int64_t queue = 0;         // customers waiting (not in service)
    std::vector<double> remaining;  // ascending, zeros for idle servers
    double since_arrival = 0.0;     // time elapsed since the last arrival
};

// Event-driven FCFS GI/GI/c queue. Busy servers are tracked by absolute
// completion time, so advancing the clock is exact and two coupled replays
// driven through the same global event times stay bitwise comparable.
class FcfsQueue {
public:
    FcfsQueue(int servers, double start_time, bool record_queue_path = false,
              double initial_since_arrival = 0.0);

    // Install an initial condition: remaining activity times of busy servers
    // and the services of customers already waiting, in FCFS order.
    void preload(const std::vector<double>& busy_remaining,
                 const std::vector<double>& queued_services);

    void advance_to(double t);              // process completions through t
    void arrive(double t, double service);  // advance, then admit

    double now() const { return now_; }
    double next_completion() const;  // +inf when no server is busy
    std::int64_t queue_length() const { return static_cast<std::int64_t>(queue_.size()); }
    int busy_count() const { return static_cast<int>(completions_.size()); }
    std::int64_t in_system() const { return queue_length() + busy_count(); }

    QueueState snapshot() const;

    // Service start time per fed arrival (feed order); NaN while waiting.
    const std::vector<double>& service_starts() const { return starts_; }
    // (event time, queue length after the event); only if recording enabled.
    const std::vector<std::pair<double, std::int64_t>>& queue_path() const {
        return qpath_;
    }

private:
    struct Pending {
        double service;
        std::int64_t arrival_idx;  // -1 for preloaded customers
    };
    void start_head(double t);

    int c_;
    double now_;
    double last_arrival_;
    double last_completion_;
    bool record_;
    std::vector<double> completions_;
    std::deque<Pending> queue_;
    std::vector<double> starts_;
    std::vector<std::pair<double, std::int64_t>> qpath_;
};

struct ReplayOutcome {
    QueueState state;                       // at end_time
    std::vector<double> service_starts;     // per fed arrival
    std::vector<std::pair<double, std::int64_t>> queue_path;
};

// Feed trace[from..to] into a FCFS queue started at start_time with the given
// initial condition and read the state at end_time.
ReplayOutcome replay(const TrafficTrace& trace, std::size_t from, std::size_t to,
                     int servers, double start_time, double end_time,
                     const std::vector<double>& busy_remaining = {},
                     const std::vector<double>& queued_services = {},
                     bool record_queue_path = false,
                     double initial_since_arrival = 0.0);

}  // namespace exactq
