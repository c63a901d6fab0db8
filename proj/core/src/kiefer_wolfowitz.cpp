#include "exactq/kiefer_wolfowitz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace exactq {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}  // namespace

KWVector kw_step(KWVector w, double service, double interarrival) {
    if (w.empty()) throw std::invalid_argument("kw_step: empty vector");
    w.front() += service;
    for (double& x : w) x = std::max(x - interarrival, 0.0);
    std::sort(w.begin(), w.end());
    return w;
}

std::vector<KWVector> kw_run(const TrafficTrace& trace, const KWVector& w0,
                             std::size_t from, std::size_t to) {
    if (from > to || to >= trace.size())
        throw std::invalid_argument("kw_run: index range outside trace");
    std::vector<KWVector> out;
    out.reserve(to - from + 1);
    out.push_back(w0);
    for (std::size_t n = from; n < to; ++n)
        out.push_back(kw_step(out.back(), trace[n].service, trace[n].interarrival));
    return out;
}

FcfsQueue::FcfsQueue(int servers, double start_time, bool record_queue_path,
                     double initial_since_arrival)
    : c_(servers),
      now_(start_time),
      last_arrival_(start_time - initial_since_arrival),
      last_completion_(-kInf),
      record_(record_queue_path) {
    if (servers < 1) throw std::invalid_argument("FcfsQueue: need at least one server");
}

void FcfsQueue::preload(const std::vector<double>& busy_remaining,
                        const std::vector<double>& queued_services) {
    if (static_cast<int>(busy_remaining.size()) > c_)
        throw std::invalid_argument("FcfsQueue: more busy servers than servers");
    if (!queued_services.empty() && static_cast<int>(busy_remaining.size()) < c_)
        throw std::invalid_argument("FcfsQueue: waiting customers require all servers busy");
    for (double r : busy_remaining) {
        if (r <= 0.0) throw std::invalid_argument("FcfsQueue: busy remaining must be > 0");
        completions_.push_back(now_ + r);
    }
    for (double v : queued_services) queue_.push_back({v, -1});
    if (record_) qpath_.emplace_back(now_, queue_length());
}

double FcfsQueue::next_completion() const {
    double m = kInf;
    for (double t : completions_) m = std::min(m, t);
    return m;
}

void FcfsQueue::start_head(double t) {
    Pending head = queue_.front();
    queue_.pop_front();
    if (head.arrival_idx >= 0) starts_[head.arrival_idx] = t;
    completions_.push_back(t + head.service);
    if (record_) qpath_.emplace_back(t, queue_length());
}

void FcfsQueue::advance_to(double t) {
    while (!completions_.empty()) {
        auto it = std::min_element(completions_.begin(), completions_.end());
        if (*it > t) break;
        double m = *it;
        *it = completions_.back();
        completions_.pop_back();
        now_ = m;
        last_completion_ = m;
        if (!queue_.empty()) start_head(m);
    }
    now_ = std::max(now_, t);
}

void FcfsQueue::arrive(double t, double service) {
    advance_to(t);
    if (t == last_completion_)
        throw TieError("FcfsQueue: arrival coincides with a service completion");
    last_arrival_ = t;
    std::int64_t idx = static_cast<std::int64_t>(starts_.size());
    starts_.push_back(kNaN);
    if (busy_count() < c_) {
        starts_[idx] = t;
        completions_.push_back(t + service);
    } else {
        queue_.push_back({service, idx});
    }
    if (record_) qpath_.emplace_back(t, queue_length());
}

QueueState FcfsQueue::snapshot() const {
    QueueState s;
    s.queue = queue_length();
    s.remaining.assign(static_cast<std::size_t>(c_), 0.0);
    for (std::size_t i = 0; i < completions_.size(); ++i)
        s.remaining[i] = completions_[i] - now_;
    std::sort(s.remaining.begin(), s.remaining.end());
    s.since_arrival = now_ - last_arrival_;
    return s;
}

ReplayOutcome replay(const TrafficTrace& trace, std::size_t from, std::size_t to,
                     int servers, double start_time, double end_time,
                     const std::vector<double>& busy_remaining,
                     const std::vector<double>& queued_services,
                     bool record_queue_path, double initial_since_arrival) {
    FcfsQueue q(servers, start_time, record_queue_path, initial_since_arrival);
    q.preload(busy_remaining, queued_services);
    if (!trace.empty() && from <= to) {
        if (to >= trace.size())
            throw std::invalid_argument("replay: index range outside trace");
        for (std::size_t n = from; n <= to; ++n) {
            if (trace[n].time > end_time) break;
            q.arrive(trace[n].time, trace[n].service);
        }
    }
    q.advance_to(end_time);
    ReplayOutcome out;
    out.state = q.snapshot();
    out.service_starts = q.service_starts();
    out.queue_path = q.queue_path();
    return out;
}

}  // namespace exactq
