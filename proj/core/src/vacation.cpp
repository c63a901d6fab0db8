#include "exactq/vacation.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <ostream>
#include <sstream>

namespace exactq {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

void VacationParams::validate(bool allow_atoms) const {
    if (servers < 1) throw ConfigError("vacation: need at least one server");
    if (!(rho() < 1.0)) {
        std::ostringstream os;
        os << "unstable configuration: rho = lambda/(c*mu) = " << rho() << " >= 1";
        throw ConfigError(os.str());
    }
    if (!allow_atoms && (has_atoms(interarrival) || has_atoms(service)))
        throw ConfigError(
            "vacation: interarrival and service laws must be continuous "
            "(deterministic laws create simultaneous events)");
    double av = resolved_a();
    if (!(av > lambda() && av < servers * mu())) {
        std::ostringstream os;
        os << "vacation: compensation rate a = " << av << " outside (lambda, c*mu) = ("
           << lambda() << ", " << servers * mu() << ")";
        throw ConfigError(os.str());
    }
}

RenewalStream RenewalStream::arrival(const DistributionSpec& G, double a,
                                     RngStream walk_rng, RngStream fwd_rng) {
    RenewalStream s;
    s.kind_ = Kind::Arrival;
    s.a_ = a;
    s.base_ = G;
    s.fwd_rng_ = std::move(fwd_rng);
    double first_gap = sample_equilibrium(G, walk_rng);
    WalkSpec spec{WalkFlavor::ArrivalType, G, a, 1};
    // Walk index k holds the paper's S_{k+1}: the equilibrium first gap sits
    // in the start value, every later increment is iid 1 - a*A.
    s.walk_.emplace(spec, 1.0 - a * first_gap, std::move(walk_rng));
    return s;
}

RenewalStream RenewalStream::service(const DistributionSpec& F, double a, int c,
                                     RngStream walk_rng, RngStream fwd_rng) {
    RenewalStream s;
    s.kind_ = Kind::Service;
    s.a_ = a;
    s.c_ = c;
    s.base_ = F;
    s.fwd_rng_ = std::move(fwd_rng);
    double first_gap = sample_equilibrium(F, walk_rng);
    WalkSpec spec{WalkFlavor::ServiceType, F, a, c};
    s.walk_.emplace(spec, (a / c) * first_gap, std::move(walk_rng));
    return s;
}

RenewalStream RenewalStream::scripted(std::vector<double> sim_epochs,
                                      std::vector<double> forward_epochs) {
    RenewalStream s;
    s.kind_ = Kind::Scripted;
    s.epochs_ = std::move(sim_epochs);
    s.forward_ = std::move(forward_epochs);
    return s;
}

void RenewalStream::materialize_count(std::size_t k) {
    if (kind_ == Kind::Scripted) {
        if (k > epochs_.size())
            throw std::out_of_range("scripted stream: epoch index beyond script");
        return;
    }
    while (epochs_.size() < k) {
        std::size_t n = epochs_.size() + 1;  // paper epoch index
        double t;
        if (kind_ == Kind::Arrival) {
            walk_->ensure_path(n - 1);
            t = (static_cast<double>(n) - walk_->s(n - 1)) / a_;
        } else {
            walk_->ensure_path(n - 1);
            t = (c_ / a_) * (walk_->s(n - 1) + static_cast<double>(n - 1));
        }
        epochs_.push_back(t);
    }
}

double RenewalStream::epoch(std::size_t k) {
    materialize_count(k);
    return epochs_[k - 1];
}

void RenewalStream::materialize_through(double t) {
    if (kind_ == Kind::Scripted) return;
    while (epochs_.empty() || epochs_.back() <= t) materialize_count(epochs_.size() + 1);
}

std::size_t RenewalStream::count_upto(double t) {
    materialize_through(t);
    return static_cast<std::size_t>(
        std::upper_bound(epochs_.begin(), epochs_.end(), t) - epochs_.begin());
}

double RenewalStream::future_component_max(double t) {
    if (!walk_) throw std::logic_error("future_component_max: scripted stream");
    std::size_t n = count_upto(t);
    if (kind_ == Kind::Arrival) {
        // sup_{s>=t} (N0(s) - a s) = max(N0(t) - a t, max_{k>=N0(t)+1} S_k)
        return std::max(static_cast<double>(n) - a_ * t, walk_->m(n));
    }
    // sup_{s>=t} ((a/c)s - Ni(s)) = max_{k>=Ni(t)} S_k
    return walk_->m(n);
}

double RenewalStream::forward_epoch(std::size_t j) {
    if (kind_ == Kind::Scripted) {
        if (j > forward_.size())
            throw std::out_of_range("scripted stream: forward epoch beyond script");
        return forward_[j - 1];
    }
    while (forward_.size() < j) {
        if (forward_.empty()) {
            double age = epoch(1);
            forward_.push_back(sample_residual_given_age(base_, age, *fwd_rng_));
        } else {
            forward_.push_back(forward_.back() + sample(base_, *fwd_rng_));
        }
    }
    return forward_[j - 1];
}

TrafficTrace CouplingTrace::traffic() const {
    TrafficTrace t;
    t.reserve(arrivals.size());
    for (const auto& a : arrivals) t.push_back({a.time, a.interarrival, a.service});
    return t;
}

VacationTimeline::VacationTimeline(const VacationParams& params, std::uint64_t seed,
                                   std::uint64_t replication) {
    params.validate();
    c_ = params.servers;
    double a = params.resolved_a();
    streams_.reserve(c_ + 1);
    // stream i uses rng stream id i for its walk and c+1+i for the forward side
    streams_.push_back(RenewalStream::arrival(
        params.interarrival, a, RngStream(seed, replication, 0),
        RngStream(seed, replication, static_cast<std::uint64_t>(c_) + 1)));
    for (int i = 1; i <= c_; ++i) {
        streams_.push_back(RenewalStream::service(
            params.service, a, c_, RngStream(seed, replication, static_cast<std::uint64_t>(i)),
            RngStream(seed, replication, static_cast<std::uint64_t>(c_) + 1 + i)));
    }
}

VacationTimeline::VacationTimeline(int servers,
                                   std::vector<std::vector<double>> sim_epochs,
                                   std::vector<std::vector<double>> forward_epochs) {
    c_ = servers;
    if (sim_epochs.size() != static_cast<std::size_t>(servers) + 1 ||
        forward_epochs.size() != sim_epochs.size())
        throw std::invalid_argument("scripted timeline: need c+1 epoch lists");
    for (std::size_t i = 0; i < sim_epochs.size(); ++i)
        streams_.push_back(RenewalStream::scripted(std::move(sim_epochs[i]),
                                                   std::move(forward_epochs[i])));
}

std::int64_t VacationTimeline::x_at(double t) {
    std::int64_t x = static_cast<std::int64_t>(streams_[0].count_upto(t));
    for (int i = 1; i <= c_; ++i) x -= static_cast<std::int64_t>(streams_[i].count_upto(t));
    return x;
}

std::vector<VacationTimeline::Event> VacationTimeline::merged_events(double tau) {
    std::vector<Event> ev;
    for (int i = 0; i <= c_; ++i) {
        streams_[i].materialize_through(tau);
        for (double u : streams_[i].epochs()) {
            if (u > tau) break;
            ev.push_back({u, i});
        }
    }
    std::sort(ev.begin(), ev.end(), [](const Event& a, const Event& b) { return a.u < b.u; });
    for (std::size_t k = 1; k < ev.size(); ++k)
        if (ev[k].u == ev[k - 1].u)
            throw TieError("vacation timeline: two renewal epochs coincide");
    return ev;
}

std::int64_t VacationTimeline::running_max_x(double t) {
    // Walk the jump process X forward from t, holding a certified bound on
    // everything beyond the explored interval; stop once the bound is covered
    // by an observed value.
    if (!streams_[0].walk_backed())
        throw std::logic_error("running_max_x: scripted timeline has no walks");
    std::int64_t interval_max = x_at(t);
    double horizon = t;
    double step = 0.0;
    for (int i = 0; i <= c_; ++i) step = std::max(step, streams_[i].epoch(1));
    step = std::max(step, 1.0);
    while (true) {
        double bound = 0.0;
        for (int i = 0; i <= c_; ++i) bound += streams_[i].future_component_max(horizon);
        if (bound <= static_cast<double>(interval_max)) return interval_max;
        double next = horizon + step;
        step *= 2.0;
        // scan X over (horizon, next]
        std::int64_t x = x_at(horizon);
        std::vector<Event> ev;
        for (int i = 0; i <= c_; ++i) {
            streams_[i].materialize_through(next);
            const auto& ep = streams_[i].epochs();
            auto lo = std::upper_bound(ep.begin(), ep.end(), horizon);
            auto hi = std::upper_bound(ep.begin(), ep.end(), next);
            for (auto it = lo; it != hi; ++it) ev.push_back({*it, i});
        }
        std::sort(ev.begin(), ev.end(),
                  [](const Event& a, const Event& b) { return a.u < b.u; });
        for (const Event& e : ev) {
            x += e.stream == 0 ? 1 : -1;
            interval_max = std::max(interval_max, x);
        }
        horizon = next;
    }
}

std::int64_t VacationTimeline::q_v(double t) { return running_max_x(t) - x_at(t); }

CouplingTrace VacationTimeline::extract_services(double tau,
                                                 std::optional<std::int64_t> q0_override) {
    CouplingTrace trace;
    trace.window = tau;
    trace.q0 = q0_override ? *q0_override : q_v(tau);

    std::vector<Event> ev = merged_events(tau);

    // Prepare arrival records (original time order = descending u).
    std::vector<std::size_t> arrival_events;
    for (std::size_t k = ev.size(); k-- > 0;)
        if (ev[k].stream == 0) arrival_events.push_back(k);
    trace.arrivals.resize(arrival_events.size());
    for (std::size_t n = 0; n < arrival_events.size(); ++n) {
        trace.arrivals[n].time = -ev[arrival_events[n]].u;
        trace.arrivals[n].interarrival =
            n + 1 < arrival_events.size()
                ? -ev[arrival_events[n + 1]].u - trace.arrivals[n].time
                : kNaN;
    }

    // Replay the vacation dynamics forward in original time from -tau.
    // Queue holds synthetic customers (negative ids) then real arrival indices.
    std::deque<std::int64_t> queue;
    for (std::int64_t s = 0; s < trace.q0; ++s) queue.push_back(-1 - s);
    trace.initial_services.assign(static_cast<std::size_t>(trace.q0), kNaN);
    std::int64_t qlen = trace.q0;
    std::size_t next_arrival = 0;
    std::size_t assigned = 0;

    // next epoch of a stream after a given sim-side event: one step down the
    // sim side, or the first forward epoch
    auto activity_length = [&](int stream, std::size_t sim_index) {
        const auto& ep = streams_[stream].epochs();
        double u = ep[sim_index];
        if (sim_index > 0) return u - ep[sim_index - 1];
        return u + streams_[stream].forward_epoch(1);
    };
    // map event position to the index of its epoch within its stream
    std::vector<std::size_t> seen(static_cast<std::size_t>(c_) + 1, 0);
    std::vector<std::size_t> epoch_index(ev.size());
    for (std::size_t k = 0; k < ev.size(); ++k)
        epoch_index[k] = seen[static_cast<std::size_t>(ev[k].stream)]++;

    auto serve_head = [&](double start, int stream, double length) {
        std::int64_t head = queue.front();
        queue.pop_front();
        --qlen;
        if (head < 0) {
            trace.initial_services[static_cast<std::size_t>(-head - 1)] = length;
        } else {
            ArrivalRecord& rec = trace.arrivals[static_cast<std::size_t>(head)];
            rec.service = length;
            rec.service_start = start;
            rec.delay = start - rec.time;
            rec.server = stream;
            rec.assigned = true;
            ++assigned;
        }
    };

    for (std::size_t k = ev.size(); k-- > 0;) {
        double e = -ev[k].u;  // original time
        if (ev[k].stream == 0) {
            queue.push_back(static_cast<std::int64_t>(next_arrival++));
            ++qlen;
        } else if (qlen > 0) {
            serve_head(e, ev[k].stream, activity_length(ev[k].stream, epoch_index[k]));
        }
        trace.qv_path.emplace_back(e, qlen);
    }

    // Continue past original time zero with forward activity epochs until all
    // window arrivals are assigned. Later arrivals cannot overtake anyone in
    // FCFS order, so the arrival stream's forward side is not needed here.
    std::vector<std::size_t> fptr(static_cast<std::size_t>(c_) + 1, 1);
    while (assigned < trace.arrivals.size()) {
        int best = -1;
        double best_t = std::numeric_limits<double>::infinity();
        for (int i = 1; i <= c_; ++i) {
            double t = streams_[i].forward_epoch(fptr[static_cast<std::size_t>(i)]);
            if (t < best_t) {
                best_t = t;
                best = i;
            }
        }
        std::size_t j = fptr[static_cast<std::size_t>(best)]++;
        if (qlen > 0) {
            double length = streams_[best].forward_epoch(j + 1) - best_t;
            serve_head(best_t, best, length);
            trace.qv_path.emplace_back(best_t, qlen);
        }
    }
    return trace;
}

std::vector<std::pair<double, std::int64_t>> VacationTimeline::qv_from_maxima(double tau) {
    std::vector<Event> ev = merged_events(tau);
    std::vector<std::int64_t> xs(ev.size());
    std::int64_t x = 0;
    for (std::size_t k = 0; k < ev.size(); ++k) {
        x += ev[k].stream == 0 ? 1 : -1;
        xs[k] = x;
    }
    std::vector<std::pair<double, std::int64_t>> out(ev.size());
    double cur_m = static_cast<double>(running_max_x(tau));
    for (std::size_t k = ev.size(); k-- > 0;) {
        cur_m = std::max(cur_m, static_cast<double>(xs[k]));
        std::int64_t x_below = xs[k] - (ev[k].stream == 0 ? 1 : -1);
        std::int64_t q = std::max<std::int64_t>(0, static_cast<std::int64_t>(cur_m) - x_below);
        out[k] = {-ev[k].u, q};
    }
    std::reverse(out.begin(), out.end());  // increasing original time
    return out;
}

std::vector<double> VacationTimeline::residuals_before(double t) {
    std::vector<double> res(static_cast<std::size_t>(c_));
    for (int i = 1; i <= c_; ++i) {
        streams_[static_cast<std::size_t>(i)].materialize_through(std::max(-t, 0.0));
        double next = kNaN;
        if (t <= 0.0) {
            // smallest original epoch >= t on the sim side is the largest u <= -t
            const auto& ep = streams_[i].epochs();
            auto it = std::upper_bound(ep.begin(), ep.end(), -t);
            if (it != ep.begin()) {
                next = -*std::prev(it);
            } else {
                next = streams_[i].forward_epoch(1);
            }
        } else {
            std::size_t j = 1;
            while (streams_[i].forward_epoch(j) < t) ++j;
            next = streams_[i].forward_epoch(j);
        }
        res[static_cast<std::size_t>(i - 1)] = next - t;
    }
    return res;
}

KWVector VacationTimeline::w_v_at(const CouplingTrace& trace, std::size_t k) {
    const ArrivalRecord& rec = trace.arrivals.at(k);
    if (!rec.assigned)
        throw std::logic_error("w_v_at: arrival has no assigned service yet");
    KWVector w = residuals_before(rec.service_start);
    std::sort(w.begin(), w.end());
    for (double& x : w) x += rec.delay;
    return w;
}

double VacationTimeline::first_forward_arrival() { return streams_[0].forward_epoch(1); }

std::vector<std::uint64_t> VacationTimeline::renewal_counts() const {
    std::vector<std::uint64_t> counts;
    counts.reserve(streams_.size());
    for (const auto& s : streams_)
        counts.push_back(s.epochs_materialized() + s.forward_materialized());
    return counts;
}

std::uint64_t VacationTimeline::proposal_increments() const {
    std::uint64_t total = 0;
    for (const auto& s : streams_) total += s.proposal_increments();
    return total;
}

void VacationTimeline::dump_csv(std::ostream& os, double tau) {
    std::vector<Event> ev = merged_events(tau);
    std::vector<std::int64_t> xs(ev.size());
    std::int64_t x = 0;
    for (std::size_t k = 0; k < ev.size(); ++k) {
        x += ev[k].stream == 0 ? 1 : -1;
        xs[k] = x;
    }
    std::vector<double> ms(ev.size());
    double cur_m = static_cast<double>(running_max_x(tau));
    for (std::size_t k = ev.size(); k-- > 0;) {
        cur_m = std::max(cur_m, static_cast<double>(xs[k]));
        ms[k] = cur_m;
    }
    os << "time,stream_id,X,M,Q_v\n";
    for (std::size_t k = ev.size(); k-- > 0;) {
        // state just after the event in original time = just below u_k
        std::int64_t x_below = xs[k] - (ev[k].stream == 0 ? 1 : -1);
        double m_below = std::max(ms[k], static_cast<double>(x_below));
        os << -ev[k].u << ',' << ev[k].stream << ',' << x_below << ',' << m_below << ','
           << (static_cast<std::int64_t>(m_below) - x_below) << '\n';
    }
}

}  // namespace exactq
