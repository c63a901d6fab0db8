#include "exactq/dcftp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace exactq {

namespace {

constexpr double kTol = 1e-9;

// value of a step path (events carry the post-event value) at time t
std::int64_t step_value(const std::vector<std::pair<double, std::int64_t>>& path,
                        double t, std::int64_t initial) {
    std::int64_t v = initial;
    for (const auto& [time, q] : path) {
        if (time > t) break;
        v = q;
    }
    return v;
}

void fail_invariant(const std::string& what) {
    throw std::logic_error("invariant violated: " + what);
}

}  // namespace

std::int64_t StationarySample::in_system() const {
    std::int64_t busy = 0;
    for (double r : z0.remaining)
        if (r > 0.0) ++busy;
    return z0.queue + busy;
}

bool kw_equal(const KWVector& x, const KWVector& y) {
    if (x.size() != y.size()) return false;
    for (std::size_t j = 0; j < x.size(); ++j)
        if (std::abs(x[j] - y[j]) > kTol * (1.0 + std::abs(x[j]))) return false;
    return true;
}

std::optional<std::size_t> detect_coalescence(const std::vector<KWVector>& upper,
                                              const std::vector<KWVector>& lower,
                                              const std::vector<double>& times) {
    if (upper.size() != lower.size() || upper.size() != times.size())
        throw std::invalid_argument("detect_coalescence: sequence length mismatch");
    for (std::size_t n = 0; n < upper.size(); ++n) {
        if (kw_equal(upper[n], lower[n]) && times[n] + upper[n][0] <= 0.0)
            return n;
    }
    return std::nullopt;
}

namespace {

struct HorizonAttempt {
    CouplingTrace trace;
    TrafficTrace traffic;
    std::vector<double> times;
    std::vector<KWVector> uppers;
    std::vector<KWVector> lowers;
    std::optional<std::size_t> hit;
};

// The coupled upper-bound replay of Lemma-style dominance checks: started at
// the first window arrival with the vacation system's queue and residual
// activities, the queued customers carrying their extracted services.
ReplayOutcome upper_replay(const DcftpConfig& cfg, VacationTimeline& timeline,
                           const HorizonAttempt& at, double end_time, bool record) {
    double t_kappa = at.traffic.front().time;
    auto it = std::lower_bound(
        at.trace.qv_path.begin(), at.trace.qv_path.end(), t_kappa,
        [](const auto& p, double t) { return p.first < t; });
    if (it == at.trace.qv_path.end() || it->first != t_kappa)
        throw std::logic_error("upper_replay: first arrival not found in Q_v path");
    std::int64_t q_at_kappa = it->second;  // includes the arrival itself
    std::int64_t synth_waiting = q_at_kappa - 1;
    std::vector<double> queued;
    for (std::int64_t s = at.trace.q0 - synth_waiting; s < at.trace.q0; ++s)
        queued.push_back(at.trace.initial_services[static_cast<std::size_t>(s)]);
    queued.push_back(at.traffic.front().service);
    std::vector<double> busy = timeline.residuals_before(t_kappa);
    return replay(at.traffic, 1, at.traffic.size() - 1, cfg.servers, t_kappa, end_time,
                  busy, queued, record);
}

void check_structural_invariants(const DcftpConfig& cfg, VacationTimeline& timeline,
                                 const HorizonAttempt& at, const ReplayOutcome& lower_out) {
    std::size_t n = *at.hit;
    // Sandwich: zero-start recursion never exceeds the vacation-start one.
    for (std::size_t i = 0; i < at.uppers.size(); ++i)
        for (std::size_t j = 0; j < at.uppers[i].size(); ++j)
            if (at.lowers[i][j] > at.uppers[i][j] + kTol)
                fail_invariant("sandwich: lower KW exceeds upper KW");
    // Absorbing coalescence: equality persists past the detection index.
    std::size_t upto = std::min(at.uppers.size() - 1, n + 5);
    for (std::size_t i = n; i <= upto; ++i)
        if (!kw_equal(at.uppers[i], at.lowers[i]))
            fail_invariant("absorbing coalescence: sequences diverged after detection");
    // Queue dominance lower <= upper <= Q_v at every event.
    ReplayOutcome upper_out = upper_replay(cfg, timeline, at, 0.0, true);
    double t_kappa = at.traffic.front().time;
    std::vector<double> probes;
    for (const auto& [t, q] : lower_out.queue_path) probes.push_back(t);
    for (const auto& [t, q] : upper_out.queue_path) probes.push_back(t);
    for (const auto& [t, q] : at.trace.qv_path)
        if (t >= t_kappa && t <= 0.0) probes.push_back(t);
    std::sort(probes.begin(), probes.end());
    std::int64_t q0_at_kappa = step_value(at.trace.qv_path, t_kappa, at.trace.q0);
    for (double t : probes) {
        std::int64_t ql = step_value(lower_out.queue_path, t, 0);
        std::int64_t qu = step_value(upper_out.queue_path, t, q0_at_kappa);
        std::int64_t qv = step_value(at.trace.qv_path, t, at.trace.q0);
        if (ql > qu || qu > qv) {
            std::ostringstream os;
            os << "queue dominance at t=" << t << ": lower=" << ql << " upper=" << qu
               << " Q_v=" << qv;
            fail_invariant(os.str());
        }
    }
    // Reconstruction equality: the swapped initial pair gives the same Z(0).
    const QueueState& a = lower_out.state;
    const QueueState& b = upper_out.state;
    bool same = a.queue == b.queue && a.remaining.size() == b.remaining.size() &&
                std::abs(a.since_arrival - b.since_arrival) <= kTol;
    if (same)
        for (std::size_t j = 0; j < a.remaining.size(); ++j)
            if (std::abs(a.remaining[j] - b.remaining[j]) > kTol * (1.0 + a.remaining[j]))
                same = false;
    if (!same) fail_invariant("reconstruction: z+ and z- replays disagree at time 0");
}

}  // namespace

StationarySample sample_stationary(const DcftpConfig& cfg, std::uint64_t replication) {
    cfg.validate();
    VacationTimeline timeline(cfg.vacation_params(), cfg.seed, replication);

    for (int k = 1; k <= cfg.max_doublings; ++k) {
        double tau = cfg.t0 * std::pow(2.0, k);
        HorizonAttempt at;
        at.trace = timeline.extract_services(tau);
        if (at.trace.arrivals.empty()) continue;
        at.traffic = at.trace.traffic();
        at.times.reserve(at.traffic.size());
        for (const auto& e : at.traffic) at.times.push_back(e.time);

        KWVector w_minus(static_cast<std::size_t>(cfg.servers), 0.0);
        KWVector w_plus = timeline.w_v_at(at.trace, 0);
        std::size_t last = at.traffic.size() - 1;
        at.uppers = kw_run(at.traffic, w_plus, 0, last);
        at.lowers = kw_run(at.traffic, w_minus, 0, last);
        at.hit = detect_coalescence(at.uppers, at.lowers, at.times);
        if (!at.hit) continue;

        std::size_t n = *at.hit;
        ReplayOutcome lower_out =
            replay(at.traffic, 0, last, cfg.servers, at.traffic.front().time, 0.0, {}, {},
                   cfg.check_invariants);
        if (cfg.check_invariants) check_structural_invariants(cfg, timeline, at, lower_out);

        StationarySample out;
        out.z0 = lower_out.state;
        out.coalescence_time = -(at.times[n] + at.uppers[n][0]);
        out.horizon_k = k;
        out.horizon_time = tau;
        out.window_arrivals = static_cast<std::int64_t>(at.traffic.size());
        out.detect_offset = static_cast<std::int64_t>(n);
        if (cfg.want_w1) {
            double t1 = timeline.first_forward_arrival();
            double last_gap = t1 - at.traffic.back().time;
            out.w1 = kw_step(at.lowers.back(), at.traffic.back().service, last_gap);
        }
        out.renewals = timeline.renewal_counts();
        out.proposal_increments = timeline.proposal_increments();
        return out;
    }
    std::ostringstream os;
    os << "resource cap: no coalescence within " << cfg.max_doublings
       << " horizon doublings (last horizon " << cfg.t0 * std::pow(2.0, cfg.max_doublings)
       << ")";
    throw ResourceCapError(os.str());
}

}  // namespace exactq
