#include "exactq/walk_max.hpp"

#include <cassert>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace exactq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRootTol = 1e-10;

// Hard guards against a mis-specified walk looping forever. Generously above
// anything a valid configuration can produce.
constexpr std::uint64_t kMaxSegment = 100'000'000;
constexpr std::uint64_t kMaxProposalsPerStep = 10'000'000;

}  // namespace

double WalkSpec::drift() const {
    double m = mean(base);
    return flavor == WalkFlavor::ArrivalType ? 1.0 - a * m : (a / servers) * m - 1.0;
}

double WalkSpec::increment_sup() const {
    if (flavor == WalkFlavor::ArrivalType) return 1.0 - a * ess_inf(base);
    double hi = ess_sup(base);
    return std::isinf(hi) ? kInf : (a / servers) * hi - 1.0;
}

double WalkSpec::psi(double theta) const {
    if (flavor == WalkFlavor::ArrivalType)
        return std::exp(theta) * mgf(base, -a * theta);
    return std::exp(-theta) * mgf(base, (a / servers) * theta);
}

double WalkSpec::psi_theta_max() const {
    if (flavor == WalkFlavor::ArrivalType) return kInf;
    double tmax = theta_max(base);
    return std::isinf(tmax) ? kInf : (servers / a) * tmax;
}

double WalkSpec::sample_increment(RngStream& rng) const {
    if (flavor == WalkFlavor::ArrivalType) return 1.0 - a * sample(base, rng);
    return (a / servers) * sample(base, rng) - 1.0;
}

double WalkSpec::sample_increment_tilted(double theta, RngStream& rng) const {
    if (flavor == WalkFlavor::ArrivalType)
        return 1.0 - a * sample_exp_tilted(base, -a * theta, rng);
    return (a / servers) * sample_exp_tilted(base, (a / servers) * theta, rng) - 1.0;
}

void WalkSpec::validate() const {
    if (a <= 0.0) throw ConfigError("walk: compensation rate a must be > 0");
    if (servers < 1) throw ConfigError("walk: server count must be >= 1");
    double d = drift();
    if (!(d < 0.0)) {
        std::ostringstream os;
        os << "walk: drift " << d << " is not negative; ";
        if (flavor == WalkFlavor::ArrivalType)
            os << "need a > 1/E[A] = " << 1.0 / mean(base);
        else
            os << "need a < c/E[V] = " << servers / mean(base);
        throw ConfigError(os.str());
    }
}

namespace detail {

std::optional<double> cramer_root_or_none(const WalkSpec& spec) {
    spec.validate();
    if (spec.increment_sup() <= 0.0) return std::nullopt;

    double tmax = spec.psi_theta_max();
    // Bracket: find theta_hi with psi > 1.
    double theta_hi = 0.0;
    if (std::isinf(tmax)) {
        theta_hi = 1.0;
        int guard = 0;
        while (spec.psi(theta_hi) <= 1.0) {
            theta_hi *= 2.0;
            if (++guard > 200)
                throw UnsupportedSpecError("cramer_root: psi never exceeds 1 (no bracket)");
        }
    } else {
        // psi diverges at tmax- for rate-based service laws; approach from below
        double frac = 0.5;
        int guard = 0;
        while (spec.psi(tmax * (1.0 - frac)) <= 1.0) {
            frac *= 0.5;
            if (++guard > 200)
                throw UnsupportedSpecError(
                    "cramer_root: psi never exceeds 1 before theta_max (no bracket)");
        }
        theta_hi = tmax * (1.0 - frac);
    }
    // Shrink theta_lo until psi < 1 (psi'(0) = drift < 0 guarantees existence).
    double theta_lo = theta_hi * 0.5;
    while (spec.psi(theta_lo) >= 1.0) theta_lo *= 0.5;

    for (int i = 0; i < 500; ++i) {
        double mid = 0.5 * (theta_lo + theta_hi);
        double f = spec.psi(mid) - 1.0;
        if (std::abs(f) <= kRootTol) return mid;
        (f < 0.0 ? theta_lo : theta_hi) = mid;
        if (theta_hi - theta_lo < 1e-16 * theta_hi) break;
    }
    double root = 0.5 * (theta_lo + theta_hi);
    if (std::abs(spec.psi(root) - 1.0) > kRootTol)
        throw UnsupportedSpecError("cramer_root: bisection failed to reach tolerance");
    return root;
}

CrossResult cross_test_impl(const WalkSpec& spec, const std::optional<double>& theta,
                            double gap, RngStream& rng, std::uint64_t& proposals) {
    if (!theta) return {};  // walk never rises above its start
    double th = *theta;
    CrossResult out;
    double s = 0.0;
    std::vector<double> segment;
    do {
        if (segment.size() > kMaxSegment)
            throw std::runtime_error("cross_test: tilted first passage did not terminate");
        double x = spec.sample_increment_tilted(th, rng);
        ++proposals;
        segment.push_back(x);
        s += x;
    } while (s <= gap);
    double accept = std::exp(-th * s);
    assert(accept <= std::exp(-th * gap) * (1.0 + 1e-12) && accept <= 1.0);
    if (rng.uniform01() < accept) {
        out.crossed = true;
        out.segment = std::move(segment);
    }
    return out;
}

double conditional_step_impl(const WalkSpec& spec, const std::optional<double>& theta,
                             double headroom, RngStream& rng, std::uint64_t& proposals) {
    if (headroom < 0.0)
        throw std::domain_error("conditional_step: headroom must be >= 0");
    for (std::uint64_t i = 0; i < kMaxProposalsPerStep; ++i) {
        double x = spec.sample_increment(rng);
        ++proposals;
        if (x >= headroom) continue;
        if (cross_test_impl(spec, theta, headroom - x, rng, proposals).crossed) continue;
        return x;
    }
    throw std::runtime_error("conditional_step: no proposal accepted");
}

}  // namespace detail

double cramer_root(const WalkSpec& spec) {
    auto root = detail::cramer_root_or_none(spec);
    if (!root)
        throw UnsupportedSpecError(
            "cramer_root: increments are a.s. <= 0, the walk never rises");
    return *root;
}

CrossResult cross_test(const WalkSpec& spec, double gap, RngStream& rng) {
    if (gap < 0.0) throw std::domain_error("cross_test: gap must be >= 0");
    auto theta = detail::cramer_root_or_none(spec);
    std::uint64_t scratch = 0;
    return detail::cross_test_impl(spec, theta, gap, rng, scratch);
}

double conditional_step(const WalkSpec& spec, double headroom, RngStream& rng) {
    auto theta = detail::cramer_root_or_none(spec);
    std::uint64_t scratch = 0;
    return detail::conditional_step_impl(spec, theta, headroom, rng, scratch);
}

MaxWalkStream::MaxWalkStream(WalkSpec spec, RngStream rng)
    : spec_(std::move(spec)), rng_(std::move(rng)), ceiling_(kInf) {
    theta_ = detail::cramer_root_or_none(spec_);
    double s0 = 0.0;
    if (spec_.flavor == WalkFlavor::ServiceType)
        s0 = (spec_.a / spec_.servers) * sample(spec_.base, rng_);
    S_.push_back(s0);
    block_max_ = s0;
    block_argmax_ = 0;
}

MaxWalkStream::MaxWalkStream(WalkSpec spec, double s0, RngStream rng)
    : spec_(std::move(spec)), rng_(std::move(rng)), ceiling_(kInf) {
    theta_ = detail::cramer_root_or_none(spec_);
    S_.push_back(s0);
    block_max_ = s0;
    block_argmax_ = 0;
}

void MaxWalkStream::extend(std::size_t n) {
    while (determined_upto() < static_cast<std::ptrdiff_t>(n)) cycle();
}

void MaxWalkStream::ensure_path(std::size_t n) {
    while (path_length() < n) cycle();
}

double MaxWalkStream::m(std::size_t k) {
    extend(k);
    return M_[k];
}

void MaxWalkStream::append_value(double s_value) {
    S_.push_back(s_value);
    if (s_value > block_max_) {
        block_max_ = s_value;
        block_argmax_ = S_.size() - 1;
    }
}

void MaxWalkStream::determine_block() {
    // Future is certified <= block_max_, so M equals the record on
    // (determined_upto, block_argmax_]; write once.
    while (M_.size() <= block_argmax_) M_.push_back(block_max_);
    ceiling_ = block_max_;
    // Rebuild the record over the still-undetermined tail.
    block_max_ = -kInf;
    block_argmax_ = M_.size() - 1;
    for (std::size_t k = M_.size(); k < S_.size(); ++k) {
        if (S_[k] > block_max_) {
            block_max_ = S_[k];
            block_argmax_ = k;
        }
    }
}

CrossResult MaxWalkStream::cross_internal(double gap) {
    return detail::cross_test_impl(spec_, theta_, gap, rng_, proposals_);
}

double MaxWalkStream::conditional_step_internal(double headroom) {
    return detail::conditional_step_impl(spec_, theta_, headroom, rng_, proposals_);
}

void MaxWalkStream::cycle() {
    if (std::isinf(ceiling_)) {
        // No ceiling yet: the end of the path is the running record; test
        // whether the future ever exceeds it.
        CrossResult cr = cross_internal(block_max_ - S_.back());
        if (cr.crossed) {
            for (double x : cr.segment) append_value(S_.back() + x);
        } else {
            determine_block();
        }
        return;
    }
    if (path_length() == static_cast<std::size_t>(determined_upto())) {
        double x = conditional_step_internal(ceiling_ - S_.back());
        append_value(S_.back() + x);
    }
    // Record test under the ceiling: rejection against paths that would
    // breach it, either inside the crossing segment or afterwards.
    while (true) {
        CrossResult cr = cross_internal(block_max_ - S_.back());
        if (!cr.crossed) {
            determine_block();
            return;
        }
        double climb = 0.0;
        for (double x : cr.segment) climb += x;
        double peak = S_.back() + climb;
        if (peak >= ceiling_) continue;
        if (cross_internal(ceiling_ - peak).crossed) continue;
        for (double x : cr.segment) append_value(S_.back() + x);
        return;
    }
}

}  // namespace exactq
