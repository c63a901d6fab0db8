#include "exactq/analytics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "exactq/errors.hpp"

namespace exactq {

void MmcParams::validate() const {
    if (lambda <= 0.0 || mu <= 0.0 || servers < 1)
        throw ConfigError("mmc: lambda, mu must be > 0 and servers >= 1");
    if (!(rho() < 1.0)) throw ConfigError("mmc: unstable, rho >= 1");
}

std::vector<double> erlang_c_pmf(const MmcParams& p, int n_max) {
    p.validate();
    if (n_max < 0) throw std::invalid_argument("erlang_c_pmf: n_max must be >= 0");
    double offered = p.lambda / p.mu;
    double rho = p.rho();
    int c = p.servers;
    // unnormalized masses: a^n/n! for n <= c, geometric ratio rho beyond
    std::vector<double> mass(static_cast<std::size_t>(n_max) + 1);
    double term = 1.0;
    mass[0] = term;
    for (int n = 1; n <= n_max; ++n) {
        term *= n <= c ? offered / n : rho;
        mass[static_cast<std::size_t>(n)] = term;
    }
    // normalizer: sum_{n<c} a^n/n! + (a^c/c!) / (1-rho)
    double z = 1.0, head_term = 1.0;
    for (int n = 1; n < c; ++n) {
        head_term *= offered / n;
        z += head_term;
    }
    head_term *= offered / c;  // a^c/c!
    z += head_term / (1.0 - rho);

    std::vector<double> pmf(static_cast<std::size_t>(n_max) + 2);
    double head = 0.0;
    for (int n = 0; n <= n_max; ++n) {
        pmf[static_cast<std::size_t>(n)] = mass[static_cast<std::size_t>(n)] / z;
        head += pmf[static_cast<std::size_t>(n)];
    }
    pmf.back() = std::max(0.0, 1.0 - head);
    return pmf;
}

std::vector<double> vacation_mmc_qlen_pmf(const MmcParams& p, int n_max) {
    p.validate();
    if (n_max < 0) throw std::invalid_argument("vacation_mmc_qlen_pmf: n_max must be >= 0");
    double rho = p.rho();
    std::vector<double> pmf(static_cast<std::size_t>(n_max) + 2);
    double head = 0.0;
    for (int j = 0; j <= n_max; ++j) {
        pmf[static_cast<std::size_t>(j)] = (1.0 - rho) * std::pow(rho, j);
        head += pmf[static_cast<std::size_t>(j)];
    }
    pmf.back() = std::max(0.0, 1.0 - head);
    return pmf;
}

MmcParams regime_params(ScalingRegime regime, double s) {
    MmcParams p;
    p.lambda = s;
    p.mu = 1.0;
    p.servers = regime == ScalingRegime::QD
                    ? static_cast<int>(std::llround(1.2 * s))
                    : static_cast<int>(std::llround(s + 2.0 * std::sqrt(s)));
    return p;
}

namespace {

double exp_draw(double rate, RngStream& rng) { return -std::log(rng.uniform01()) / rate; }

bool states_equal(const FcfsQueue& a, const FcfsQueue& b) {
    if (a.queue_length() != b.queue_length()) return false;
    if (a.busy_count() != b.busy_count()) return false;
    QueueState sa = a.snapshot(), sb = b.snapshot();
    return sa.remaining == sb.remaining;
}

}  // namespace

double forward_coupled_coalescence_time(const MmcParams& p, RngStream& rng,
                                        bool start_equal) {
    p.validate();
    int c = p.servers;
    double rho = p.rho();

    FcfsQueue upper(c, 0.0), lower(c, 0.0);
    if (!start_equal) {
        std::int64_t q0 =
            static_cast<std::int64_t>(std::floor(std::log(rng.uniform01()) / std::log(rho)));
        std::vector<double> busy(static_cast<std::size_t>(c));
        for (double& r : busy) r = exp_draw(p.mu, rng);
        std::vector<double> queued(static_cast<std::size_t>(q0));
        for (double& v : queued) v = exp_draw(p.mu, rng);
        upper.preload(busy, queued);
    }
    if (states_equal(upper, lower)) return 0.0;

    double next_arrival = exp_draw(p.lambda, rng);
    constexpr std::uint64_t kMaxEvents = 500'000'000;
    for (std::uint64_t events = 0; events < kMaxEvents; ++events) {
        double t = std::min({next_arrival, upper.next_completion(), lower.next_completion()});
        upper.advance_to(t);
        lower.advance_to(t);
        if (t == next_arrival) {
            double v = exp_draw(p.mu, rng);
            upper.arrive(t, v);
            lower.arrive(t, v);
            next_arrival = t + exp_draw(p.lambda, rng);
        }
        if (states_equal(upper, lower)) return t;
    }
    throw std::runtime_error("forward_coupled_coalescence_time: no coalescence");
}

CoalescenceStudyRow coalescence_study_point(ScalingRegime regime, double s,
                                            std::size_t reps, std::uint64_t seed,
                                            int threads) {
    MmcParams p = regime_params(regime, s);
    std::vector<double> ts(reps);
    parallel_for_reps(reps, threads, [&](std::size_t r) {
        RngStream rng(seed, r, 0);
        ts[r] = forward_coupled_coalescence_time(p, rng);
    });
    CoalescenceStudyRow row;
    row.scale = s;
    row.reps = reps;
    row.t = mean_ci95(ts);
    return row;
}

std::vector<ComplexityRow> complexity_study(const std::vector<double>& lambdas,
                                            double mu, int servers, double t0_arrivals,
                                            std::size_t reps, std::uint64_t seed,
                                            int threads) {
    std::vector<ComplexityRow> rows;
    rows.reserve(lambdas.size());
    for (std::size_t li = 0; li < lambdas.size(); ++li) {
        DcftpConfig cfg;
        cfg.interarrival = DistributionSpec::exponential(lambdas[li]);
        cfg.service = DistributionSpec::exponential(mu);
        cfg.servers = servers;
        cfg.t0 = t0_arrivals / lambdas[li];
        cfg.seed = splitmix64(seed ^ (li + 1));

        std::vector<double> renewals(reps), proposals(reps), ts(reps), horizons(reps);
        parallel_for_reps(reps, threads, [&](std::size_t r) {
            StationarySample s = sample_stationary(cfg, r);
            double total = 0.0;
            for (auto n : s.renewals) total += static_cast<double>(n);
            renewals[r] = total;
            proposals[r] = static_cast<double>(s.proposal_increments);
            ts[r] = s.coalescence_time;
            horizons[r] = s.horizon_time;
        });
        ComplexityRow row;
        row.lambda = lambdas[li];
        row.rho = lambdas[li] / (servers * mu);
        row.mean_renewals = mean_ci95(renewals).mean;
        row.mean_proposals = mean_ci95(proposals).mean;
        row.mean_sampled = row.mean_renewals + row.mean_proposals;
        row.mean_t = mean_ci95(ts).mean;
        row.mean_horizon = mean_ci95(horizons).mean;
        row.scaled_sampled = row.mean_sampled * (1.0 - row.rho) * (1.0 - row.rho);
        rows.push_back(row);
    }
    return rows;
}

void parallel_for_reps(std::size_t reps, int threads,
                       const std::function<void(std::size_t)>& fn) {
    threads = std::max(threads, 1);
    if (threads == 1) {
        for (std::size_t r = 0; r < reps; ++r) fn(r);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mu;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int i = 0; i < threads; ++i) {
        pool.emplace_back([&] {
            while (true) {
                std::size_t r = next.fetch_add(1);
                if (r >= reps) return;
                try {
                    fn(r);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mu);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace exactq
