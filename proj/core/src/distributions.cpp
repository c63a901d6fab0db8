#include "exactq/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "exactq/errors.hpp"

namespace exactq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
}

double exp_sample(double rate, RngStream& rng) {
    return -std::log(rng.uniform01()) / rate;
}

double erlang_sample(int shape, double rate, RngStream& rng) {
    double acc = 0.0;
    for (int i = 0; i < shape; ++i) acc += -std::log(rng.uniform01());
    return acc / rate;
}

// Index into a normalized weight vector by inverse CDF.
std::size_t pick_component(const std::vector<double>& w, RngStream& rng) {
    double u = rng.uniform01();
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
        acc += w[i];
        if (u < acc) return i;
    }
    return w.size() - 1;
}

// Inverse CDF of density \propto exp(s*x) on [lo, hi].
double truncated_tilt_sample(double lo, double hi, double s, RngStream& rng) {
    double u = rng.uniform01();
    double span = hi - lo;
    if (std::abs(s) * span < 1e-12) return lo + span * u;
    double g = std::expm1(s * span);  // e^{s*span} - 1, sign follows s
    return lo + std::log1p(u * g) / s;
}

}  // namespace

DistributionSpec DistributionSpec::exponential(double rate) {
    require(rate > 0.0, "exponential: rate must be > 0");
    DistributionSpec d;
    d.kind = DistKind::Exponential;
    d.rate = rate;
    return d;
}

DistributionSpec DistributionSpec::erlang(int shape, double rate) {
    require(shape >= 1, "erlang: shape must be >= 1");
    require(rate > 0.0, "erlang: rate must be > 0");
    DistributionSpec d;
    d.kind = DistKind::Erlang;
    d.shape = shape;
    d.rate = rate;
    return d;
}

DistributionSpec DistributionSpec::hyperexponential(std::vector<double> weights,
                                                    std::vector<double> rates) {
    require(!weights.empty() && weights.size() == rates.size(),
            "hyperexponential: weights and rates must be non-empty and equal length");
    double total = 0.0;
    for (double w : weights) {
        require(w > 0.0, "hyperexponential: weights must be > 0");
        total += w;
    }
    require(std::abs(total - 1.0) < 1e-9, "hyperexponential: weights must sum to 1");
    for (double& w : weights) w /= total;
    for (double r : rates) require(r > 0.0, "hyperexponential: rates must be > 0");
    DistributionSpec d;
    d.kind = DistKind::HyperExponential;
    d.weights = std::move(weights);
    d.rates = std::move(rates);
    return d;
}

DistributionSpec DistributionSpec::uniform(double lo, double hi) {
    require(lo >= 0.0 && hi > lo, "uniform: need 0 <= lo < hi");
    DistributionSpec d;
    d.kind = DistKind::Uniform;
    d.lo = lo;
    d.hi = hi;
    return d;
}

DistributionSpec DistributionSpec::deterministic(double value) {
    require(value > 0.0, "deterministic: value must be > 0");
    DistributionSpec d;
    d.kind = DistKind::Deterministic;
    d.value = value;
    return d;
}

std::string DistributionSpec::describe() const {
    std::ostringstream os;
    switch (kind) {
        case DistKind::Exponential: os << "exp(" << rate << ")"; break;
        case DistKind::Erlang: os << "erlang(" << shape << "," << rate << ")"; break;
        case DistKind::HyperExponential: {
            os << "hyperexp(";
            for (std::size_t i = 0; i < weights.size(); ++i)
                os << (i ? "," : "") << weights[i] << ":" << rates[i];
            os << ")";
            break;
        }
        case DistKind::Uniform: os << "uniform(" << lo << "," << hi << ")"; break;
        case DistKind::Deterministic: os << "det(" << value << ")"; break;
    }
    return os.str();
}

double mean(const DistributionSpec& d) {
    switch (d.kind) {
        case DistKind::Exponential: return 1.0 / d.rate;
        case DistKind::Erlang: return d.shape / d.rate;
        case DistKind::HyperExponential: {
            double m = 0.0;
            for (std::size_t i = 0; i < d.weights.size(); ++i) m += d.weights[i] / d.rates[i];
            return m;
        }
        case DistKind::Uniform: return 0.5 * (d.lo + d.hi);
        case DistKind::Deterministic: return d.value;
    }
    return 0.0;
}

double variance(const DistributionSpec& d) {
    switch (d.kind) {
        case DistKind::Exponential: return 1.0 / (d.rate * d.rate);
        case DistKind::Erlang: return d.shape / (d.rate * d.rate);
        case DistKind::HyperExponential: {
            double m = mean(d), m2 = 0.0;
            for (std::size_t i = 0; i < d.weights.size(); ++i)
                m2 += d.weights[i] * 2.0 / (d.rates[i] * d.rates[i]);
            return m2 - m * m;
        }
        case DistKind::Uniform: {
            double span = d.hi - d.lo;
            return span * span / 12.0;
        }
        case DistKind::Deterministic: return 0.0;
    }
    return 0.0;
}

double theta_max(const DistributionSpec& d) {
    switch (d.kind) {
        case DistKind::Exponential: return d.rate;
        case DistKind::Erlang: return d.rate;
        case DistKind::HyperExponential:
            return *std::min_element(d.rates.begin(), d.rates.end());
        case DistKind::Uniform:
        case DistKind::Deterministic: return kInf;
    }
    return 0.0;
}

double mgf(const DistributionSpec& d, double theta) {
    double tmax = theta_max(d);
    if (theta >= tmax) {
        std::ostringstream os;
        os << "mgf: theta=" << theta << " not below theta_max=" << tmax
           << " for " << d.describe();
        throw std::domain_error(os.str());
    }
    switch (d.kind) {
        case DistKind::Exponential: return d.rate / (d.rate - theta);
        case DistKind::Erlang: return std::pow(d.rate / (d.rate - theta), d.shape);
        case DistKind::HyperExponential: {
            double m = 0.0;
            for (std::size_t i = 0; i < d.weights.size(); ++i)
                m += d.weights[i] * d.rates[i] / (d.rates[i] - theta);
            return m;
        }
        case DistKind::Uniform: {
            double span = d.hi - d.lo;
            if (std::abs(theta) * span < 1e-12) return std::exp(theta * 0.5 * (d.lo + d.hi));
            return (std::exp(theta * d.hi) - std::exp(theta * d.lo)) / (theta * span);
        }
        case DistKind::Deterministic: return std::exp(theta * d.value);
    }
    return 0.0;
}

double cdf(const DistributionSpec& d, double x) {
    if (x <= 0.0) return 0.0;
    switch (d.kind) {
        case DistKind::Exponential: return -std::expm1(-d.rate * x);
        case DistKind::Erlang: {
            // 1 - sum_{j<k} e^{-bx} (bx)^j / j!
            double bx = d.rate * x;
            double term = std::exp(-bx);
            double tail = term;
            for (int j = 1; j < d.shape; ++j) {
                term *= bx / j;
                tail += term;
            }
            return 1.0 - tail;
        }
        case DistKind::HyperExponential: {
            double c = 0.0;
            for (std::size_t i = 0; i < d.weights.size(); ++i)
                c += d.weights[i] * -std::expm1(-d.rates[i] * x);
            return c;
        }
        case DistKind::Uniform:
            if (x <= d.lo) return 0.0;
            if (x >= d.hi) return 1.0;
            return (x - d.lo) / (d.hi - d.lo);
        case DistKind::Deterministic: return x >= d.value ? 1.0 : 0.0;
    }
    return 0.0;
}

double ess_inf(const DistributionSpec& d) {
    switch (d.kind) {
        case DistKind::Exponential:
        case DistKind::Erlang:
        case DistKind::HyperExponential: return 0.0;
        case DistKind::Uniform: return d.lo;
        case DistKind::Deterministic: return d.value;
    }
    return 0.0;
}

double ess_sup(const DistributionSpec& d) {
    switch (d.kind) {
        case DistKind::Exponential:
        case DistKind::Erlang:
        case DistKind::HyperExponential: return kInf;
        case DistKind::Uniform: return d.hi;
        case DistKind::Deterministic: return d.value;
    }
    return 0.0;
}

bool has_atoms(const DistributionSpec& d) { return d.kind == DistKind::Deterministic; }

double sample(const DistributionSpec& d, RngStream& rng) {
    switch (d.kind) {
        case DistKind::Exponential: return exp_sample(d.rate, rng);
        case DistKind::Erlang: return erlang_sample(d.shape, d.rate, rng);
        case DistKind::HyperExponential: {
            std::size_t i = pick_component(d.weights, rng);
            return exp_sample(d.rates[i], rng);
        }
        case DistKind::Uniform: return d.lo + (d.hi - d.lo) * rng.uniform01();
        case DistKind::Deterministic: return d.value;
    }
    return 0.0;
}

double sample_equilibrium(const DistributionSpec& d, RngStream& rng) {
    switch (d.kind) {
        case DistKind::Exponential:
            // memoryless: equilibrium law equals the law itself
            return exp_sample(d.rate, rng);
        case DistKind::Erlang: {
            // uniform mixture over Erlang(j, rate), j = 1..shape
            int j = 1 + static_cast<int>(rng.uniform01() * d.shape);
            j = std::min(j, d.shape);
            return erlang_sample(j, d.rate, rng);
        }
        case DistKind::HyperExponential: {
            // reweight components by p_i/rate_i; rates unchanged
            std::vector<double> w(d.weights.size());
            double total = 0.0;
            for (std::size_t i = 0; i < w.size(); ++i) {
                w[i] = d.weights[i] / d.rates[i];
                total += w[i];
            }
            for (double& x : w) x /= total;
            std::size_t i = pick_component(w, rng);
            return exp_sample(d.rates[i], rng);
        }
        case DistKind::Uniform: {
            // integrated tail: linear CDF up to lo, then a parabolic cap
            double y = rng.uniform01() * mean(d);
            if (y <= d.lo) return y;
            double span = d.hi - d.lo;
            double rad = span * span - 2.0 * span * (y - d.lo);
            return d.hi - std::sqrt(std::max(rad, 0.0));
        }
        case DistKind::Deterministic:
            // equilibrium of a point mass at v is Uniform(0, v)
            return d.value * rng.uniform01();
    }
    return 0.0;
}

double sample_residual_given_age(const DistributionSpec& d, double age, RngStream& rng) {
    if (age < 0.0) throw std::domain_error("sample_residual_given_age: age must be >= 0");
    switch (d.kind) {
        case DistKind::Exponential: return exp_sample(d.rate, rng);
        case DistKind::Erlang: {
            // Phases completed by the age follow a Poisson(rate*age) truncated
            // below shape; the residual is Exp(rate) for the current phase
            // plus the untouched phases.
            double ba = d.rate * age;
            std::vector<double> w(d.shape);
            double term = 1.0, total = 0.0;
            for (int j = 0; j < d.shape; ++j) {
                if (j > 0) term *= ba / j;
                w[j] = term;
                total += term;
            }
            for (double& x : w) x /= total;
            int j = static_cast<int>(pick_component(w, rng));
            return erlang_sample(d.shape - j, d.rate, rng);
        }
        case DistKind::HyperExponential: {
            // posterior over components given survival to the age
            std::vector<double> w(d.weights.size());
            double total = 0.0;
            for (std::size_t i = 0; i < w.size(); ++i) {
                w[i] = d.weights[i] * std::exp(-d.rates[i] * age);
                total += w[i];
            }
            if (total <= 0.0)
                throw std::domain_error("sample_residual_given_age: tail underflow at age");
            for (double& x : w) x /= total;
            std::size_t i = pick_component(w, rng);
            return exp_sample(d.rates[i], rng);
        }
        case DistKind::Uniform: {
            if (age >= d.hi)
                throw std::domain_error("sample_residual_given_age: age outside uniform support");
            double a = std::max(d.lo - age, 0.0);
            double b = d.hi - age;
            return a + (b - a) * rng.uniform01();
        }
        case DistKind::Deterministic:
            if (age >= d.value)
                throw std::domain_error("sample_residual_given_age: age outside support");
            return d.value - age;
    }
    return 0.0;
}

double sample_exp_tilted(const DistributionSpec& d, double s, RngStream& rng) {
    if (s >= theta_max(d))
        throw std::domain_error("sample_exp_tilted: tilt parameter not below theta_max");
    switch (d.kind) {
        case DistKind::Exponential: return exp_sample(d.rate - s, rng);
        case DistKind::Erlang: return erlang_sample(d.shape, d.rate - s, rng);
        case DistKind::HyperExponential: {
            std::vector<double> w(d.weights.size());
            double total = 0.0;
            for (std::size_t i = 0; i < w.size(); ++i) {
                w[i] = d.weights[i] * d.rates[i] / (d.rates[i] - s);
                total += w[i];
            }
            for (double& x : w) x /= total;
            std::size_t i = pick_component(w, rng);
            return exp_sample(d.rates[i] - s, rng);
        }
        case DistKind::Uniform: return truncated_tilt_sample(d.lo, d.hi, s, rng);
        case DistKind::Deterministic: return d.value;
    }
    return 0.0;
}

}  // namespace exactq
