#pragma once

#include <string>
#include <vector>

#include "exactq/rng.hpp"

namespace exactq {

enum class DistKind { Exponential, Erlang, HyperExponential, Uniform, Deterministic };

// Parametric description of a strictly positive continuous (or, for tests,
// deterministic) law. The catalog is closed on purpose: every member has an
// analytic mean, an MGF finite on a right neighborhood of zero, and exact
// equilibrium / residual-given-age samplers, which the sampling pipeline
// depends on.
struct DistributionSpec {
    DistKind kind = DistKind::Exponential;
    double rate = 0.0;                  // Exponential, Erlang
    int shape = 0;                      // Erlang
    std::vector<double> weights;        // HyperExponential
    std::vector<double> rates;          // HyperExponential
    double lo = 0.0, hi = 0.0;          // Uniform
    double value = 0.0;                 // Deterministic

    static DistributionSpec exponential(double rate);
    static DistributionSpec erlang(int shape, double rate);
    static DistributionSpec hyperexponential(std::vector<double> weights,
                                             std::vector<double> rates);
    static DistributionSpec uniform(double lo, double hi);
    static DistributionSpec deterministic(double value);

    std::string describe() const;
};

double mean(const DistributionSpec& d);
double variance(const DistributionSpec& d);

// Supremum of the set where the MGF is finite. +inf for Uniform/Deterministic,
// the smallest rate otherwise.
double theta_max(const DistributionSpec& d);

// E[exp(theta*X)], defined for every theta < theta_max (negative theta included).
// Throws std::domain_error otherwise.
double mgf(const DistributionSpec& d, double theta);

double cdf(const DistributionSpec& d, double x);

double ess_inf(const DistributionSpec& d);
double ess_sup(const DistributionSpec& d);  // +inf for unbounded kinds

// True only for Deterministic; the DCFTP driver rejects such inputs.
bool has_atoms(const DistributionSpec& d);

double sample(const DistributionSpec& d, RngStream& rng);

// Draw from the equilibrium (integrated-tail) distribution
// F_e(x) = mean^{-1} * \int_0^x (1-F(u)) du. Closed form per kind.
double sample_equilibrium(const DistributionSpec& d, RngStream& rng);

// Draw the forward residual of a renewal interval given its backward age:
// density f |-> g(age+f) / tail(age) on (0, inf). Throws std::domain_error
// when tail(age) = 0.
double sample_residual_given_age(const DistributionSpec& d, double age, RngStream& rng);

// Draw from the exponentially tilted law, density \propto exp(s*x) g(x).
// Requires s < theta_max; s may be negative. Closed under the catalog
// (Exponential -> Exponential with shifted rate, etc). Used by the walk engine.
double sample_exp_tilted(const DistributionSpec& d, double s, RngStream& rng);

}  // namespace exactq
