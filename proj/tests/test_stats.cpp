#include <doctest.h>

#include <cmath>

#include "exactq/stats.hpp"

using namespace exactq;

TEST_SUITE("stats") {

TEST_CASE("regularized incomplete gamma matches reference values") {
    // reference values from scipy.special.gammainc
    CHECK(gamma_p(0.5, 0.3) == doctest::Approx(0.5614219739190003).epsilon(1e-12));
    CHECK(gamma_p(8.0, 4.5) == doctest::Approx(0.08658647164735603).epsilon(1e-12));
    CHECK(gamma_p(8.0, 12.0) == doctest::Approx(0.9104955031598242).epsilon(1e-12));
    CHECK(gamma_p(1.0, 1.0) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-13));
    CHECK(gamma_p(3.0, 0.0) == 0.0);
}

TEST_CASE("chi-square survival function") {
    // scipy.stats.chi2.sf
    CHECK(chi_square_sf(27.5, 16) == doctest::Approx(0.03624922891396882).epsilon(1e-10));
    CHECK(chi_square_sf(9.62711, 16) == doctest::Approx(0.885363).epsilon(1e-4));
    CHECK(chi_square_sf(0.0, 5) == 1.0);
}

TEST_CASE("kolmogorov tail") {
    // scipy.special.kolmogorov
    CHECK(kolmogorov_sf(1.0) == doctest::Approx(0.2699996716773238).epsilon(1e-10));
    CHECK(kolmogorov_sf(0.5) == doctest::Approx(0.9639452436648751).epsilon(1e-10));
    CHECK(kolmogorov_sf(2.0) == doctest::Approx(0.0006709252558404301).epsilon(1e-8));
    CHECK(kolmogorov_sf(0.05) == 1.0);
}

TEST_CASE("chi-square gof on a hand case") {
    std::vector<std::int64_t> obs{48, 52};
    std::vector<double> probs{0.5, 0.5};
    auto r = chi_square_gof(obs, probs);
    CHECK(r.statistic == doctest::Approx(0.16));
    CHECK(r.dof == 1);
    CHECK(r.p_value == doctest::Approx(0.689157).epsilon(1e-4));
}

TEST_CASE("mean_ci95 and correlation hand cases") {
    MeanCi ci = mean_ci95({1.0, 2.0, 3.0, 4.0});
    CHECK(ci.mean == doctest::Approx(2.5));
    CHECK(ci.stddev == doctest::Approx(std::sqrt(5.0 / 3.0)));
    CHECK(pearson_correlation({1, 2, 3}, {2, 4, 6}) == doctest::Approx(1.0));
    CHECK(pearson_correlation({1, 2, 3}, {3, 2, 1}) == doctest::Approx(-1.0));
}

}  // TEST_SUITE
