#include <doctest.h>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/negative_binomial.hpp>
#include <cmath>

#include "compfdp/distributions.hpp"
#include "oracles.hpp"

using namespace compfdp;

TEST_CASE("hand values") {
    CHECK(binom_cdf_half(5, 0) == 0.03125);
    CHECK(binom_cdf_half(4, 2) == doctest::Approx(0.6875).epsilon(1e-15));
    CHECK(binom_cdf_half(7, -1) == 0.0);
    CHECK(binom_cdf_half(7, 7) == 1.0);
    CHECK(nb_cdf_half(1, 0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(nb_cdf_half(1, 4) == doctest::Approx(0.96875).epsilon(1e-15));
    CHECK(nb_cdf_half(3, -1) == 0.0);
    CHECK(nb_upper_tail(1, 5) == 0.03125);
    CHECK(nb_upper_tail(2, 0) == 1.0);
    CHECK(nb_upper_tail(2, 1) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(nb_quantile(1, 0.95) == 4);
    CHECK(nb_quantile(1, 0.5) == 0);
    CHECK(nb_tail_quantile(1, 0.03125) == 4);
}

TEST_CASE("binomial CDF matches Pascal's triangle for n <= 200") {
    double worst = 0.0;
    for (int n = 0; n <= 200; ++n) {
        const auto row = oracle::binom_row(n);
        long double s = 0.0L;
        for (int k = -1; k <= n; ++k) {
            if (k >= 0) s += row[k];
            worst = std::max(worst, std::abs(binom_cdf_half(n, k) - static_cast<double>(s)));
            if (k >= 0) worst = std::max(worst, std::abs(binom_pmf_half(n, k) - static_cast<double>(row[k])));
        }
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("negative binomial CDF and quantile match direct summation for d <= 200") {
    double worst = 0.0;
    for (int d = 1; d <= 200; ++d) {
        // Far enough out that the oracle CDF is 1 to double precision.
        const int kmax = 2 * d + 60 + static_cast<int>(12 * std::sqrt(2.0 * d));
        const auto cdf = oracle::nb_cdf_row(d, kmax);
        for (int k = 0; k <= kmax; ++k) {
            worst = std::max(worst, std::abs(nb_cdf_half(d, k) - static_cast<double>(cdf[k])));
            const double tail = k == 0 ? 1.0 : static_cast<double>(1.0L - cdf[k - 1]);
            worst = std::max(worst, std::abs(nb_upper_tail(d, k) - tail));
        }
        for (double q : {1e-9, 0.001, 0.05, 0.3, 0.5, 0.77, 0.95, 0.999, 1 - 1e-9}) {
            const auto brute = oracle::nb_quantile_exact(d, q);
            INFO("d=" << d << " q=" << q);
            REQUIRE(nb_quantile(d, q) == brute);
        }
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("agreement with Boost for large arguments") {
    for (std::int64_t n : {1000, 10000, 123457}) {
        boost::math::binomial_distribution<double> b(static_cast<double>(n), 0.5);
        for (double frac : {0.3, 0.45, 0.5, 0.52, 0.6}) {
            const auto k = static_cast<std::int64_t>(frac * n);
            const double ref = boost::math::cdf(b, static_cast<double>(k));
            CHECK(binom_cdf_half(n, k) == doctest::Approx(ref).epsilon(1e-10));
        }
    }
    for (std::int64_t d : {500, 1000, 5000}) {
        boost::math::negative_binomial_distribution<double> nb(static_cast<double>(d), 0.5);
        for (double frac : {0.8, 1.0, 1.1, 1.3}) {
            const auto k = static_cast<std::int64_t>(frac * d);
            const double ref = boost::math::cdf(nb, static_cast<double>(k));
            CHECK(nb_cdf_half(d, k) == doctest::Approx(ref).epsilon(1e-10));
            const double upper = boost::math::cdf(boost::math::complement(nb, static_cast<double>(k - 1)));
            CHECK(nb_upper_tail(d, k) == doctest::Approx(upper).epsilon(1e-10));
        }
    }
}

TEST_CASE("monotone and clamped") {
    for (std::int64_t d : {1, 7, 64, 999}) {
        double prev = 0.0;
        for (std::int64_t k = -2; k < 3 * d + 50; ++k) {
            const double c = nb_cdf_half(d, k);
            REQUIRE(c >= prev);
            REQUIRE(c <= 1.0);
            prev = c;
        }
    }
}

TEST_CASE("quantile round trip") {
    compfdp::Rng rng(5);
    for (int t = 0; t < 2000; ++t) {
        const auto d = 1 + static_cast<std::int64_t>(compfdp::uniform_index(rng, 2000));
        const double q = compfdp::uniform01(rng);
        const auto i = nb_quantile(d, q);
        REQUIRE(nb_cdf_half(d, i) >= q);
        REQUIRE(nb_cdf_half(d, i - 1) < q);
        const double u = compfdp::uniform01(rng);
        const auto j = nb_tail_quantile(d, u);
        REQUIRE(nb_upper_tail(d, j + 1) <= u);
        REQUIRE(nb_upper_tail(d, j) > u);
    }
}

TEST_CASE("upper tail at or below u iff k exceeds the 1-u quantile") {
    compfdp::Rng rng(2718);
    int disagreements = 0;
    for (int t = 0; t < 10000; ++t) {
        const auto d = 1 + static_cast<std::int64_t>(compfdp::uniform_index(rng, 500));
        const double u = compfdp::uniform01(rng);
        const auto hi = static_cast<std::uint64_t>(d + 10 * std::sqrt(2.0 * d) + 20);
        const auto k = static_cast<std::int64_t>(compfdp::uniform_index(rng, hi + 1));
        const bool lhs = nb_upper_tail(d, k) <= u;
        const bool rhs = k > nb_quantile(d, 1 - u);
        if (lhs != rhs) ++disagreements;
        const bool exact = k > nb_tail_quantile(d, u);
        REQUIRE(lhs == exact);
    }
    CHECK(disagreements == 0);
}
