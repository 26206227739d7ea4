#include <doctest.h>

#include <cmath>
#include <limits>

#include "compfdp/bands.hpp"
#include "compfdp/errors.hpp"
#include "compfdp/simgen.hpp"

using namespace compfdp;

TEST_CASE("all-foreign spectra are true nulls with fair labels") {
    SpectrumIdParams p;
    p.m = 100000;
    p.pi0 = 1.0;
    p.seed = 21;
    const auto d = gen_spectrum_id(p);
    std::size_t wins = 0;
    for (std::size_t i = 0; i < p.m; ++i) {
        REQUIRE(d.truth.is_true_null[i]);
        wins += d.pairs[i].target_score > d.pairs[i].decoy_score;
    }
    CHECK(std::abs(wins / double(p.m) - 0.5) <= 4 * std::sqrt(0.25 / p.m));
}

TEST_CASE("calibrated model") {
    SpectrumIdParams p;
    p.m = 100000;
    p.seed = 8;
    const auto d = gen_spectrum_id(p);
    std::size_t nulls = 0, null_decoys = 0;
    for (std::size_t i = 0; i < p.m; ++i) {
        const auto& s = d.pairs[i];
        REQUIRE(std::isfinite(s.target_score));
        REQUIRE(s.target_score >= 0.0);
        REQUIRE(s.target_score <= 1.0);
        REQUIRE(s.decoy_score >= 0.0);
        REQUIRE(s.decoy_score < 1.0);
        if (d.truth.is_true_null[i]) {
            ++nulls;
            null_decoys += s.decoy_score > s.target_score;
        } else {
            // A false null is a native spectrum whose true match beats both competitors.
            REQUIRE(s.target_score >= s.decoy_score);
        }
    }
    // True nulls are at least as likely to lose the competition as to win it.
    const double frac = null_decoys / double(nulls);
    CHECK(frac >= 0.5 - 2 * std::sqrt(0.25 / nulls));
}

TEST_CASE("uncalibrated model keeps every competition outcome") {
    SpectrumIdParams cal;
    cal.m = 50000;
    cal.seed = 99;
    auto uncal = cal;
    uncal.calibrated = false;
    // The generator itself throws if a transform flips an outcome.
    const auto u = gen_spectrum_id(uncal);
    REQUIRE(u.pairs.size() == cal.m);
    for (const auto& s : u.pairs) {
        REQUIRE(std::isfinite(s.target_score));
        REQUIRE(std::isfinite(s.decoy_score));
    }
    const GumbelParams g{30.0, 5.0};
    double prev = -std::numeric_limits<double>::infinity();
    for (double x = 1e-6; x < 1.0; x += 0.001) {
        const double q = gumbel_quantile(x, g);
        REQUIRE(q > prev);
        prev = q;
    }
}

TEST_CASE("seeds") {
    SpectrumIdParams p;
    p.m = 500;
    p.seed = 1;
    const auto a = gen_spectrum_id(p);
    const auto b = gen_spectrum_id(p);
    p.seed = 2;
    const auto c = gen_spectrum_id(p);
    bool same = true, differ = false;
    for (std::size_t i = 0; i < 500; ++i) {
        same &= a.pairs[i].target_score == b.pairs[i].target_score && a.pairs[i].decoy_score == b.pairs[i].decoy_score;
        differ |= a.pairs[i].decoy_score != c.pairs[i].decoy_score;
    }
    CHECK(same);
    CHECK(differ);
    CHECK(default_gumbel_pool().size() == 500);
}

TEST_CASE("parameter checks") {
    SpectrumIdParams p;
    p.pi0 = 1.5;
    CHECK_THROWS_AS(gen_spectrum_id(p), DomainError);
    p.pi0 = 0.5;
    p.a = 0.0;
    CHECK_THROWS_AS(gen_spectrum_id(p), DomainError);
    p.a = 0.05;
    p.calibrated = false;
    p.pool = {GumbelParams{1.0, -2.0}};
    CHECK_THROWS_AS(gen_spectrum_id(p), DomainError);
    CHECK_THROWS_AS(gen_generic_null(10, 11, 1), DomainError);
}

TEST_CASE("generic null") {
    const auto d = gen_generic_null(100000, 0, 3);
    std::size_t wins = 0;
    for (const auto& h : d.hypotheses) wins += h.label == kTargetWin;
    CHECK(std::abs(wins / 1e5 - 0.5) <= 4 * std::sqrt(0.25 / 1e5));

    const auto all = gen_generic_null(300, 300, 4);
    Rng rng(0);
    const auto seq = build_sequence(all.hypotheses, rng);
    const auto r = run_tdc(seq, 0.1);
    CHECK(r.k == 300);
    CHECK(true_fdp(r, all.truth) == 0.0);

    const auto mixed = gen_generic_null(1000, 40, 5);
    const auto s = build_sequence(mixed.hypotheses, rng);
    for (std::size_t i = 1; i < s.size(); ++i) REQUIRE(s.at(i).score > s.at(i + 1).score);
    for (std::size_t i = 1; i <= 40; ++i) {
        REQUIRE(s.label(i) == kTargetWin);
        REQUIRE_FALSE(mixed.truth.is_true_null[s.at(i).origin]);
    }
    for (std::size_t i = 41; i <= 1000; ++i) REQUIRE(mixed.truth.is_true_null[s.at(i).origin]);
}

TEST_CASE("TDC controls the FDR on the calibrated model") {
    const int reps = 2000;
    double sum = 0.0, sum2 = 0.0;
    for (int r = 0; r < reps; ++r) {
        SpectrumIdParams p;
        p.seed = derive_seed(606, r);
        const auto d = gen_spectrum_id(p);
        Rng rng(derive_seed(p.seed, 1));
        const auto seq = build_sequence(compete(d.pairs, TiePolicy::random_break, rng), rng);
        const double q = true_fdp(run_tdc(seq, 0.05), d.truth);
        sum += q;
        sum2 += q * q;
    }
    const double mean = sum / reps;
    const double se = std::sqrt((sum2 / reps - mean * mean) / (reps - 1));
    CHECK(mean <= 0.05 + 3 * se);
}
