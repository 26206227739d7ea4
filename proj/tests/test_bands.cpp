#include <doctest.h>

#include <cmath>
#include <memory>

#include "compfdp/bands.hpp"
#include "compfdp/errors.hpp"
#include "oracles.hpp"

using namespace compfdp;

namespace {

const QuantileSource& tables() {
    static const QuantileSource src = [] {
        auto t = build_tables(200, {0.1, 0.05, 0.01}, 20000, 4321);
        QuantileSource s;
        s.uniform = std::make_shared<UniformQuantileTable>(std::move(t.uniform));
        s.standardized = std::make_shared<StandardizedQuantileTable>(std::move(t.standardized));
        return s;
    }();
    return src;
}

BandSpec spec(BandKind kind, double gamma, DrawMode draw = DrawMode::randomized) {
    BandSpec b;
    b.kind = kind;
    b.gamma = gamma;
    b.tables = tables();
    b.draw = draw;
    return b;
}

// Band endpoint at d0 from the oracle quantile.
double oracle_endpoint(std::int64_t d0, const BandSpec& b) {
    if (b.kind == BandKind::uniform)
        return static_cast<double>(
            oracle::nb_tail_quantile_exact(static_cast<int>(d0), b.tables.uniform->entry(b.gamma, d0).rho));
    const double z = b.tables.standardized->quantile(b.gamma, d0);
    return z * std::sqrt(2.0 * d0) + d0;
}

std::int64_t oracle_d_infty(std::size_t m, double alpha, const BandSpec& b) {
    std::int64_t best = 0;
    const auto top = std::min<std::int64_t>(static_cast<std::int64_t>(m), 200);
    for (std::int64_t d0 = 1; d0 <= top; ++d0)
        if (oracle_endpoint(d0, b) / static_cast<double>(static_cast<std::int64_t>(m) - d0 + 1) <= alpha) best = d0;
    return best;
}

}  // namespace

TEST_CASE("TDC hand traces") {
    const std::vector<int> labels{1, 1, 1, -1, 1};
    const auto seq = CompetitionSequence::from_labels(labels);
    CHECK(run_tdc(seq, 0.5).k == 5);
    CHECK(run_tdc(seq, 0.34).k == 3);
    const std::vector<int> decoys(10, -1);
    CHECK(run_tdc(CompetitionSequence::from_labels(decoys), 0.5).k == 0);
}

TEST_CASE("TDC is the largest qualifying k and respects d_max") {
    Rng rng(55);
    for (int rep = 0; rep < 1000; ++rep) {
        const std::size_t m = 1 + uniform_index(rng, 500);
        const double alpha = 0.01 + 0.3 * uniform01(rng);
        const auto labels = oracle::random_labels(m, 0.5 + 0.5 * uniform01(rng), rng);
        const auto seq = CompetitionSequence::from_labels(labels);
        const auto r = run_tdc(seq, alpha);
        REQUIRE(r.k == oracle::tdc(labels, alpha));
        if (r.k > 0)
            REQUIRE(static_cast<std::int64_t>(r.num_decoys) + 1 <= compute_d_max_tdc(alpha, m));
    }
}

TEST_CASE("closed forms") {
    CHECK(std::abs(kr_constant(0.05) - 4.4857) <= 1e-4);
    CHECK(kr_constant(0.5) == doctest::Approx(std::log(2.0) / std::log(1.5)));
    CHECK(kr_constant(0.9999) < kr_constant(0.99));
    CHECK(compute_d_max_tdc(0.1, 10000) == 909);
    CHECK(compute_d_max_tdc(0.05, 500) == 23);
    CHECK(compute_d_max_tdc(0.5, 1) == 0);
}

TEST_CASE("d_infty matches an exhaustive scan") {
    Rng rng(17);
    for (auto kind : {BandKind::uniform, BandKind::standardized}) {
        for (int rep = 0; rep < 60; ++rep) {
            const std::size_t m = 1 + uniform_index(rng, 200);
            const double alpha = 0.02 + 0.2 * uniform01(rng);
            const double gamma = rep % 3 == 0 ? 0.01 : (rep % 3 == 1 ? 0.05 : 0.1);
            const auto b = spec(kind, gamma);
            INFO("m=" << m << " alpha=" << alpha);
            REQUIRE(compute_d_infty(m, alpha, b) == oracle_d_infty(m, alpha, b));
        }
    }
    const auto u = spec(BandKind::uniform, 0.05);
    CHECK(band_endpoint(1, u) == 4.0);
    CHECK(compute_d_infty(1000, 0.05, u) >= 1);
    CHECK_THROWS_AS(compute_d_infty(100, 0.05, spec(BandKind::kr, 0.05)), DomainError);
}

TEST_CASE("no discoveries when d_infty is 0") {
    const std::vector<int> ones(10, 1);
    const auto seq = CompetitionSequence::from_labels(ones);
    for (auto kind : {BandKind::uniform, BandKind::standardized}) {
        const auto b = spec(kind, 0.05);
        CHECK(compute_d_infty(10, 0.01, b) == 0);
        Rng rng(1);
        CHECK(run_fdp_band(seq, 0.01, b, rng).k == 0);
    }
}

TEST_CASE("band procedures on fixed inputs") {
    const std::vector<int> decoys(300, -1);
    for (auto kind : {BandKind::uniform, BandKind::standardized, BandKind::kr}) {
        Rng rng(2);
        CHECK(run_fdp_band(CompetitionSequence::from_labels(decoys), 0.05, spec(kind, 0.05), rng).k == 0);
    }
    const std::vector<int> ones(100, 1);
    Rng rng(3);
    const auto r = run_fdp_band(CompetitionSequence::from_labels(ones), 0.05, spec(BandKind::kr, 0.05), rng);
    CHECK(r.k == 100);
    CHECK(r.procedure == Procedure::fdp_krb);
}

TEST_CASE("band threshold matches a direct scan and stays inside d_infty") {
    Rng rng(808);
    for (int rep = 0; rep < 300; ++rep) {
        const std::size_t m = 200 + uniform_index(rng, 1800);
        const double alpha = rep % 2 ? 0.05 : 0.1;
        const auto labels = oracle::random_labels(m, 0.6 + 0.4 * uniform01(rng), rng);
        const auto seq = CompetitionSequence::from_labels(labels);
        for (auto kind : {BandKind::uniform, BandKind::standardized, BandKind::kr}) {
            const auto b = spec(kind, 0.05);
            const auto plan = BandPlan::for_fdp_control(m, alpha, b);
            Rng draw(derive_seed(rep, 1));
            const auto band = plan.draw(draw);
            std::size_t brute = 0;
            for (std::size_t k = 1; k <= m; ++k) {
                const auto t = seq.targets(k);
                if (t > 0 && band.value(static_cast<std::int64_t>(seq.decoys(k)) + 1) / static_cast<double>(t) <= alpha)
                    brute = k;
            }
            const auto tau = band_threshold(seq, alpha, band);
            REQUIRE(tau == brute);
            if (kind != BandKind::kr && tau > 0)
                REQUIRE(static_cast<std::int64_t>(seq.decoys(tau)) + 1 <= compute_d_infty(m, alpha, b));
        }
    }
}

TEST_CASE("TDC bounds") {
    const std::vector<int> ones(100, 1);
    const auto seq = CompetitionSequence::from_labels(ones);
    const auto tdc = run_tdc(seq, 0.05);
    REQUIRE(tdc.num_decoys == 0);
    REQUIRE(tdc.num_targets == 100);
    Rng rng(4);
    CHECK(bound_tdc_fdp(seq, tdc, spec(BandKind::kr, 0.05), rng) == doctest::Approx(0.044857).epsilon(1e-4));

    const std::vector<int> fifty(50, 1);
    const auto seq50 = CompetitionSequence::from_labels(fifty);
    auto ub = spec(BandKind::uniform, 0.05, DrawMode::conservative);
    ub.d_max = 1;
    CHECK(bound_tdc_fdp(seq50, run_tdc(seq50, 0.05), ub, rng) == doctest::Approx(0.08));

    const std::vector<int> decoys(30, -1);
    const auto none = CompetitionSequence::from_labels(decoys);
    for (auto kind : {BandKind::uniform, BandKind::standardized, BandKind::kr})
        CHECK(bound_tdc_fdp(none, run_tdc(none, 0.05), spec(kind, 0.05), rng) == 0.0);
}

TEST_CASE("bounds are proportions and shrink with more targets") {
    for (auto kind : {BandKind::uniform, BandKind::standardized, BandKind::kr}) {
        const auto plan = BandPlan::for_tdc_bound(1500, 0.1, spec(kind, 0.05, DrawMode::conservative));
        for (std::size_t dec = 0; dec < 5; ++dec) {
            double prev = 2.0;
            for (std::size_t t = 1; t <= 400; ++t) {
                std::vector<int> labels(t, 1);
                labels.insert(labels.end(), dec, -1);
                // Pad to the planned size with trailing decoys that TDC never reaches.
                labels.resize(1500, -1);
                const auto seq = CompetitionSequence::from_labels(labels);
                DiscoveryReport tdc = make_report(seq, t + dec, Procedure::tdc, 0.1);
                Rng rng(0);
                const double eta = bound_tdc_fdp(seq, tdc, plan, rng);
                REQUIRE(eta >= 0.0);
                REQUIRE(eta <= 1.0);
                REQUIRE(eta <= prev);
                prev = eta;
            }
        }
    }
}

TEST_CASE("table coverage errors") {
    const std::vector<int> ones(5000, 1);
    const auto seq = CompetitionSequence::from_labels(ones);
    Rng rng(1);
    // d_max for the bound is 454 here, past the 200-entry tables.
    CHECK_THROWS_AS(bound_tdc_fdp(seq, run_tdc(seq, 0.1), spec(BandKind::uniform, 0.05), rng), ConfigError);
    CHECK_THROWS_AS(run_fdp_band(seq, 0.05, spec(BandKind::uniform, 0.2), rng), ConfigError);
    BandSpec missing;
    missing.kind = BandKind::standardized;
    CHECK_THROWS_AS(run_fdp_band(seq, 0.05, missing, rng), ConfigError);
}
