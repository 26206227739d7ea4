#include <doctest.h>

#include <map>
#include <memory>
#include <numeric>
#include <sstream>

#include "compfdp/errors.hpp"
#include "compfdp/harness.hpp"

using namespace compfdp;

TEST_CASE("Clopper-Pearson intervals") {
    const auto a = clopper_pearson(5, 100);
    CHECK(a.rate == doctest::Approx(0.05));
    CHECK(a.lower == doctest::Approx(0.016431).epsilon(1e-4));
    CHECK(a.upper == doctest::Approx(0.112836).epsilon(1e-4));
    const auto z = clopper_pearson(0, 50);
    CHECK(z.lower == 0.0);
    CHECK(z.upper == doctest::Approx(1 - std::pow(0.025, 1.0 / 50)));
    const auto f = clopper_pearson(50, 50);
    CHECK(f.upper == 1.0);
    CHECK(f.lower == doctest::Approx(std::pow(0.025, 1.0 / 50)));
}

TEST_CASE("power loss and median") {
    CHECK(relative_power_loss(0, 0) == 0.0);
    CHECK(relative_power_loss(50, 100) == doctest::Approx(0.5));
    CHECK(relative_power_loss(100, 100) == 0.0);
    CHECK(relative_power_loss(0, 10) == doctest::Approx(1.0));
    CHECK(median({3, 1, 2}) == 2.0);
    CHECK(median({4, 1, 2, 3}) == 2.5);
}

namespace {

EvaluationConfig null_config(std::size_t num_false) {
    EvaluationConfig c;
    c.generator = GenericNullParams{500, num_false};
    c.procedures = {Procedure::tdc, Procedure::fdp_sd, Procedure::fdp_sd_randomized, Procedure::fdp_krb};
    c.bounds = {BandKind::kr};
    c.replicates = 300;
    c.master_seed = 91;
    return c;
}

}  // namespace

TEST_CASE("all-null data: every non-empty report is fully false") {
    const auto cfg = null_config(0);
    const auto res = run_evaluation(cfg);
    std::map<Procedure, std::size_t> nonempty;
    for (const auto& row : res.rows)
        if (!row.bound && row.targets > 0) {
            ++nonempty[row.procedure];
            REQUIRE(row.fdp == 1.0);
        }
    for (const auto& p : res.summary.procedures) {
        CHECK(p.mean_true_discoveries == 0.0);
        CHECK(p.exceedance.successes == nonempty[p.procedure]);
    }
}

TEST_CASE("summary invariants and paired replicates") {
    auto cfg = null_config(100);
    cfg.generator = SpectrumIdParams{};
    const auto res = run_evaluation(cfg);
    const auto& s = res.summary;
    CHECK(s.replicates == cfg.replicates);
    for (const auto& p : s.procedures) {
        CHECK(p.exceedance.rate >= 0.0);
        CHECK(p.exceedance.rate <= 1.0);
        CHECK(p.exceedance.lower <= p.exceedance.rate);
        CHECK(p.exceedance.rate <= p.exceedance.upper);
        CHECK(std::accumulate(p.fdp_histogram.begin(), p.fdp_histogram.end(), std::size_t{0}) == cfg.replicates);
        CHECK(p.violation == (p.exceedance.lower > cfg.gamma));
    }
    for (const auto& b : s.bounds) {
        CHECK(std::accumulate(b.bound_histogram.begin(), b.bound_histogram.end(), std::size_t{0}) == cfg.replicates);
        CHECK(b.coverage_violation.lower <= b.coverage_violation.rate);
    }
    // Randomized FDP-SD reports at least as much as FDP-SD on every replicate.
    std::map<std::size_t, std::size_t> det;
    for (const auto& row : res.rows)
        if (row.procedure == Procedure::fdp_sd) det[row.replicate] = row.k;
    for (const auto& row : res.rows)
        if (row.procedure == Procedure::fdp_sd_randomized) REQUIRE(row.k >= det.at(row.replicate));
    const auto find = [&](Procedure p) {
        for (const auto& x : s.procedures)
            if (x.procedure == p) return x;
        FAIL("missing procedure");
        return ProcedureSummary{};
    };
    CHECK(find(Procedure::fdp_sd_randomized).median_discoveries >= find(Procedure::fdp_sd).median_discoveries);
    CHECK(find(Procedure::tdc).median_power_loss_vs_tdc == 0.0);
}

TEST_CASE("deterministic and independent of parallelism") {
    auto cfg = null_config(20);
    const auto a = run_evaluation(cfg);
    cfg.parallelism = 3;
    const auto b = run_evaluation(cfg);
    CHECK(summary_json(a.summary, cfg) == summary_json(b.summary, cfg));
    std::ostringstream ca, cb;
    write_replicate_csv(ca, a.rows);
    write_replicate_csv(cb, b.rows);
    CHECK(ca.str() == cb.str());
    CHECK(ca.str().rfind("replicate,procedure,k,T_k,D_k,fdp,bound\n", 0) == 0);
    cfg.master_seed = 92;
    CHECK(summary_json(run_evaluation(cfg).summary, cfg) != summary_json(a.summary, cfg));
}

TEST_CASE("configuration checks") {
    auto cfg = null_config(0);
    cfg.replicates = 99;
    CHECK_THROWS(run_evaluation(cfg));
    cfg.replicates = 100;
    cfg.procedures = {Procedure::fdp_ub};
    CHECK_THROWS_AS(run_evaluation(cfg), ConfigError);
}
