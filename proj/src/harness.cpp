#include "compfdp/harness.hpp"

#include <algorithm>
#include <boost/math/distributions/beta.hpp>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <json.hpp>
#include <stdexcept>

#include "compfdp/errors.hpp"
#include "compfdp/parallel.hpp"
#include "compfdp/stepdown.hpp"

namespace compfdp {
namespace {

bool is_fdp_procedure(Procedure p) {
    switch (p) {
        case Procedure::tdc:
        case Procedure::fdp_sd:
        case Procedure::fdp_sd_randomized:
        case Procedure::fdp_ub:
        case Procedure::fdp_sb:
        case Procedure::fdp_krb: return true;
        default: return false;
    }
}

std::size_t generator_size(const GeneratorSpec& g) {
    return std::visit([](const auto& p) { return p.m; }, g);
}

struct Plans {
    std::optional<DeltaTable> delta;
    std::vector<std::pair<Procedure, BandPlan>> fdp_bands;
    std::vector<BandPlan> bounds;
};

struct Outcome {
    std::size_t k = 0, targets = 0, decoys = 0, true_discoveries = 0;
    double fdp = 0.0;
    double bound = 0.0;
};

struct ReplicateResult {
    std::vector<Outcome> procedures;  // config.procedures order
    Outcome tdc;
    std::vector<Outcome> bounds;      // config.bounds order
};

Outcome outcome_of(const DiscoveryReport& r, const SimulationTruth& truth) {
    Outcome o;
    o.k = r.k;
    o.targets = r.num_targets;
    o.decoys = r.num_decoys;
    const auto fd = false_discoveries(r, truth);
    o.true_discoveries = r.num_targets - fd;
    o.fdp = true_fdp(r, truth);
    return o;
}

std::vector<std::size_t> histogram(const std::vector<double>& values, std::size_t bins) {
    std::vector<std::size_t> h(bins, 0);
    for (double v : values) {
        auto b = static_cast<std::size_t>(std::floor(std::clamp(v, 0.0, 1.0) * static_cast<double>(bins)));
        ++h[std::min(b, bins - 1)];
    }
    return h;
}

double mean(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

ReplicateResult run_replicate(const EvaluationConfig& cfg, const Plans& plans, std::size_t r) {
    const std::uint64_t seed = derive_seed(cfg.master_seed, r);
    Rng data_rng(seed);
    Rng proc_rng(derive_seed(seed, 1));

    CompetitionSequence seq;
    SimulationTruth truth;
    if (const auto* sp = std::get_if<SpectrumIdParams>(&cfg.generator)) {
        auto data = gen_spectrum_id(*sp, data_rng);
        auto labeled = compete(data.pairs, TiePolicy::random_break, proc_rng);
        seq = build_sequence(std::move(labeled), proc_rng);
        truth = std::move(data.truth);
    } else {
        const auto& gp = std::get<GenericNullParams>(cfg.generator);
        auto data = gen_generic_null(gp.m, gp.num_false, data_rng);
        seq = build_sequence(std::move(data.hypotheses), proc_rng);
        truth = std::move(data.truth);
    }

    ReplicateResult res;
    const DiscoveryReport tdc = run_tdc(seq, cfg.alpha);
    res.tdc = outcome_of(tdc, truth);

    for (Procedure p : cfg.procedures) {
        switch (p) {
            case Procedure::tdc: res.procedures.push_back(res.tdc); break;
            case Procedure::fdp_sd: res.procedures.push_back(outcome_of(run_fdp_sd(seq, *plans.delta), truth)); break;
            case Procedure::fdp_sd_randomized:
                res.procedures.push_back(outcome_of(run_fdp_sd_randomized(seq, *plans.delta, proc_rng), truth));
                break;
            default: {
                const auto it = std::find_if(plans.fdp_bands.begin(), plans.fdp_bands.end(),
                                             [p](const auto& e) { return e.first == p; });
                res.procedures.push_back(outcome_of(run_fdp_band(seq, it->second, proc_rng), truth));
            }
        }
    }
    for (const auto& plan : plans.bounds) {
        Outcome o = res.tdc;
        o.bound = bound_tdc_fdp(seq, tdc, plan, proc_rng);
        res.bounds.push_back(o);
    }
    return res;
}

}  // namespace

ProportionEstimate clopper_pearson(std::size_t successes, std::size_t trials, double confidence) {
    if (trials == 0) throw DomainError("proportion needs at least one trial");
    if (successes > trials) throw DomainError("more successes than trials");
    const double tail = (1.0 - confidence) / 2.0;
    ProportionEstimate e;
    e.successes = successes;
    e.trials = trials;
    const auto x = static_cast<double>(successes);
    const auto n = static_cast<double>(trials);
    e.rate = x / n;
    e.lower = successes == 0 ? 0.0 : boost::math::quantile(boost::math::beta_distribution<double>(x, n - x + 1), tail);
    e.upper = successes == trials
                  ? 1.0
                  : boost::math::quantile(boost::math::beta_distribution<double>(x + 1, n - x), 1.0 - tail);
    e.lower = std::min(e.lower, e.rate);
    e.upper = std::max(e.upper, e.rate);
    return e;
}

double relative_power_loss(double t, double t_ref) { return 1.0 - (t + 1e-12) / (t_ref + 1e-12); }

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    const double hi = v[mid];
    if (v.size() % 2 == 1) return hi;
    const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lo + hi);
}

EvaluationResult run_evaluation(const EvaluationConfig& cfg) {
    if (cfg.replicates < 100) throw DomainError("evaluation needs at least 100 replicates");
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw DomainError("alpha must lie in (0,1)");
    if (!(cfg.gamma > 0.0 && cfg.gamma < 1.0)) throw DomainError("gamma must lie in (0,1)");
    if (cfg.histogram_bins < 1) throw DomainError("histogram needs at least one bin");
    for (Procedure p : cfg.procedures)
        if (!is_fdp_procedure(p))
            throw DomainError("'" + std::string(procedure_name(p)) + "' is not an FDP/FDR procedure");

    const std::size_t m = generator_size(cfg.generator);
    Plans plans;
    BandSpec spec;
    spec.gamma = cfg.gamma;
    spec.tables = cfg.tables;
    spec.draw = cfg.draw;
    for (Procedure p : cfg.procedures) {
        if ((p == Procedure::fdp_sd || p == Procedure::fdp_sd_randomized) && !plans.delta)
            plans.delta = DeltaTable::compute(m, cfg.alpha, cfg.gamma);
        const auto kind = p == Procedure::fdp_ub   ? std::optional(BandKind::uniform)
                          : p == Procedure::fdp_sb ? std::optional(BandKind::standardized)
                          : p == Procedure::fdp_krb ? std::optional(BandKind::kr)
                                                    : std::nullopt;
        if (kind) {
            spec.kind = *kind;
            plans.fdp_bands.emplace_back(p, BandPlan::for_fdp_control(m, cfg.alpha, spec));
        }
    }
    for (BandKind kind : cfg.bounds) {
        spec.kind = kind;
        plans.bounds.push_back(BandPlan::for_tdc_bound(m, cfg.alpha, spec));
    }

    std::vector<ReplicateResult> results(cfg.replicates);
    parallel_for(cfg.replicates, cfg.parallelism,
                 [&](std::size_t r) { results[r] = run_replicate(cfg, plans, r); });

    EvaluationResult out;
    auto& summary = out.summary;
    summary.replicates = cfg.replicates;
    summary.alpha = cfg.alpha;
    summary.gamma = cfg.gamma;
    const auto R = static_cast<double>(cfg.replicates);

    for (std::size_t j = 0; j < cfg.procedures.size(); ++j) {
        std::vector<double> fdp, td, disc, loss;
        std::size_t exceed = 0;
        for (const auto& res : results) {
            const auto& o = res.procedures[j];
            fdp.push_back(o.fdp);
            td.push_back(static_cast<double>(o.true_discoveries));
            disc.push_back(static_cast<double>(o.targets));
            loss.push_back(relative_power_loss(static_cast<double>(o.true_discoveries),
                                               static_cast<double>(res.tdc.true_discoveries)));
            if (o.fdp > cfg.alpha) ++exceed;
        }
        ProcedureSummary s;
        s.procedure = cfg.procedures[j];
        s.mean_fdp = mean(fdp);
        s.median_fdp = median(fdp);
        s.exceedance = clopper_pearson(exceed, cfg.replicates);
        s.violation = s.exceedance.lower > cfg.gamma;
        s.mean_true_discoveries = std::accumulate(td.begin(), td.end(), 0.0) / R;
        s.median_true_discoveries = median(td);
        s.median_discoveries = median(disc);
        s.median_power_loss_vs_tdc = median(loss);
        s.fdp_histogram = histogram(fdp, cfg.histogram_bins);
        summary.procedures.push_back(std::move(s));
    }
    for (std::size_t j = 0; j < cfg.bounds.size(); ++j) {
        std::vector<double> bound, fdp;
        std::size_t violations = 0;
        for (const auto& res : results) {
            const auto& o = res.bounds[j];
            bound.push_back(o.bound);
            fdp.push_back(o.fdp);
            if (o.fdp > o.bound) ++violations;
        }
        BoundSummary s;
        s.method = bound_procedure(cfg.bounds[j]);
        s.coverage_violation = clopper_pearson(violations, cfg.replicates);
        s.violation = s.coverage_violation.lower > cfg.gamma;
        s.median_bound = median(bound);
        s.mean_bound = mean(bound);
        s.median_tdc_fdp = median(fdp);
        s.bound_histogram = histogram(bound, cfg.histogram_bins);
        summary.bounds.push_back(std::move(s));
    }

    for (std::size_t r = 0; r < results.size(); ++r) {
        const auto& res = results[r];
        for (std::size_t j = 0; j < cfg.procedures.size(); ++j) {
            const auto& o = res.procedures[j];
            out.rows.push_back({r, cfg.procedures[j], o.k, o.targets, o.decoys, o.true_discoveries, o.fdp, std::nullopt});
        }
        for (std::size_t j = 0; j < cfg.bounds.size(); ++j) {
            const auto& o = res.bounds[j];
            out.rows.push_back({r, bound_procedure(cfg.bounds[j]), o.k, o.targets, o.decoys, o.true_discoveries, o.fdp,
                                o.bound});
        }
    }
    return out;
}

void write_replicate_csv(std::ostream& out, const std::vector<ReplicateRow>& rows) {
    char buf[64];
    out << "replicate,procedure,k,T_k,D_k,fdp,bound\n";
    for (const auto& row : rows) {
        out << row.replicate << ',' << procedure_name(row.procedure) << ',' << row.k << ',' << row.targets << ','
            << row.decoys << ',';
        std::snprintf(buf, sizeof buf, "%.17g", row.fdp);
        out << buf << ',';
        if (row.bound) {
            std::snprintf(buf, sizeof buf, "%.17g", *row.bound);
            out << buf;
        }
        out << '\n';
    }
}

namespace {

nlohmann::ordered_json proportion_json(const ProportionEstimate& e) {
    return {{"count", e.successes}, {"trials", e.trials}, {"rate", e.rate}, {"ci95", {e.lower, e.upper}}};
}

nlohmann::ordered_json generator_json(const GeneratorSpec& g) {
    if (const auto* sp = std::get_if<SpectrumIdParams>(&g)) {
        return {{"model", "spectrum-id"}, {"m", sp->m}, {"pi0", sp->pi0}, {"a", sp->a}, {"b", sp->b},
                {"n_candidates", sp->n_candidates}, {"calibrated", sp->calibrated}};
    }
    const auto& gp = std::get<GenericNullParams>(g);
    return {{"model", "generic-null"}, {"m", gp.m}, {"num_false", gp.num_false}};
}

}  // namespace

std::string summary_json(const EvaluationSummary& summary, const EvaluationConfig& config) {
    nlohmann::ordered_json j;
    j["schema"] = kEvaluationSchema;
    j["generator"] = generator_json(config.generator);
    j["alpha"] = summary.alpha;
    j["gamma"] = summary.gamma;
    j["replicates"] = summary.replicates;
    j["master_seed"] = config.master_seed;
    j["draw"] = config.draw == DrawMode::randomized ? "randomized" : "conservative";
    auto& procs = j["procedures"] = nlohmann::ordered_json::array();
    for (const auto& s : summary.procedures) {
        procs.push_back({{"procedure", procedure_name(s.procedure)},
                         {"mean_fdp", s.mean_fdp},
                         {"median_fdp", s.median_fdp},
                         {"exceedance", proportion_json(s.exceedance)},
                         {"violation", s.violation},
                         {"mean_true_discoveries", s.mean_true_discoveries},
                         {"median_true_discoveries", s.median_true_discoveries},
                         {"median_discoveries", s.median_discoveries},
                         {"median_relative_power_loss_vs_tdc", s.median_power_loss_vs_tdc},
                         {"fdp_histogram", s.fdp_histogram}});
    }
    auto& bounds = j["bounds"] = nlohmann::ordered_json::array();
    for (const auto& s : summary.bounds) {
        bounds.push_back({{"method", procedure_name(s.method)},
                          {"coverage_violation", proportion_json(s.coverage_violation)},
                          {"violation", s.violation},
                          {"median_bound", s.median_bound},
                          {"mean_bound", s.mean_bound},
                          {"median_tdc_fdp", s.median_tdc_fdp},
                          {"bound_histogram", s.bound_histogram}});
    }
    return j.dump(2) + "\n";
}

}  // namespace compfdp
