#include "compfdp/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <functional>
#include <memory>
#include <sstream>
#include <string>

#include "compfdp/bands.hpp"
#include "compfdp/errors.hpp"
#include "compfdp/harness.hpp"
#include "compfdp/io.hpp"
#include "compfdp/mc_quantiles.hpp"
#include "compfdp/simgen.hpp"
#include "compfdp/stepdown.hpp"

namespace compfdp::cli {
namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

const CLI::Validator kOpenUnit(
    [](std::string& s) -> std::string {
        double v = 0;
        if (!CLI::detail::lexical_cast(s, v) || !(v > 0.0 && v < 1.0)) return "value must lie in (0,1)";
        return {};
    },
    "(0,1)");

struct Options {
    double alpha = 0.05;
    double gamma = 0.05;
    std::uint64_t seed = kDefaultSeed;
    unsigned parallelism = 1;
    std::string input;
    std::string out = "-";
    std::string format = "auto";
    std::string tie_policy = "random";
    std::string truth;
    bool randomized = false;
    std::string band = "uniform";
    std::string method = "ub";
    std::string draw = "randomized";
    std::string uniform_table;
    std::string standardized_table;
    std::string tdc_report;
    // precompute
    std::string prefix = "fdpband";
    std::int64_t d0 = kDefaultTableD0;
    std::vector<double> gammas = default_table_gammas();
    std::int64_t samples = kDefaultTableSamples;
    // simulate / evaluate
    std::string model = "spectrum-id";
    std::size_t m = 2000;
    double pi0 = 0.5;
    double a = 0.05;
    double b = 10.0;
    std::int64_t n_candidates = 100;
    bool uncalibrated = false;
    std::string pool;
    std::size_t num_false = 0;
    std::string truth_out;
    std::vector<std::string> procedures{"tdc", "fdp-sd", "fdp-sd-randomized"};
    std::vector<std::string> bounds;
    std::size_t replicates = 1000;
    std::string csv;
};

// Writes `text` to `path`, or to `out` for "-".
void emit(const std::string& path, const std::string& text, std::ostream& out) {
    if (path == "-" || path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot write " + path);
    f << text;
    if (!f) throw DataError("failed writing " + path);
}

ScoreFormat score_format(const std::string& s) {
    if (s == "pairs") return ScoreFormat::pairs;
    if (s == "labeled") return ScoreFormat::labeled;
    return ScoreFormat::automatic;
}

TiePolicy tie_policy(const std::string& s) { return s == "drop" ? TiePolicy::drop : TiePolicy::random_break; }

DrawMode draw_mode(const std::string& s) { return s == "conservative" ? DrawMode::conservative : DrawMode::randomized; }

void add_input(CLI::App* sub, Options& o) {
    sub->add_option("-i,--input", o.input, "Score file (TSV: target<TAB>decoy or label<TAB>score)")->required();
    sub->add_option("--format", o.format, "Input layout")
        ->check(CLI::IsMember({"auto", "pairs", "labeled"}))
        ->capture_default_str();
    sub->add_option("--tie-policy", o.tie_policy, "Handling of exact target/decoy ties")
        ->check(CLI::IsMember({"random", "drop"}))
        ->capture_default_str();
    sub->add_option("--truth", o.truth, "Ground-truth file; adds the true FDP to the report");
}

void add_common(CLI::App* sub, Options& o) {
    sub->add_option("--seed", o.seed, "Random seed")->capture_default_str();
    sub->add_option("--parallelism", o.parallelism, "Worker threads")->check(CLI::Range(1u, 1024u))->capture_default_str();
    sub->add_option("-o,--out", o.out, "Output path ('-' for stdout)")->capture_default_str();
}

void add_alpha(CLI::App* sub, Options& o, const char* help) {
    sub->add_option("--alpha", o.alpha, help)->check(kOpenUnit)->capture_default_str();
}

void add_gamma(CLI::App* sub, Options& o) {
    sub->add_option("--gamma", o.gamma, "Confidence parameter (1 - gamma confidence)")
        ->check(kOpenUnit)
        ->capture_default_str();
}

void add_tables(CLI::App* sub, Options& o) {
    sub->add_option("--uniform-table", o.uniform_table, "Uniform-band quantile table (from precompute)");
    sub->add_option("--standardized-table", o.standardized_table, "Standardized-band quantile table (from precompute)");
    sub->add_option("--draw", o.draw, "How u_gamma is taken from the uniform table")
        ->check(CLI::IsMember({"randomized", "conservative"}))
        ->capture_default_str();
}

QuantileSource load_tables(const Options& o, bool need_uniform, bool need_standardized) {
    QuantileSource src;
    if (need_uniform) {
        if (o.uniform_table.empty()) throw ConfigError("--uniform-table is required for the uniform band");
        src.uniform = std::make_shared<UniformQuantileTable>(load_uniform_table(o.uniform_table));
    }
    if (need_standardized) {
        if (o.standardized_table.empty())
            throw ConfigError("--standardized-table is required for the standardized band");
        src.standardized = std::make_shared<StandardizedQuantileTable>(load_standardized_table(o.standardized_table));
    }
    return src;
}

struct Loaded {
    CompetitionSequence seq;
    std::optional<SimulationTruth> truth;
};

Loaded load_sequence(const Options& o, Rng& rng) {
    Loaded l;
    auto data = read_scores_file(o.input, score_format(o.format));
    const std::size_t records = std::visit([](const auto& v) { return v.size(); }, data);
    if (auto* pairs = std::get_if<std::vector<ScorePair>>(&data)) {
        l.seq = build_sequence(compete(*pairs, tie_policy(o.tie_policy), rng), rng);
    } else {
        l.seq = build_sequence(std::move(std::get<std::vector<LabeledHypothesis>>(data)), rng);
    }
    if (!o.truth.empty()) {
        l.truth = read_truth_file(o.truth);
        if (std::get_if<std::vector<ScorePair>>(&data) && l.truth->is_true_null.size() != records)
            throw DataError("truth file has " + std::to_string(l.truth->is_true_null.size()) + " entries for " +
                            std::to_string(records) + " score records");
    }
    return l;
}

std::string render(const DiscoveryReport& r, const Loaded& l) {
    std::optional<double> fdp;
    if (l.truth) fdp = true_fdp(r, *l.truth);
    return report_json(r, fdp);
}

Rng data_rng(const Options& o) { return make_rng(o.seed, 0); }

GeneratorSpec generator(const Options& o) {
    if (o.model == "generic-null") return GenericNullParams{o.m, o.num_false};
    SpectrumIdParams p;
    p.m = o.m;
    p.pi0 = o.pi0;
    p.a = o.a;
    p.b = o.b;
    p.n_candidates = o.n_candidates;
    p.calibrated = !o.uncalibrated;
    p.seed = o.seed;
    if (!o.pool.empty()) p.pool = read_pool_file(o.pool);
    return p;
}

void add_generator(CLI::App* sub, Options& o) {
    sub->add_option("--model", o.model, "Data model")
        ->check(CLI::IsMember({"spectrum-id", "generic-null"}))
        ->capture_default_str();
    sub->add_option("--m", o.m, "Number of hypotheses")->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--pi0", o.pi0, "Foreign-spectrum fraction (spectrum-id)")->check(CLI::Range(0.0, 1.0))->capture_default_str();
    sub->add_option("--a", o.a, "Beta shape a of native scores (spectrum-id)")->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--b", o.b, "Beta shape b of native scores (spectrum-id)")->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--n-candidates", o.n_candidates, "Candidate peptides per spectrum (spectrum-id)")
        ->check(CLI::Range(std::int64_t{2}, std::int64_t{1} << 40))
        ->capture_default_str();
    sub->add_flag("--uncalibrated", o.uncalibrated, "Map scores through per-spectrum Gumbel quantiles");
    sub->add_option("--pool", o.pool, "Gumbel location<TAB>scale pool file (uncalibrated)");
    sub->add_option("--num-false", o.num_false, "False nulls at the top (generic-null)")->capture_default_str();
}

int run(CLI::App& app, Options& o, const std::function<void()>& body, std::ostream& err) {
    (void)app;
    (void)o;
    try {
        body();
        return kOk;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << '\n';
        return kConfigError;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << '\n';
        return kDataError;
    } catch (const DomainError& e) {
        err << "data error: " << e.what() << '\n';
        return kDataError;
    }
}

}  // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Competition-based false discovery proportion control (TDC, FDP-SD, prediction bands)", "compfdp"};
    app.require_subcommand(1, 1);
    Options o;
    std::function<void()> action;

    auto* compete_cmd = app.add_subcommand("compete", "Turn target/decoy score pairs into labeled hypotheses");
    add_input(compete_cmd, o);
    add_common(compete_cmd, o);
    compete_cmd->callback([&] {
        action = [&] {
            Rng rng = data_rng(o);
            auto data = read_scores_file(o.input, ScoreFormat::pairs);
            const auto labeled = compete(std::get<std::vector<ScorePair>>(data), tie_policy(o.tie_policy), rng);
            std::ostringstream ss;
            write_labeled(ss, labeled);
            emit(o.out, ss.str(), out);
        };
    });

    auto* tdc_cmd = app.add_subcommand("tdc", "Target-decoy competition at FDR level alpha");
    add_input(tdc_cmd, o);
    add_common(tdc_cmd, o);
    add_alpha(tdc_cmd, o, "FDR threshold");
    tdc_cmd->callback([&] {
        action = [&] {
            Rng rng = data_rng(o);
            const auto l = load_sequence(o, rng);
            emit(o.out, render(run_tdc(l.seq, o.alpha), l), out);
        };
    });

    auto* sd_cmd = app.add_subcommand("fdp-sd", "FDP control by the stepdown procedure");
    add_input(sd_cmd, o);
    add_common(sd_cmd, o);
    add_alpha(sd_cmd, o, "FDP threshold");
    add_gamma(sd_cmd, o);
    sd_cmd->add_flag("--randomized", o.randomized, "Use the randomized stepdown");
    sd_cmd->callback([&] {
        action = [&] {
            Rng rng = data_rng(o);
            const auto l = load_sequence(o, rng);
            const auto r = o.randomized ? run_fdp_sd_randomized(l.seq, o.alpha, o.gamma, rng)
                                        : run_fdp_sd(l.seq, o.alpha, o.gamma);
            emit(o.out, render(r, l), out);
        };
    });

    auto* band_cmd = app.add_subcommand("fdp-band", "FDP control through an upper prediction band");
    add_input(band_cmd, o);
    add_common(band_cmd, o);
    add_alpha(band_cmd, o, "FDP threshold");
    add_gamma(band_cmd, o);
    add_tables(band_cmd, o);
    band_cmd->add_option("--band", o.band, "Band kind")
        ->check(CLI::IsMember({"uniform", "standardized", "kr"}))
        ->capture_default_str();
    band_cmd->callback([&] {
        action = [&] {
            BandSpec spec;
            spec.kind = *parse_band(o.band);
            spec.gamma = o.gamma;
            spec.draw = draw_mode(o.draw);
            spec.tables = load_tables(o, spec.kind == BandKind::uniform, spec.kind == BandKind::standardized);
            Rng rng = data_rng(o);
            const auto l = load_sequence(o, rng);
            emit(o.out, render(run_fdp_band(l.seq, o.alpha, spec, rng), l), out);
        };
    });

    auto* bound_cmd = app.add_subcommand("bound", "Upper prediction bound on the FDP of TDC's discoveries");
    add_input(bound_cmd, o);
    add_common(bound_cmd, o);
    add_alpha(bound_cmd, o, "FDR threshold of the TDC run being bounded");
    add_gamma(bound_cmd, o);
    add_tables(bound_cmd, o);
    bound_cmd->add_option("--method", o.method, "Band behind the bound")
        ->check(CLI::IsMember({"ub", "sb", "krb"}))
        ->capture_default_str();
    bound_cmd->add_option("--tdc-report", o.tdc_report, "Report from a previous `tdc` run on the same input and seed");
    bound_cmd->callback([&] {
        action = [&] {
            BandSpec spec;
            spec.kind = *parse_band(o.method);
            spec.gamma = o.gamma;
            spec.draw = draw_mode(o.draw);
            spec.tables = load_tables(o, spec.kind == BandKind::uniform, spec.kind == BandKind::standardized);
            Rng rng = data_rng(o);
            const auto l = load_sequence(o, rng);
            DiscoveryReport tdc;
            if (!o.tdc_report.empty()) {
                std::ifstream f(o.tdc_report);
                if (!f) throw DataError("cannot open " + o.tdc_report);
                std::stringstream ss;
                ss << f.rdbuf();
                const auto prior = parse_report_json(ss.str());
                if (prior.procedure != Procedure::tdc) throw DataError("--tdc-report is not a TDC report");
                if (prior.m != l.seq.size() || prior.k > l.seq.size())
                    throw DataError("--tdc-report does not match the input data");
                tdc = make_report(l.seq, prior.k, Procedure::tdc, prior.alpha);
                if (tdc.num_targets != prior.num_targets || tdc.num_decoys != prior.num_decoys)
                    throw DataError("--tdc-report counts differ from the input data (different seed or tie policy?)");
            } else {
                tdc = run_tdc(l.seq, o.alpha);
            }
            DiscoveryReport r = tdc;
            r.procedure = bound_procedure(spec.kind);
            r.gamma = o.gamma;
            r.bound = bound_tdc_fdp(l.seq, tdc, spec, rng);
            emit(o.out, render(r, l), out);
        };
    });

    auto* pre_cmd = app.add_subcommand("precompute", "Monte-Carlo quantile tables for the uniform and standardized bands");
    pre_cmd->add_option("--seed", o.seed, "Random seed")->capture_default_str();
    pre_cmd->add_option("--parallelism", o.parallelism, "Worker threads")->check(CLI::Range(1u, 1024u))->capture_default_str();
    pre_cmd->add_option("-o,--out", o.prefix, "Output prefix; writes PREFIX.uniform.txt and PREFIX.standardized.txt")
        ->capture_default_str();
    pre_cmd->add_option("--d0", o.d0, "Largest d covered")->check(CLI::Range(std::int64_t{1}, std::int64_t{1} << 30))->capture_default_str();
    pre_cmd->add_option("--gammas", o.gammas, "Confidence parameters, comma separated")
        ->delimiter(',')
        ->check(CLI::Range(0.0, 0.5))
        ->capture_default_str();
    pre_cmd->add_option("--samples", o.samples, "Monte-Carlo paths")
        ->check(CLI::Range(std::int64_t{1000}, std::int64_t{1} << 40))
        ->capture_default_str();
    pre_cmd->callback([&] {
        action = [&] {
            for (double g : o.gammas)
                if (!(g > 0.0)) throw UsageError("--gammas values must lie in (0, 0.5]");
            const auto tables = build_tables(o.d0, o.gammas, o.samples, o.seed, o.parallelism);
            const std::string& prefix = o.prefix;
            save_table(prefix + ".uniform.txt", tables.uniform);
            save_table(prefix + ".standardized.txt", tables.standardized);
            out << "wrote " << prefix << ".uniform.txt and " << prefix << ".standardized.txt\n";
        };
    });

    auto* sim_cmd = app.add_subcommand("simulate", "Generate a dataset with ground truth");
    add_common(sim_cmd, o);
    add_generator(sim_cmd, o);
    sim_cmd->add_option("--truth-out", o.truth_out, "Ground-truth output file");
    sim_cmd->callback([&] {
        action = [&] {
            const auto gen = generator(o);
            std::ostringstream data;
            SimulationTruth truth;
            if (const auto* sp = std::get_if<SpectrumIdParams>(&gen)) {
                auto d = gen_spectrum_id(*sp);
                write_pairs(data, d.pairs);
                truth = std::move(d.truth);
            } else {
                const auto& gp = std::get<GenericNullParams>(gen);
                if (gp.num_false > gp.m) throw UsageError("--num-false must not exceed --m");
                auto d = gen_generic_null(gp.m, gp.num_false, o.seed);
                write_labeled(data, d.hypotheses);
                truth = std::move(d.truth);
            }
            emit(o.out, data.str(), out);
            if (!o.truth_out.empty()) {
                std::ostringstream t;
                write_truth(t, truth);
                emit(o.truth_out, t.str(), out);
            }
        };
    });

    auto* eval_cmd = app.add_subcommand("evaluate", "Replicate simulation study of procedures and bounds");
    add_common(eval_cmd, o);
    add_generator(eval_cmd, o);
    add_alpha(eval_cmd, o, "FDR/FDP threshold");
    add_gamma(eval_cmd, o);
    add_tables(eval_cmd, o);
    eval_cmd->add_option("--procedures", o.procedures, "tdc, fdp-sd, fdp-sd-randomized, fdp-ub, fdp-sb, fdp-krb")
        ->delimiter(',')
        ->check(CLI::IsMember({"tdc", "fdp-sd", "fdp-sd-randomized", "fdp-ub", "fdp-sb", "fdp-krb"}))
        ->capture_default_str();
    eval_cmd->add_option("--bounds", o.bounds, "Bounds on TDC's FDP: ub, sb, krb")
        ->delimiter(',')
        ->check(CLI::IsMember({"ub", "sb", "krb"}));
    eval_cmd->add_option("--replicates", o.replicates, "Number of replicates (>= 100)")
        ->check(CLI::Range(std::size_t{100}, std::size_t{1} << 40))
        ->capture_default_str();
    eval_cmd->add_option("--csv", o.csv, "Per-replicate CSV output");
    eval_cmd->callback([&] {
        action = [&] {
            EvaluationConfig cfg;
            cfg.generator = generator(o);
            if (const auto* gp = std::get_if<GenericNullParams>(&cfg.generator); gp && gp->num_false > gp->m)
                throw UsageError("--num-false must not exceed --m");
            cfg.procedures.clear();
            bool need_u = false, need_s = false;
            for (const auto& p : o.procedures) {
                cfg.procedures.push_back(*parse_procedure(p));
                need_u |= p == "fdp-ub";
                need_s |= p == "fdp-sb";
            }
            for (const auto& b : o.bounds) {
                cfg.bounds.push_back(*parse_band(b));
                need_u |= b == "ub";
                need_s |= b == "sb";
            }
            cfg.alpha = o.alpha;
            cfg.gamma = o.gamma;
            cfg.replicates = o.replicates;
            cfg.master_seed = o.seed;
            cfg.parallelism = o.parallelism;
            cfg.draw = draw_mode(o.draw);
            cfg.tables = load_tables(o, need_u, need_s);
            const auto result = run_evaluation(cfg);
            if (!o.csv.empty()) {
                std::ostringstream ss;
                write_replicate_csv(ss, result.rows);
                emit(o.csv, ss.str(), out);
            }
            emit(o.out, summary_json(result.summary, cfg), out);
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        app.exit(e, out, err);
        return kOk;
    } catch (const CLI::Error& e) {
        std::string msg = e.what();
        if (const auto nl = msg.find('\n'); nl != std::string::npos) msg.resize(nl);
        err << "usage error: " << msg << " (see --help)\n";
        return kUsageError;
    }
    return run(app, o, action, err);
}

}  // namespace compfdp::cli
