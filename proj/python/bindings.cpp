#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "compfdp/bands.hpp"
#include "compfdp/cli.hpp"
#include "compfdp/distributions.hpp"
#include "compfdp/errors.hpp"
#include "compfdp/harness.hpp"
#include "compfdp/io.hpp"
#include "compfdp/mc_quantiles.hpp"
#include "compfdp/simgen.hpp"
#include "compfdp/stepdown.hpp"

namespace py = pybind11;
using namespace compfdp;

namespace {

// Same stream layout as the command line tool, so a given seed gives the same
// report from either entry point.
struct Prepared {
    CompetitionSequence seq;
    Rng rng;
};

Prepared prepare(const std::vector<double>& targets, const std::vector<double>& decoys, std::uint64_t seed,
                 const std::string& tie_policy) {
    if (targets.size() != decoys.size()) throw DomainError("targets and decoys differ in length");
    std::vector<ScorePair> pairs(targets.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) pairs[i] = {targets[i], decoys[i]};
    Prepared p{{}, make_rng(seed, 0)};
    const auto policy = tie_policy == "drop" ? TiePolicy::drop : TiePolicy::random_break;
    p.seq = build_sequence(compete(pairs, policy, p.rng), p.rng);
    return p;
}

QuantileSource load_tables(const std::string& uniform, const std::string& standardized) {
    QuantileSource src;
    if (!uniform.empty()) src.uniform = std::make_shared<UniformQuantileTable>(load_uniform_table(uniform));
    if (!standardized.empty())
        src.standardized = std::make_shared<StandardizedQuantileTable>(load_standardized_table(standardized));
    return src;
}

BandSpec band_spec(const std::string& kind, double gamma, const std::string& uniform_table,
                   const std::string& standardized_table, const std::string& draw) {
    const auto k = parse_band(kind);
    if (!k) throw DomainError("unknown band '" + kind + "'");
    BandSpec b;
    b.kind = *k;
    b.gamma = gamma;
    b.draw = draw == "conservative" ? DrawMode::conservative : DrawMode::randomized;
    b.tables = load_tables(uniform_table, standardized_table);
    return b;
}

std::string tdc(const std::vector<double>& t, const std::vector<double>& d, double alpha, std::uint64_t seed,
                const std::string& ties) {
    auto p = prepare(t, d, seed, ties);
    return report_json(run_tdc(p.seq, alpha));
}

std::string fdp_sd(const std::vector<double>& t, const std::vector<double>& d, double alpha, double gamma,
                   bool randomized, std::uint64_t seed, const std::string& ties) {
    auto p = prepare(t, d, seed, ties);
    return report_json(randomized ? run_fdp_sd_randomized(p.seq, alpha, gamma, p.rng) : run_fdp_sd(p.seq, alpha, gamma));
}

std::string fdp_band(const std::vector<double>& t, const std::vector<double>& d, double alpha, double gamma,
                     const std::string& band, const std::string& ut, const std::string& st, const std::string& draw,
                     std::uint64_t seed, const std::string& ties) {
    const auto spec = band_spec(band, gamma, ut, st, draw);
    auto p = prepare(t, d, seed, ties);
    return report_json(run_fdp_band(p.seq, alpha, spec, p.rng));
}

std::string bound(const std::vector<double>& t, const std::vector<double>& d, double alpha, double gamma,
                  const std::string& method, const std::string& ut, const std::string& st, const std::string& draw,
                  std::uint64_t seed, const std::string& ties) {
    const auto spec = band_spec(method, gamma, ut, st, draw);
    auto p = prepare(t, d, seed, ties);
    auto r = run_tdc(p.seq, alpha);
    r.bound = bound_tdc_fdp(p.seq, r, spec, p.rng);
    r.procedure = bound_procedure(spec.kind);
    r.gamma = gamma;
    return report_json(r);
}

py::tuple spectrum_id(std::size_t m, double pi0, double a, double b, std::int64_t n, bool calibrated,
                      std::uint64_t seed) {
    SpectrumIdParams p;
    p.m = m;
    p.pi0 = pi0;
    p.a = a;
    p.b = b;
    p.n_candidates = n;
    p.calibrated = calibrated;
    p.seed = seed;
    const auto data = gen_spectrum_id(p);
    std::vector<double> t, d;
    for (const auto& s : data.pairs) {
        t.push_back(s.target_score);
        d.push_back(s.decoy_score);
    }
    return py::make_tuple(t, d, std::vector<bool>(data.truth.is_true_null));
}

py::tuple generic_null(std::size_t m, std::size_t num_false, std::uint64_t seed) {
    const auto data = gen_generic_null(m, num_false, seed);
    std::vector<int> labels;
    std::vector<double> scores;
    for (const auto& h : data.hypotheses) {
        labels.push_back(h.label);
        scores.push_back(h.score);
    }
    return py::make_tuple(labels, scores, std::vector<bool>(data.truth.is_true_null));
}

void precompute(const std::string& prefix, std::int64_t d0, const std::vector<double>& gammas, std::int64_t samples,
                std::uint64_t seed, unsigned parallelism) {
    const auto t = build_tables(d0, gammas, samples, seed, parallelism);
    save_table(prefix + ".uniform.txt", t.uniform);
    save_table(prefix + ".standardized.txt", t.standardized);
}

py::tuple run_cli(const std::vector<std::string>& args) {
    std::vector<std::string> all{"compfdp"};
    all.insert(all.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& s : all) argv.push_back(s.c_str());
    std::ostringstream out, err;
    int code = 0;
    {
        py::gil_scoped_release release;
        code = cli::dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
    }
    return py::make_tuple(code, py::bytes(out.str()), err.str());
}

}  // namespace

PYBIND11_MODULE(_compfdp, m) {
    m.doc() = "Target-decoy competition with FDP control and FDP bounds";

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_RuntimeError);
    py::register_exception<DataError>(m, "DataError", PyExc_RuntimeError);

    m.attr("DEFAULT_SEED") = kDefaultSeed;

    m.def("binom_cdf_half", &binom_cdf_half, py::arg("n"), py::arg("k"));
    m.def("nb_cdf_half", &nb_cdf_half, py::arg("d"), py::arg("k"));
    m.def("nb_upper_tail", &nb_upper_tail, py::arg("d"), py::arg("k"));
    m.def("nb_quantile", &nb_quantile, py::arg("d"), py::arg("q"));
    m.def("kr_constant", &kr_constant, py::arg("gamma"));
    m.def("compute_i0", &compute_i0, py::arg("alpha"), py::arg("gamma"));
    m.def("compute_d_max_tdc", &compute_d_max_tdc, py::arg("alpha"), py::arg("m"));
    m.def(
        "delta_table",
        [](std::size_t n, double alpha, double gamma) {
            const auto t = compute_delta_table(n, alpha, gamma);
            return std::vector<std::int64_t>(t.values().begin(), t.values().end());
        },
        py::arg("m"), py::arg("alpha"), py::arg("gamma"));

    m.def("_tdc", &tdc);
    m.def("_fdp_sd", &fdp_sd);
    m.def("_fdp_band", &fdp_band);
    m.def("_bound", &bound);
    m.def("simulate_spectrum_id", &spectrum_id, py::arg("m") = 2000, py::arg("pi0") = 0.5, py::arg("a") = 0.05,
          py::arg("b") = 10.0, py::arg("n_candidates") = 100, py::arg("calibrated") = true,
          py::arg("seed") = kDefaultSeed, "Returns (target_scores, decoy_scores, is_true_null).");
    m.def("simulate_generic_null", &generic_null, py::arg("m"), py::arg("num_false") = 0,
          py::arg("seed") = kDefaultSeed, "Returns (labels, scores, is_true_null).");
    m.def("precompute", &precompute, py::arg("prefix"), py::arg("d0") = kDefaultTableD0,
          py::arg("gammas") = default_table_gammas(), py::arg("samples") = kDefaultTableSamples,
          py::arg("seed") = kDefaultSeed, py::arg("parallelism") = 1,
          "Writes PREFIX.uniform.txt and PREFIX.standardized.txt.");
    m.def("_cli", &run_cli);
}
