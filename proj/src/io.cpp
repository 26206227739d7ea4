#include "compfdp/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "compfdp/errors.hpp"

namespace compfdp {
namespace {

std::string trim(std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.pop_back();
    std::size_t i = 0;
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    return s.substr(i);
}

std::vector<std::string> fields(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find('\t', start);
        out.push_back(trim(line.substr(start, pos == std::string::npos ? std::string::npos : pos - start)));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

double number(const std::string& s, std::size_t line_no) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size())
        throw DataError("line " + std::to_string(line_no) + ": '" + s + "' is not a number");
    return v;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    return in;
}

}  // namespace

std::string format_double(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

ScoreData read_scores(std::istream& in, ScoreFormat format) {
    std::vector<ScorePair> pairs;
    std::vector<LabeledHypothesis> labeled;
    std::string raw;
    std::size_t line_no = 0;
    bool first_content = true;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (format == ScoreFormat::automatic && line.find("compfdp-scores") != std::string::npos) {
                if (line.find("format=labeled") != std::string::npos) format = ScoreFormat::labeled;
                else if (line.find("format=pairs") != std::string::npos) format = ScoreFormat::pairs;
            }
            continue;
        }
        const auto f = fields(line);
        if (first_content) {
            first_content = false;
            if (f[0] == "target_score" || f[0] == "label") {
                if (format == ScoreFormat::automatic)
                    format = f[0] == "label" ? ScoreFormat::labeled : ScoreFormat::pairs;
                continue;
            }
        }
        if (format == ScoreFormat::automatic) format = ScoreFormat::pairs;
        if (format == ScoreFormat::pairs) {
            if (f.size() != 2) throw DataError("line " + std::to_string(line_no) + ": expected 2 tab-separated fields");
            pairs.push_back({number(f[0], line_no), number(f[1], line_no)});
        } else {
            if (f.size() != 2 && f.size() != 3)
                throw DataError("line " + std::to_string(line_no) + ": expected label, score[, origin]");
            const double label = number(f[0], line_no);
            if (label != 1.0 && label != -1.0)
                throw DataError("line " + std::to_string(line_no) + ": label must be +1 or -1");
            LabeledHypothesis h{number(f[1], line_no), static_cast<int>(label), labeled.size()};
            if (f.size() == 3) {
                const double origin = number(f[2], line_no);
                if (origin < 0 || origin != std::floor(origin))
                    throw DataError("line " + std::to_string(line_no) + ": origin must be a non-negative integer");
                h.origin = static_cast<std::size_t>(origin);
            }
            labeled.push_back(h);
        }
    }
    if (format == ScoreFormat::labeled) {
        if (labeled.empty()) throw DataError("no hypotheses in input");
        return labeled;
    }
    if (pairs.empty()) throw DataError("no score pairs in input");
    return pairs;
}

ScoreData read_scores_file(const std::filesystem::path& path, ScoreFormat format) {
    auto in = open_in(path);
    return read_scores(in, format);
}

void write_pairs(std::ostream& out, const std::vector<ScorePair>& pairs) {
    out << "# compfdp-scores v1 format=pairs\n";
    for (const auto& p : pairs) out << format_double(p.target_score) << '\t' << format_double(p.decoy_score) << '\n';
}

void write_labeled(std::ostream& out, const std::vector<LabeledHypothesis>& hypotheses) {
    out << "# compfdp-scores v1 format=labeled\n";
    for (const auto& h : hypotheses)
        out << (h.label == kTargetWin ? "1" : "-1") << '\t' << format_double(h.score) << '\t' << h.origin << '\n';
}

void write_truth(std::ostream& out, const SimulationTruth& truth) {
    out << "# compfdp-truth v1\n";
    for (bool t : truth.is_true_null) out << (t ? '1' : '0') << '\n';
}

SimulationTruth read_truth_file(const std::filesystem::path& path) {
    auto in = open_in(path);
    SimulationTruth truth;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        if (line != "0" && line != "1") throw DataError("truth line " + std::to_string(line_no) + ": expected 0 or 1");
        truth.is_true_null.push_back(line == "1");
    }
    return truth;
}

std::vector<GumbelParams> read_pool_file(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::vector<GumbelParams> pool;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        const auto f = fields(line);
        if (f.size() != 2) throw DataError("pool line " + std::to_string(line_no) + ": expected location<TAB>scale");
        GumbelParams g{number(f[0], line_no), number(f[1], line_no)};
        if (!(g.scale > 0.0) || !std::isfinite(g.location))
            throw DataError("pool line " + std::to_string(line_no) + ": scale must be positive");
        pool.push_back(g);
    }
    if (pool.empty()) throw DataError("empty location/scale pool " + path.string());
    return pool;
}

std::string report_json(const DiscoveryReport& r, std::optional<double> fdp) {
    nlohmann::ordered_json j;
    j["schema"] = kReportSchema;
    j["procedure"] = procedure_name(r.procedure);
    j["alpha"] = r.alpha;
    j["gamma"] = r.gamma ? nlohmann::ordered_json(*r.gamma) : nlohmann::ordered_json(nullptr);
    j["m"] = r.m;
    j["k"] = r.k;
    j["num_targets"] = r.num_targets;
    j["num_decoys"] = r.num_decoys;
    j["indices"] = r.origins;
    j["bound"] = r.bound ? nlohmann::ordered_json(*r.bound) : nlohmann::ordered_json(nullptr);
    if (fdp) j["true_fdp"] = *fdp;
    return j.dump(2) + "\n";
}

DiscoveryReport parse_report_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("report is not valid JSON: ") + e.what());
    }
    try {
        if (j.at("schema").get<std::string>() != kReportSchema) throw DataError("unsupported report schema");
        DiscoveryReport r;
        const auto proc = parse_procedure(j.at("procedure").get<std::string>());
        if (!proc) throw DataError("unknown procedure in report");
        r.procedure = *proc;
        r.alpha = j.at("alpha").get<double>();
        if (!j.at("gamma").is_null()) r.gamma = j.at("gamma").get<double>();
        r.m = j.at("m").get<std::size_t>();
        r.k = j.at("k").get<std::size_t>();
        r.num_targets = j.at("num_targets").get<std::size_t>();
        r.num_decoys = j.at("num_decoys").get<std::size_t>();
        r.origins = j.at("indices").get<std::vector<std::size_t>>();
        if (!j.at("bound").is_null()) r.bound = j.at("bound").get<double>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed report: ") + e.what());
    }
}

}  // namespace compfdp
