#include "compfdp/mc_quantiles.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "compfdp/distributions.hpp"
#include "compfdp/errors.hpp"
#include "compfdp/parallel.hpp"

namespace compfdp {
namespace {

constexpr std::size_t kPathsPerBlock = 4096;

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string gamma_list(const std::vector<double>& gammas) {
    std::string out;
    for (std::size_t i = 0; i < gammas.size(); ++i) {
        if (i) out += ',';
        out += format_double(gammas[i]);
    }
    return out;
}

// Largest c with c / n <= gamma, using the same division the invariants use.
std::int64_t coverage_rank(double gamma, std::int64_t n) {
    auto c = static_cast<std::int64_t>(std::floor(gamma * static_cast<double>(n)));
    const auto nd = static_cast<double>(n);
    while (c + 1 <= n && static_cast<double>(c + 1) / nd <= gamma) ++c;
    while (c > 0 && static_cast<double>(c) / nd > gamma) --c;
    return c;
}

// Smallest c with c / n >= level.
std::int64_t quantile_rank(double level, std::int64_t n) {
    auto c = static_cast<std::int64_t>(std::ceil(level * static_cast<double>(n)));
    const auto nd = static_cast<double>(n);
    while (c > 1 && static_cast<double>(c - 1) / nd >= level) --c;
    while (c < n && static_cast<double>(c) / nd < level) ++c;
    return std::clamp<std::int64_t>(c, 1, n);
}

void check_gammas(const std::vector<double>& gammas) {
    if (gammas.empty()) throw DomainError("at least one gamma is required");
    for (double g : gammas)
        if (!(g > 0.0 && g <= 0.5)) throw DomainError("table gammas must lie in (0, 0.5], got " + format_double(g));
}

UniformEntry select_uniform(std::vector<double>& buf, const std::vector<double>& minima, double gamma) {
    const auto n = static_cast<std::int64_t>(minima.size());
    const std::int64_t rank = coverage_rank(gamma, n);  // sigma is the (rank+1)-th smallest
    buf.assign(minima.begin(), minima.end());
    std::nth_element(buf.begin(), buf.begin() + rank, buf.end());
    UniformEntry e;
    e.sigma = buf[static_cast<std::size_t>(rank)];
    bool found = false;
    for (std::int64_t j = 0; j < rank; ++j) {
        const double v = buf[static_cast<std::size_t>(j)];
        if (v < e.sigma && (!found || v > e.rho)) {
            e.rho = v;
            found = true;
        }
    }
    std::int64_t at_rho = 0;
    std::int64_t at_sigma = 0;
    for (double v : minima) {
        if (found && v <= e.rho) ++at_rho;
        if (v <= e.sigma) ++at_sigma;
    }
    e.r = found ? static_cast<double>(at_rho) / static_cast<double>(n) : 0.0;
    e.s = static_cast<double>(at_sigma) / static_cast<double>(n);
    return e;
}

double select_upper(std::vector<double>& buf, const std::vector<double>& maxima, double gamma) {
    const auto n = static_cast<std::int64_t>(maxima.size());
    const std::int64_t rank = quantile_rank(1.0 - gamma, n);
    buf.assign(maxima.begin(), maxima.end());
    std::nth_element(buf.begin(), buf.begin() + (rank - 1), buf.end());
    return buf[static_cast<std::size_t>(rank - 1)];
}

}  // namespace

double mixing_weight(const UniformEntry& e, double gamma) {
    if (e.s <= e.r) return 1.0;
    return std::clamp((e.s - gamma) / (e.s - e.r), 0.0, 1.0);
}

int TableInfo::gamma_index(double gamma) const {
    for (std::size_t i = 0; i < gammas.size(); ++i)
        if (std::fabs(gammas[i] - gamma) <= 1e-12 * std::max(1.0, gamma)) return static_cast<int>(i);
    return -1;
}

const UniformEntry& UniformQuantileTable::entry(double gamma, std::int64_t d) const {
    const int g = info.gamma_index(gamma);
    if (g < 0) throw ConfigError("uniform quantile table has no entry for gamma=" + format_double(gamma));
    if (d < 1 || d > info.d0)
        throw ConfigError("uniform quantile table covers d=1.." + std::to_string(info.d0) + "; d=" + std::to_string(d) +
                          " is required");
    return entries[static_cast<std::size_t>(g)][static_cast<std::size_t>(d - 1)];
}

double StandardizedQuantileTable::quantile(double gamma, std::int64_t d) const {
    const int g = info.gamma_index(gamma);
    if (g < 0) throw ConfigError("standardized quantile table has no entry for gamma=" + format_double(gamma));
    if (d < 1 || d > info.d0)
        throw ConfigError("standardized quantile table covers d=1.." + std::to_string(info.d0) + "; d=" +
                          std::to_string(d) + " is required");
    return z[static_cast<std::size_t>(g)][static_cast<std::size_t>(d - 1)];
}

namespace {

void validate_info(const TableInfo& info, std::size_t rows, const char* kind) {
    if (info.d0 < 1) throw DataError(std::string(kind) + " table: d0 must be >= 1");
    if (info.samples < 1) throw DataError(std::string(kind) + " table: sample count must be >= 1");
    if (info.gammas.empty()) throw DataError(std::string(kind) + " table: no gammas");
    for (double g : info.gammas)
        if (!(g > 0.0 && g < 1.0)) throw DataError(std::string(kind) + " table: gamma outside (0,1)");
    if (rows != info.gammas.size()) throw DataError(std::string(kind) + " table: gamma rows do not match header");
}

}  // namespace

void UniformQuantileTable::validate() const {
    validate_info(info, entries.size(), "uniform");
    for (std::size_t g = 0; g < entries.size(); ++g) {
        const double gamma = info.gammas[g];
        if (entries[g].size() != static_cast<std::size_t>(info.d0))
            throw DataError("uniform table: gamma=" + format_double(gamma) + " does not cover d=1.." +
                            std::to_string(info.d0));
        for (std::size_t i = 0; i < entries[g].size(); ++i) {
            const auto& e = entries[g][i];
            const std::string where = " at gamma=" + format_double(gamma) + ", d=" + std::to_string(i + 1);
            if (!(e.rho >= 0.0 && e.rho < e.sigma && e.sigma <= 1.0)) throw DataError("uniform table: need 0 <= rho < sigma <= 1" + where);
            if (!(e.r >= 0.0 && e.r <= gamma)) throw DataError("uniform table: need 0 <= r <= gamma" + where);
            if (!(gamma < e.s && e.s <= 1.0)) throw DataError("uniform table: need gamma < s <= 1" + where);
            if (e.rho == 0.0 && e.r != 0.0) throw DataError("uniform table: degenerate rho with r > 0" + where);
        }
    }
}

void StandardizedQuantileTable::validate() const {
    validate_info(info, z.size(), "standardized");
    for (std::size_t g = 0; g < z.size(); ++g) {
        const double gamma = info.gammas[g];
        if (z[g].size() != static_cast<std::size_t>(info.d0))
            throw DataError("standardized table: gamma=" + format_double(gamma) + " does not cover d=1.." +
                            std::to_string(info.d0));
        for (std::size_t i = 0; i < z[g].size(); ++i) {
            if (!std::isfinite(z[g][i]))
                throw DataError("standardized table: non-finite z at d=" + std::to_string(i + 1));
            if (i > 0 && z[g][i] < z[g][i - 1])
                throw DataError("standardized table: z decreases at gamma=" + format_double(gamma) +
                                ", d=" + std::to_string(i + 1));
        }
    }
}

std::vector<double> default_table_gammas() { return {0.1, 0.05, 0.01, 0.001}; }

QuantileTables build_tables(std::int64_t d0, const std::vector<double>& gammas, std::int64_t samples,
                            std::uint64_t seed, unsigned parallelism) {
    if (d0 < 1) throw DomainError("d0 must be >= 1");
    if (samples < 1000) throw DomainError("at least 1000 Monte-Carlo samples are required");
    check_gammas(gammas);

    const auto n = static_cast<std::size_t>(samples);
    const std::size_t blocks = (n + kPathsPerBlock - 1) / kPathsPerBlock;
    std::vector<Rng> streams;
    streams.reserve(blocks);
    for (std::size_t b = 0; b < blocks; ++b) streams.push_back(make_rng(seed, b));

    std::vector<std::int64_t> successes(n, 0);                                  // U_d per path
    std::vector<double> running_min(n, 1.0);                                    // M_d per path
    std::vector<double> running_max(n, -std::numeric_limits<double>::infinity());  // max of standardized U
    std::vector<double> tail;  // G_d(k) for k in [lo, hi]
    std::vector<double> buf;

    QuantileTables out;
    const TableInfo info{gammas, d0, samples, seed};
    out.uniform.info = info;
    out.standardized.info = info;
    out.uniform.entries.assign(gammas.size(), {});
    out.standardized.z.assign(gammas.size(), {});
    for (auto& v : out.uniform.entries) v.reserve(static_cast<std::size_t>(d0));
    for (auto& v : out.standardized.z) v.reserve(static_cast<std::size_t>(d0));

    auto block_range = [&](std::size_t b) {
        return std::pair{b * kPathsPerBlock, std::min(n, (b + 1) * kPathsPerBlock)};
    };

    for (std::int64_t d = 1; d <= d0; ++d) {
        // Successes between the (d-1)-th and d-th failure.
        parallel_for(blocks, parallelism, [&](std::size_t b) {
            auto [lo, hi] = block_range(b);
            for (std::size_t j = lo; j < hi; ++j) successes[j] += static_cast<std::int64_t>(geometric_half(streams[b]));
        });
        const auto [min_it, max_it] = std::minmax_element(successes.begin(), successes.end());
        const std::int64_t lo_k = *min_it;
        const std::int64_t hi_k = *max_it;
        tail.assign(static_cast<std::size_t>(hi_k - lo_k + 1), 0.0);
        parallel_for(tail.size(), parallelism,
                     [&](std::size_t i) { tail[i] = nb_upper_tail(d, lo_k + static_cast<std::int64_t>(i)); });

        const double scale = std::sqrt(2.0 * static_cast<double>(d));
        const auto dd = static_cast<double>(d);
        parallel_for(blocks, parallelism, [&](std::size_t b) {
            auto [lo, hi] = block_range(b);
            for (std::size_t j = lo; j < hi; ++j) {
                const std::int64_t u = successes[j];
                running_min[j] = std::min(running_min[j], tail[static_cast<std::size_t>(u - lo_k)]);
                running_max[j] = std::max(running_max[j], (static_cast<double>(u) - dd) / scale);
            }
        });

        for (std::size_t g = 0; g < gammas.size(); ++g) {
            out.uniform.entries[g].push_back(select_uniform(buf, running_min, gammas[g]));
            out.standardized.z[g].push_back(select_upper(buf, running_max, gammas[g]));
        }
    }
    return out;
}

double draw_u_gamma(const UniformQuantileTable& table, std::int64_t d_max, double gamma, DrawMode mode, Rng& rng) {
    const UniformEntry& e = table.entry(gamma, d_max);
    if (mode == DrawMode::conservative) return e.rho;
    return bernoulli(rng, mixing_weight(e, gamma)) ? e.rho : e.sigma;
}

double z_quantile(const StandardizedQuantileTable& table, std::int64_t d_max, double gamma) {
    return table.quantile(gamma, d_max);
}

// ---------------------------------------------------------------------------
// Persistence

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

namespace {

std::string header(const TableInfo& info, std::string_view kind, std::string_view columns) {
    std::string s;
    s += kTableMagic;
    s += "\nkind=";
    s += kind;
    s += "\nseed=" + std::to_string(info.seed) + " N=" + std::to_string(info.samples) +
         " d0=" + std::to_string(info.d0) + "\n";
    s += "gammas=" + gamma_list(info.gammas) + "\n";
    s += "columns=";
    s += columns;
    s += "\n";
    return s;
}

std::string with_checksum(std::string body) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(body)));
    body += "checksum=fnv1a64:";
    body += buf;
    body += "\n";
    return body;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

double parse_double(std::string_view s, std::string_view what) {
    std::string tmp(s);
    char* end = nullptr;
    const double v = std::strtod(tmp.c_str(), &end);
    if (tmp.empty() || end != tmp.c_str() + tmp.size()) throw DataError("table: bad number for " + std::string(what) + ": '" + tmp + "'");
    return v;
}

template <class Int>
Int parse_int(std::string_view s, std::string_view what) {
    Int v{};
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
        throw DataError("table: bad integer for " + std::string(what) + ": '" + std::string(s) + "'");
    return v;
}

std::string_view value_after(std::string_view line, std::string_view key) {
    if (line.substr(0, key.size()) != key) throw DataError("table: expected '" + std::string(key) + "' line");
    return line.substr(key.size());
}

struct ParsedTable {
    TableInfo info;
    std::vector<std::vector<std::string_view>> records;
};

ParsedTable parse_common(std::string_view text, std::string_view kind, std::size_t fields) {
    auto lines = split(text, '\n');
    if (!lines.empty() && lines.back().empty()) lines.pop_back();
    if (lines.empty()) throw DataError("table: empty file");
    if (lines[0] != kTableMagic) {
        if (lines[0].substr(0, 13) == "fdpband-table")
            throw VersionError("table: unsupported version '" + std::string(lines[0]) + "'");
        throw DataError("table: missing 'fdpband-table' header");
    }
    if (lines.size() < 6) throw DataError("table: truncated header");

    const std::string_view last = lines.back();
    const std::string_view digest = value_after(last, "checksum=fnv1a64:");
    const std::size_t body_len = static_cast<std::size_t>(last.data() - text.data());
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(text.substr(0, body_len))));
    if (digest != buf) throw DataError("table: checksum mismatch (file corrupted or edited)");

    const std::string_view kind_value = value_after(lines[1], "kind=");
    if (kind_value != kind)
        throw DataError("table: expected kind=" + std::string(kind) + ", found kind=" + std::string(kind_value));

    ParsedTable out;
    for (auto tok : split(lines[2], ' ')) {
        if (tok.substr(0, 5) == "seed=") out.info.seed = parse_int<std::uint64_t>(tok.substr(5), "seed");
        else if (tok.substr(0, 2) == "N=") out.info.samples = parse_int<std::int64_t>(tok.substr(2), "N");
        else if (tok.substr(0, 3) == "d0=") out.info.d0 = parse_int<std::int64_t>(tok.substr(3), "d0");
        else throw DataError("table: unknown run parameter '" + std::string(tok) + "'");
    }
    for (auto tok : split(value_after(lines[3], "gammas="), ',')) out.info.gammas.push_back(parse_double(tok, "gamma"));
    value_after(lines[4], "columns=");

    for (std::size_t i = 5; i + 1 < lines.size(); ++i) {
        auto rec = split(lines[i], '\t');
        if (rec.size() != fields) throw DataError("table: record " + std::to_string(i - 4) + " has wrong field count");
        out.records.push_back(std::move(rec));
    }
    if (out.info.d0 < 1 || out.info.gammas.empty()) throw DataError("table: invalid header values");
    const auto expected = out.info.gammas.size() * static_cast<std::size_t>(out.info.d0);
    if (out.records.size() != expected)
        throw DataError("table: expected " + std::to_string(expected) + " records, found " +
                        std::to_string(out.records.size()));
    return out;
}

// Position of record (gamma, d) within the row-major record list.
std::pair<std::size_t, std::size_t> locate(const TableInfo& info, std::size_t index,
                                           const std::vector<std::string_view>& rec) {
    const std::size_t g = index / static_cast<std::size_t>(info.d0);
    const std::size_t d = index % static_cast<std::size_t>(info.d0) + 1;
    const double gamma = parse_double(rec[0], "gamma");
    const auto rec_d = parse_int<std::int64_t>(rec[1], "d");
    if (gamma != info.gammas[g] || rec_d != static_cast<std::int64_t>(d))
        throw DataError("table: record " + std::to_string(index + 1) + " out of order");
    return {g, d};
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open table file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write table file " + path.string());
    out << text;
    if (!out) throw DataError("failed writing table file " + path.string());
}

}  // namespace

std::string to_text(const UniformQuantileTable& table) {
    std::string s = header(table.info, "uniform", "gamma\td\trho\tr\tsigma\ts");
    for (std::size_t g = 0; g < table.entries.size(); ++g) {
        for (std::size_t i = 0; i < table.entries[g].size(); ++i) {
            const auto& e = table.entries[g][i];
            s += format_double(table.info.gammas[g]) + '\t' + std::to_string(i + 1) + '\t' + format_double(e.rho) +
                 '\t' + format_double(e.r) + '\t' + format_double(e.sigma) + '\t' + format_double(e.s) + '\n';
        }
    }
    return with_checksum(std::move(s));
}

std::string to_text(const StandardizedQuantileTable& table) {
    std::string s = header(table.info, "standardized", "gamma\td\tz");
    for (std::size_t g = 0; g < table.z.size(); ++g)
        for (std::size_t i = 0; i < table.z[g].size(); ++i)
            s += format_double(table.info.gammas[g]) + '\t' + std::to_string(i + 1) + '\t' +
                 format_double(table.z[g][i]) + '\n';
    return with_checksum(std::move(s));
}

UniformQuantileTable uniform_table_from_text(std::string_view text) {
    ParsedTable p = parse_common(text, "uniform", 6);
    UniformQuantileTable t;
    t.info = p.info;
    t.entries.assign(t.info.gammas.size(), std::vector<UniformEntry>(static_cast<std::size_t>(t.info.d0)));
    for (std::size_t i = 0; i < p.records.size(); ++i) {
        const auto& rec = p.records[i];
        auto [g, d] = locate(t.info, i, rec);
        t.entries[g][d - 1] = {parse_double(rec[2], "rho"), parse_double(rec[3], "r"), parse_double(rec[4], "sigma"),
                               parse_double(rec[5], "s")};
    }
    t.validate();
    return t;
}

StandardizedQuantileTable standardized_table_from_text(std::string_view text) {
    ParsedTable p = parse_common(text, "standardized", 3);
    StandardizedQuantileTable t;
    t.info = p.info;
    t.z.assign(t.info.gammas.size(), std::vector<double>(static_cast<std::size_t>(t.info.d0)));
    for (std::size_t i = 0; i < p.records.size(); ++i) {
        const auto& rec = p.records[i];
        auto [g, d] = locate(t.info, i, rec);
        t.z[g][d - 1] = parse_double(rec[2], "z");
    }
    t.validate();
    return t;
}

void save_table(const std::filesystem::path& path, const UniformQuantileTable& table) { write_file(path, to_text(table)); }
void save_table(const std::filesystem::path& path, const StandardizedQuantileTable& table) {
    write_file(path, to_text(table));
}
UniformQuantileTable load_uniform_table(const std::filesystem::path& path) {
    return uniform_table_from_text(read_file(path));
}
StandardizedQuantileTable load_standardized_table(const std::filesystem::path& path) {
    return standardized_table_from_text(read_file(path));
}

}  // namespace compfdp
