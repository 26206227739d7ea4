#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "compfdp/cli.hpp"
#include "compfdp/mc_quantiles.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run cli(std::initializer_list<std::string> args) {
    std::vector<std::string> v{"compfdp"};
    v.insert(v.end(), args);
    std::vector<const char*> argv;
    for (const auto& s : v) argv.push_back(s.c_str());
    std::ostringstream out, err;
    const int code = compfdp::cli::dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("compfdp_cli_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

void write_file(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

std::string read_file(const std::string& path) {
    std::ifstream f(path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::string labeled(int targets, int decoys) {
    std::string s = "label\tscore\n";
    int score = targets + decoys;
    for (int i = 0; i < targets; ++i) s += "1\t" + std::to_string(score--) + "\n";
    for (int i = 0; i < decoys; ++i) s += "-1\t" + std::to_string(score--) + "\n";
    return s;
}

}  // namespace

TEST_CASE("tdc on all decoys reports nothing") {
    TempDir dir;
    write_file(dir / "d.tsv", labeled(0, 50));
    const auto r = cli({"tdc", "--alpha", "0.05", "-i", dir / "d.tsv"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["k"] == 0);
    CHECK(j["indices"].empty());
    CHECK(j["procedure"] == "tdc");
}

TEST_CASE("KR bound after a TDC report") {
    TempDir dir;
    write_file(dir / "d.tsv", labeled(100, 0));
    REQUIRE(cli({"tdc", "-i", dir / "d.tsv", "-o", dir / "tdc.json"}).code == 0);
    const auto r = cli({"bound", "--method", "krb", "--gamma", "0.05", "-i", dir / "d.tsv", "--tdc-report",
                        dir / "tdc.json"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["bound"].get<double>() == doctest::Approx(0.044857).epsilon(1e-4));
    CHECK(j["procedure"] == "tdc-krb");
    // Inline TDC gives the same answer.
    CHECK(cli({"bound", "--method", "krb", "-i", dir / "d.tsv"}).out == r.out);
}

TEST_CASE("precompute at d0 = 1") {
    TempDir dir;
    const auto r = cli({"precompute", "--d0", "1", "--gammas", "0.05", "--samples", "100000", "--out", dir / "t"});
    REQUIRE(r.code == 0);
    const auto u = compfdp::load_uniform_table(dir / "t.uniform.txt");
    CHECK(u.entry(0.05, 1).rho == 0.03125);
    const auto z = compfdp::load_standardized_table(dir / "t.standardized.txt");
    CHECK(z.quantile(0.05, 1) == doctest::Approx(2.1213203435596424).epsilon(1e-12));
}

TEST_CASE("exit codes") {
    TempDir dir;
    write_file(dir / "d.tsv", labeled(30, 3));
    CHECK(cli({}).code == 2);
    CHECK(cli({"frobnicate"}).code == 2);
    CHECK(cli({"tdc", "-i", dir / "d.tsv", "--alpha", "1.2"}).code == 2);
    CHECK(cli({"fdp-sd", "-i", dir / "d.tsv", "--gamma", "0"}).code == 2);
    CHECK(cli({"fdp-band", "-i", dir / "d.tsv", "--band", "wide"}).code == 2);
    CHECK(cli({"tdc"}).code == 2);
    CHECK(cli({"tdc", "--help"}).code == 0);

    const auto missing = cli({"tdc", "-i", dir / "nope.tsv"});
    CHECK(missing.code == 3);
    CHECK(missing.err.find('\n') == missing.err.size() - 1);
    write_file(dir / "bad.tsv", "1\tx\n");
    CHECK(cli({"tdc", "-i", dir / "bad.tsv"}).code == 3);
    write_file(dir / "short_truth.txt", "# compfdp-truth v1\n1\n");
    write_file(dir / "p.tsv", "1\t0\n2\t0\n");
    CHECK(cli({"tdc", "-i", dir / "p.tsv", "--truth", dir / "short_truth.txt"}).code == 3);

    CHECK(cli({"fdp-band", "--band", "uniform", "-i", dir / "d.tsv"}).code == 4);
    REQUIRE(cli({"precompute", "--d0", "5", "--gammas", "0.05", "--samples", "1000", "--out", dir / "t"}).code == 0);
    CHECK(cli({"fdp-band", "--band", "uniform", "--gamma", "0.1", "--uniform-table", dir / "t.uniform.txt", "-i",
               dir / "d.tsv"})
              .code == 4);
    write_file(dir / "big.tsv", labeled(5000, 0));
    CHECK(cli({"bound", "--method", "ub", "--uniform-table", dir / "t.uniform.txt", "-i", dir / "big.tsv"}).code == 4);
    // A corrupted table is a data error.
    auto text = read_file(dir / "t.uniform.txt");
    text[text.size() - 3] = text[text.size() - 3] == '0' ? '1' : '0';
    write_file(dir / "t.uniform.txt", text);
    CHECK(cli({"fdp-band", "--band", "uniform", "--uniform-table", dir / "t.uniform.txt", "-i", dir / "d.tsv"}).code ==
          3);
}

TEST_CASE("simulated data flows through every subcommand") {
    TempDir dir;
    REQUIRE(cli({"simulate", "--m", "1500", "--seed", "3", "-o", dir / "s.tsv", "--truth-out", dir / "s.truth"}).code ==
            0);
    REQUIRE(cli({"simulate", "--model", "generic-null", "--m", "800", "--num-false", "100", "-o", dir / "g.tsv",
                 "--truth-out", dir / "g.truth"})
                .code == 0);
    REQUIRE(cli({"precompute", "--d0", "150", "--gammas", "0.05", "--samples", "5000", "--out", dir / "t"}).code == 0);
    REQUIRE(cli({"compete", "-i", dir / "s.tsv", "-o", dir / "s.labeled"}).code == 0);
    const std::string ut = dir / "t.uniform.txt", st = dir / "t.standardized.txt";
    for (const std::string data : {"s", "g"}) {
        const std::string in = dir / (data + ".tsv"), truth = dir / (data + ".truth");
        std::vector<Run> runs{
            cli({"tdc", "-i", in, "--truth", truth}),
            cli({"fdp-sd", "-i", in, "--truth", truth}),
            cli({"fdp-sd", "--randomized", "-i", in, "--truth", truth}),
            cli({"fdp-band", "--band", "uniform", "--uniform-table", ut, "-i", in, "--truth", truth}),
            cli({"fdp-band", "--band", "standardized", "--standardized-table", st, "-i", in, "--truth", truth}),
            cli({"fdp-band", "--band", "kr", "-i", in, "--truth", truth}),
            cli({"bound", "--method", "ub", "--uniform-table", ut, "-i", in, "--truth", truth}),
            cli({"bound", "--method", "sb", "--standardized-table", st, "-i", in, "--truth", truth}),
            cli({"bound", "--method", "krb", "-i", in, "--truth", truth}),
        };
        for (const auto& r : runs) {
            INFO(r.err);
            REQUIRE(r.code == 0);
            const auto j = nlohmann::json::parse(r.out);
            CHECK(j["true_fdp"].get<double>() >= 0.0);
            CHECK(j["num_targets"].get<std::size_t>() == j["indices"].size());
        }
    }
    CHECK(cli({"tdc", "-i", dir / "s.labeled", "--truth", dir / "s.truth"}).code == 0);
    const auto e = cli({"evaluate", "--m", "500", "--replicates", "100", "--procedures", "tdc,fdp-sd,fdp-ub",
                        "--bounds", "krb,ub", "--uniform-table", ut, "--csv", dir / "rows.csv"});
    INFO(e.err);
    REQUIRE(e.code == 0);
    CHECK(nlohmann::json::parse(e.out)["schema"] == "compfdp-evaluation v1");
    CHECK(read_file(dir / "rows.csv").rfind("replicate,procedure,k,T_k,D_k,fdp,bound\n", 0) == 0);
}

TEST_CASE("same arguments, same bytes") {
    TempDir dir;
    const std::initializer_list<std::string> sim{"simulate", "--m", "700", "--seed", "11", "--uncalibrated"};
    const auto a = cli(sim), b = cli(sim);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    write_file(dir / "s.tsv", a.out);
    const auto x = cli({"fdp-sd", "--randomized", "--seed", "4", "-i", dir / "s.tsv"});
    const auto y = cli({"fdp-sd", "--randomized", "--seed", "4", "-i", dir / "s.tsv"});
    CHECK(x.out == y.out);
}
