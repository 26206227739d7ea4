#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "compfdp/rng.hpp"

// Monte-Carlo quantiles of the decoy-indexed null process U_d ~ NB(d, 1/2)
// (target wins seen before the d-th decoy win when every label is a fair
// coin). Two summaries are tabulated for d = 1..d0:
//
//   uniform:       M_d = min_{k<=d} G_k(U_k) with G_k the NB upper tail;
//                  around the gamma-quantile we keep the two adjacent
//                  attained values rho < sigma and their coverages r <= gamma < s.
//   standardized:  the (1 - gamma) quantile z_d of max_{k<=d} (U_k - k)/sqrt(2k).

namespace compfdp {

enum class DrawMode { randomized, conservative };

struct UniformEntry {
    double rho = 0.0;    ///< largest attained M_d with coverage <= gamma (0 if none)
    double r = 0.0;      ///< fraction of paths with M_d <= rho
    double sigma = 0.0;  ///< next attained value above rho
    double s = 0.0;      ///< fraction of paths with M_d <= sigma

    bool operator==(const UniformEntry&) const = default;
};

/// Probability of using rho so that the mixed coverage w*r + (1-w)*s is gamma.
double mixing_weight(const UniformEntry& e, double gamma);

struct TableInfo {
    std::vector<double> gammas;
    std::int64_t d0 = 0;
    std::int64_t samples = 0;
    std::uint64_t seed = 0;

    /// Index of `gamma` in `gammas`, or -1.
    int gamma_index(double gamma) const;
    bool covers(double gamma, std::int64_t d) const { return d >= 1 && d <= d0 && gamma_index(gamma) >= 0; }
    bool operator==(const TableInfo&) const = default;
};

struct UniformQuantileTable {
    TableInfo info;
    /// entries[g][d - 1] for gamma index g.
    std::vector<std::vector<UniformEntry>> entries;

    const UniformEntry& entry(double gamma, std::int64_t d) const;
    /// Throws DataError naming the first violated invariant.
    void validate() const;
    bool operator==(const UniformQuantileTable&) const = default;
};

struct StandardizedQuantileTable {
    TableInfo info;
    /// z[g][d - 1] for gamma index g.
    std::vector<std::vector<double>> z;

    double quantile(double gamma, std::int64_t d) const;
    void validate() const;
    bool operator==(const StandardizedQuantileTable&) const = default;
};

struct QuantileTables {
    UniformQuantileTable uniform;
    StandardizedQuantileTable standardized;
};

inline constexpr std::int64_t kDefaultTableSamples = 100000;
inline constexpr std::int64_t kDefaultTableD0 = 1000;
std::vector<double> default_table_gammas();

/// Simulates `samples` paths up to d0 and tabulates both summaries for every
/// gamma. Paths are split into fixed blocks with their own derived streams,
/// so the result depends only on (d0, gammas, samples, seed).
QuantileTables build_tables(std::int64_t d0, const std::vector<double>& gammas, std::int64_t samples,
                            std::uint64_t seed, unsigned parallelism = 1);

/// u_gamma at d_max: rho in conservative mode; otherwise rho with
/// probability mixing_weight and sigma with the remaining probability.
double draw_u_gamma(const UniformQuantileTable& table, std::int64_t d_max, double gamma, DrawMode mode, Rng& rng);

double z_quantile(const StandardizedQuantileTable& table, std::int64_t d_max, double gamma);

// Text format: "fdpband-table v1" header, kind, run parameters, one
// tab-separated record per (gamma, d), and an FNV-1a checksum line.
inline constexpr std::string_view kTableMagic = "fdpband-table v1";

std::string to_text(const UniformQuantileTable& table);
std::string to_text(const StandardizedQuantileTable& table);
UniformQuantileTable uniform_table_from_text(std::string_view text);
StandardizedQuantileTable standardized_table_from_text(std::string_view text);

void save_table(const std::filesystem::path& path, const UniformQuantileTable& table);
void save_table(const std::filesystem::path& path, const StandardizedQuantileTable& table);
UniformQuantileTable load_uniform_table(const std::filesystem::path& path);
StandardizedQuantileTable load_standardized_table(const std::filesystem::path& path);

std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace compfdp
