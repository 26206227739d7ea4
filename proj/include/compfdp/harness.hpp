#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "compfdp/bands.hpp"
#include "compfdp/core.hpp"
#include "compfdp/simgen.hpp"

namespace compfdp {

using GeneratorSpec = std::variant<SpectrumIdParams, GenericNullParams>;

struct EvaluationConfig {
    GeneratorSpec generator = SpectrumIdParams{};
    /// FDP/FDR procedures to compare. TDC is always run as the reference.
    std::vector<Procedure> procedures{Procedure::tdc, Procedure::fdp_sd};
    /// Bands used to bound TDC's FDP.
    std::vector<BandKind> bounds;
    double alpha = 0.05;
    double gamma = 0.05;
    std::size_t replicates = 1000;
    std::uint64_t master_seed = kDefaultSeed;
    unsigned parallelism = 1;
    QuantileSource tables;
    DrawMode draw = DrawMode::randomized;
    std::size_t histogram_bins = 50;
};

/// Binomial proportion with an exact (Clopper-Pearson) confidence interval.
struct ProportionEstimate {
    std::size_t successes = 0;
    std::size_t trials = 0;
    double rate = 0.0;
    double lower = 0.0;
    double upper = 1.0;
};

ProportionEstimate clopper_pearson(std::size_t successes, std::size_t trials, double confidence = 0.95);

/// 1 - (t + 1e-12) / (t_ref + 1e-12) for true-discovery counts.
double relative_power_loss(double true_discoveries, double reference_true_discoveries);

struct ProcedureSummary {
    Procedure procedure = Procedure::tdc;
    double mean_fdp = 0.0;
    double median_fdp = 0.0;
    ProportionEstimate exceedance;  ///< P(FDP > alpha)
    bool violation = false;         ///< exceedance CI lies entirely above gamma
    double mean_true_discoveries = 0.0;
    double median_true_discoveries = 0.0;
    double median_discoveries = 0.0;
    double median_power_loss_vs_tdc = 0.0;
    std::vector<std::size_t> fdp_histogram;
};

struct BoundSummary {
    Procedure method = Procedure::tdc_krb;
    ProportionEstimate coverage_violation;  ///< P(FDP of TDC > bound)
    bool violation = false;
    double median_bound = 0.0;
    double mean_bound = 0.0;
    double median_tdc_fdp = 0.0;
    std::vector<std::size_t> bound_histogram;
};

struct EvaluationSummary {
    std::size_t replicates = 0;
    double alpha = 0.0;
    double gamma = 0.0;
    std::vector<ProcedureSummary> procedures;
    std::vector<BoundSummary> bounds;
};

/// One procedure (or bound) outcome on one replicate.
struct ReplicateRow {
    std::size_t replicate = 0;
    Procedure procedure = Procedure::tdc;
    std::size_t k = 0;
    std::size_t targets = 0;
    std::size_t decoys = 0;
    std::size_t true_discoveries = 0;
    double fdp = 0.0;
    std::optional<double> bound;
};

struct EvaluationResult {
    EvaluationSummary summary;
    std::vector<ReplicateRow> rows;
};

/// Runs every procedure and bound on `replicates` datasets. Replicate r is
/// generated from a seed derived from (master_seed, r), and all procedures
/// see the same dataset. The result does not depend on `parallelism`.
EvaluationResult run_evaluation(const EvaluationConfig& config);

inline constexpr const char* kEvaluationSchema = "compfdp-evaluation v1";
inline constexpr const char* kReplicateCsvSchema = "compfdp-replicates v1";

/// Header: replicate,procedure,k,T_k,D_k,fdp,bound
void write_replicate_csv(std::ostream& out, const std::vector<ReplicateRow>& rows);
std::string summary_json(const EvaluationSummary& summary, const EvaluationConfig& config);

double median(std::vector<double> values);

}  // namespace compfdp
