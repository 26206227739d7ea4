#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "compfdp/core.hpp"
#include "compfdp/rng.hpp"

namespace compfdp {

/// Smallest index at which the stepdown bound becomes non-negative:
/// max{1, ceil((ceil(log2(1/gamma)) - 1) / alpha)}.
std::size_t compute_i0(double alpha, double gamma);

/// floor((i - d) * alpha) + 1: the number of false target wins among the top
/// i scores that would push the FDP above alpha when d of them are decoys.
std::int64_t excess_count(std::int64_t i, std::int64_t d, double alpha);

/// P[B(excess_count(i, d) + d, 1/2) <= d]; the d = -1 candidate gives 0.
double stepdown_tail(std::int64_t i, std::int64_t d, double alpha);

/// Randomization inputs at one index: p0 and p1 are the tail probabilities
/// at delta and delta + 1, and weight = (p1 - gamma) / (p1 - p0) is the
/// probability of keeping delta, so weight * p0 + (1 - weight) * p1 == gamma.
struct StepWeights {
    double p0 = 0.0;
    double p1 = 0.0;
    double weight = 0.0;
};

/// Produces delta(1), delta(2), ... one index at a time, reusing the
/// previous value since delta is non-decreasing in i.
class DeltaScanner {
public:
    DeltaScanner(double alpha, double gamma);

    /// delta at the next index (1 on the first call).
    std::int64_t next();
    std::size_t index() const { return i_; }

private:
    double alpha_;
    double gamma_;
    std::size_t i_ = 0;
    std::int64_t delta_ = -1;
};

/// Stepdown bounds delta(i) = max{d in {-1..i} : stepdown_tail(i, d) <= gamma}
/// for i = 1..m, with the weights the randomized variant needs.
class DeltaTable {
public:
    static DeltaTable compute(std::size_t m, double alpha, double gamma);

    double alpha() const { return alpha_; }
    double gamma() const { return gamma_; }
    std::size_t m() const { return delta_.size(); }
    std::size_t i0() const { return i0_; }

    /// 1-based.
    std::int64_t delta(std::size_t i) const { return delta_[i - 1]; }
    const StepWeights& weights(std::size_t i) const { return weights_[i - 1]; }
    std::span<const std::int64_t> values() const { return delta_; }

private:
    double alpha_ = 0.0;
    double gamma_ = 0.0;
    std::size_t i0_ = 1;
    std::vector<std::int64_t> delta_;
    std::vector<StepWeights> weights_;
};

DeltaTable compute_delta_table(std::size_t m, double alpha, double gamma);

StepWeights step_weights(std::size_t i, std::int64_t delta, double alpha, double gamma);

/// FDP-SD: the largest k >= i0 with D_j <= delta(j) for all j in [i0, k], or
/// 0 when the test already fails at i0. Computes delta lazily and stops at
/// the first violation.
DiscoveryReport run_fdp_sd(const CompetitionSequence& seq, double alpha, double gamma);

/// Same, with a precomputed table covering at least seq.size() indices.
DiscoveryReport run_fdp_sd(const CompetitionSequence& seq, const DeltaTable& table);

/// Randomized FDP-SD: each delta(i) is replaced by a draw gamma_i from
/// {delta(i), delta(i) + 1} with coupled draws while delta stays constant.
DiscoveryReport run_fdp_sd_randomized(const CompetitionSequence& seq, double alpha, double gamma, Rng& rng);

DiscoveryReport run_fdp_sd_randomized(const CompetitionSequence& seq, const DeltaTable& table, Rng& rng);

}  // namespace compfdp
