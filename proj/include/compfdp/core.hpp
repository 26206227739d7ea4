#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "compfdp/rng.hpp"

namespace compfdp {

/// Target (observed) and decoy (knockoff) score of one hypothesis. The target
/// score may be -infinity, which marks a foreign spectrum.
struct ScorePair {
    double target_score = 0.0;
    double decoy_score = 0.0;
};

inline constexpr int kTargetWin = +1;
inline constexpr int kDecoyWin = -1;

/// Competition outcome: winning score, +1/-1 label, and the index of the
/// input record it came from.
struct LabeledHypothesis {
    double score = 0.0;
    int label = kTargetWin;
    std::size_t origin = 0;
};

enum class TiePolicy { random_break, drop };

/// Pairs each target score with its decoy. Exact ties are settled by a fair
/// coin or removed, depending on `policy`; `origin` records the input index.
std::vector<LabeledHypothesis> compete(std::span<const ScorePair> pairs, TiePolicy policy, Rng& rng);

/// Hypotheses ordered by non-increasing score with prefix counts of decoy and
/// target wins. Positions are 1-based: decoys(i) is D_i, the number of decoy
/// wins among the top i scores, and decoys(0) == targets(0) == 0.
class CompetitionSequence {
public:
    CompetitionSequence() = default;

    /// Builds a sequence whose order is exactly `labels` (scores m, m-1, ..., 1).
    static CompetitionSequence from_labels(std::span<const int> labels);

    std::size_t size() const { return hypotheses_.size(); }
    bool empty() const { return hypotheses_.empty(); }

    std::span<const LabeledHypothesis> hypotheses() const { return hypotheses_; }
    /// Hypothesis at 1-based position i.
    const LabeledHypothesis& at(std::size_t i) const { return hypotheses_[i - 1]; }
    int label(std::size_t i) const { return hypotheses_[i - 1].label; }

    std::size_t decoys(std::size_t i) const { return decoys_[i]; }
    std::size_t targets(std::size_t i) const { return i - decoys_[i]; }

private:
    friend CompetitionSequence build_sequence(std::vector<LabeledHypothesis> labeled, Rng& rng);
    explicit CompetitionSequence(std::vector<LabeledHypothesis> sorted);

    std::vector<LabeledHypothesis> hypotheses_;
    std::vector<std::size_t> decoys_{0};
};

/// Sorts by non-increasing score. Hypotheses with equal scores are put in a
/// uniformly random order that does not look at their labels.
CompetitionSequence build_sequence(std::vector<LabeledHypothesis> labeled, Rng& rng);

enum class Procedure {
    tdc,
    fdp_sd,
    fdp_sd_randomized,
    fdp_ub,
    fdp_sb,
    fdp_krb,
    tdc_ub,
    tdc_sb,
    tdc_krb,
};

std::string_view procedure_name(Procedure p);
std::optional<Procedure> parse_procedure(std::string_view name);

/// Outcome of a procedure: all target wins among the top k scores.
struct DiscoveryReport {
    Procedure procedure = Procedure::tdc;
    double alpha = 0.0;
    std::optional<double> gamma;
    std::size_t m = 0;
    std::size_t k = 0;
    std::size_t num_targets = 0;
    std::size_t num_decoys = 0;
    /// 1-based positions (all <= k) of the reported target wins.
    std::vector<std::size_t> positions;
    /// Input-record indices of the same target wins.
    std::vector<std::size_t> origins;
    /// Upper prediction bound on the FDP of this list, when computed.
    std::optional<double> bound;
};

/// Assembles the report for threshold k over `seq`.
DiscoveryReport make_report(const CompetitionSequence& seq, std::size_t k, Procedure procedure, double alpha,
                            std::optional<double> gamma = std::nullopt);

/// Ground truth from a generator, indexed by input-record index.
struct SimulationTruth {
    std::vector<bool> is_true_null;
};

/// Number of reported discoveries that are true nulls.
std::size_t false_discoveries(const DiscoveryReport& report, const SimulationTruth& truth);

/// Fraction of reported discoveries that are true nulls; 0 for an empty report.
double true_fdp(const DiscoveryReport& report, const SimulationTruth& truth);

}  // namespace compfdp
