#include "compfdp/core.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <utility>

#include "compfdp/errors.hpp"

namespace compfdp {

std::vector<LabeledHypothesis> compete(std::span<const ScorePair> pairs, TiePolicy policy, Rng& rng) {
    if (pairs.empty()) throw DomainError("compete: no score pairs");
    std::vector<LabeledHypothesis> out;
    out.reserve(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto [z, zd] = pairs[i];
        if (!std::isfinite(zd))
            throw DomainError("compete: decoy score of record " + std::to_string(i) + " is not finite");
        if (std::isnan(z) || z == HUGE_VAL)
            throw DomainError("compete: target score of record " + std::to_string(i) + " must be finite or -inf");
        if (z > zd) {
            out.push_back({z, kTargetWin, i});
        } else if (z < zd) {
            out.push_back({zd, kDecoyWin, i});
        } else if (policy == TiePolicy::random_break) {
            out.push_back({z, fair_coin(rng) ? kTargetWin : kDecoyWin, i});
        }
    }
    return out;
}

CompetitionSequence::CompetitionSequence(std::vector<LabeledHypothesis> sorted) : hypotheses_(std::move(sorted)) {
    decoys_.reserve(hypotheses_.size() + 1);
    std::size_t d = 0;
    for (const auto& h : hypotheses_) {
        if (h.label == kDecoyWin) ++d;
        decoys_.push_back(d);
    }
}

CompetitionSequence CompetitionSequence::from_labels(std::span<const int> labels) {
    std::vector<LabeledHypothesis> hs;
    hs.reserve(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != kTargetWin && labels[i] != kDecoyWin)
            throw DomainError("label must be +1 or -1, got " + std::to_string(labels[i]));
        hs.push_back({static_cast<double>(labels.size() - i), labels[i], i});
    }
    return CompetitionSequence(std::move(hs));
}

CompetitionSequence build_sequence(std::vector<LabeledHypothesis> labeled, Rng& rng) {
    for (const auto& h : labeled) {
        if (h.label != kTargetWin && h.label != kDecoyWin)
            throw DomainError("build_sequence: label must be +1 or -1, got " + std::to_string(h.label));
        if (std::isnan(h.score)) throw DomainError("build_sequence: NaN score");
    }
    std::stable_sort(labeled.begin(), labeled.end(),
                     [](const LabeledHypothesis& a, const LabeledHypothesis& b) { return a.score > b.score; });
    // Shuffle each run of equal scores.
    for (std::size_t lo = 0; lo < labeled.size();) {
        std::size_t hi = lo + 1;
        while (hi < labeled.size() && labeled[hi].score == labeled[lo].score) ++hi;
        for (std::size_t n = hi - lo; n > 1; --n) {
            const auto j = static_cast<std::size_t>(uniform_index(rng, n));
            std::swap(labeled[lo + n - 1], labeled[lo + j]);
        }
        lo = hi;
    }
    return CompetitionSequence(std::move(labeled));
}

namespace {
constexpr std::array<std::pair<Procedure, std::string_view>, 9> kProcedureNames{{
    {Procedure::tdc, "tdc"},
    {Procedure::fdp_sd, "fdp-sd"},
    {Procedure::fdp_sd_randomized, "fdp-sd-randomized"},
    {Procedure::fdp_ub, "fdp-ub"},
    {Procedure::fdp_sb, "fdp-sb"},
    {Procedure::fdp_krb, "fdp-krb"},
    {Procedure::tdc_ub, "tdc-ub"},
    {Procedure::tdc_sb, "tdc-sb"},
    {Procedure::tdc_krb, "tdc-krb"},
}};
}  // namespace

std::string_view procedure_name(Procedure p) {
    for (const auto& [proc, name] : kProcedureNames)
        if (proc == p) return name;
    return "unknown";
}

std::optional<Procedure> parse_procedure(std::string_view name) {
    for (const auto& [proc, n] : kProcedureNames)
        if (n == name) return proc;
    return std::nullopt;
}

DiscoveryReport make_report(const CompetitionSequence& seq, std::size_t k, Procedure procedure, double alpha,
                            std::optional<double> gamma) {
    DiscoveryReport r;
    r.procedure = procedure;
    r.alpha = alpha;
    r.gamma = gamma;
    r.m = seq.size();
    r.k = std::min(k, seq.size());
    r.num_decoys = seq.decoys(r.k);
    r.num_targets = seq.targets(r.k);
    r.positions.reserve(r.num_targets);
    r.origins.reserve(r.num_targets);
    for (std::size_t i = 1; i <= r.k; ++i) {
        if (seq.label(i) == kTargetWin) {
            r.positions.push_back(i);
            r.origins.push_back(seq.at(i).origin);
        }
    }
    return r;
}

std::size_t false_discoveries(const DiscoveryReport& report, const SimulationTruth& truth) {
    std::size_t n = 0;
    for (auto idx : report.origins) {
        if (idx >= truth.is_true_null.size())
            throw DomainError("reported index " + std::to_string(idx) + " outside ground truth of size " +
                              std::to_string(truth.is_true_null.size()));
        if (truth.is_true_null[idx]) ++n;
    }
    return n;
}

double true_fdp(const DiscoveryReport& report, const SimulationTruth& truth) {
    const auto fd = false_discoveries(report, truth);
    if (report.k == 0 || report.origins.empty()) return 0.0;
    return static_cast<double>(fd) / static_cast<double>(std::max<std::size_t>(report.origins.size(), 1));
}

}  // namespace compfdp
