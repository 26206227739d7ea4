#include "compfdp/stepdown.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "compfdp/distributions.hpp"
#include "compfdp/errors.hpp"

namespace compfdp {
namespace {

void check_levels(double alpha, double gamma) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0,1)");
    if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("gamma must lie in (0,1)");
}

}  // namespace

std::int64_t excess_count(std::int64_t i, std::int64_t d, double alpha) {
    return static_cast<std::int64_t>(std::floor(static_cast<double>(i - d) * alpha)) + 1;
}

double stepdown_tail(std::int64_t i, std::int64_t d, double alpha) {
    if (d < 0) return 0.0;
    return binom_cdf_half(excess_count(i, d, alpha) + d, d);
}

std::size_t compute_i0(double alpha, double gamma) {
    check_levels(alpha, gamma);
    // ceil(log2(1/gamma)) as the smallest L with 2^-L <= gamma.
    std::int64_t levels = 0;
    while (std::ldexp(1.0, static_cast<int>(-levels)) > gamma) ++levels;
    if (levels <= 1) return 1;
    // Start from the closed form, then settle on the exact boundary of
    // floor(i * alpha) >= levels - 1 as evaluated by excess_count.
    auto ok = [&](std::int64_t i) { return excess_count(i, 0, alpha) - 1 >= levels - 1; };
    auto i0 = static_cast<std::int64_t>(std::ceil(static_cast<double>(levels - 1) / alpha));
    i0 = std::max<std::int64_t>(i0, 1);
    while (i0 > 1 && ok(i0 - 1)) --i0;
    while (!ok(i0)) ++i0;
    return static_cast<std::size_t>(i0);
}

DeltaScanner::DeltaScanner(double alpha, double gamma) : alpha_(alpha), gamma_(gamma) { check_levels(alpha, gamma); }

std::int64_t DeltaScanner::next() {
    ++i_;
    const auto i = static_cast<std::int64_t>(i_);
    // The qualifying set is a prefix of {-1, 0, ..., i}: the tail is
    // non-decreasing in d for fixed i.
    while (delta_ + 1 <= i && stepdown_tail(i, delta_ + 1, alpha_) <= gamma_) ++delta_;
    return delta_;
}

StepWeights step_weights(std::size_t i, std::int64_t delta, double alpha, double gamma) {
    const auto ii = static_cast<std::int64_t>(i);
    StepWeights w;
    w.p0 = stepdown_tail(ii, delta, alpha);
    w.p1 = stepdown_tail(ii, delta + 1, alpha);
    if (w.p1 <= gamma) {
        w.weight = 0.0;
    } else {
        w.weight = std::clamp((w.p1 - gamma) / (w.p1 - w.p0), 0.0, 1.0);
    }
    return w;
}

DeltaTable DeltaTable::compute(std::size_t m, double alpha, double gamma) {
    if (m < 1) throw DomainError("delta table needs m >= 1");
    DeltaTable t;
    t.alpha_ = alpha;
    t.gamma_ = gamma;
    t.i0_ = compute_i0(alpha, gamma);
    DeltaScanner scan(alpha, gamma);
    t.delta_.reserve(m);
    t.weights_.reserve(m);
    for (std::size_t i = 1; i <= m; ++i) {
        const auto d = scan.next();
        t.delta_.push_back(d);
        t.weights_.push_back(step_weights(i, d, alpha, gamma));
    }
    return t;
}

DeltaTable compute_delta_table(std::size_t m, double alpha, double gamma) { return DeltaTable::compute(m, alpha, gamma); }

DiscoveryReport run_fdp_sd(const CompetitionSequence& seq, double alpha, double gamma) {
    const std::size_t i0 = compute_i0(alpha, gamma);
    const std::size_t m = seq.size();
    std::size_t k = 0;
    if (i0 <= m) {
        DeltaScanner scan(alpha, gamma);
        k = m;
        for (std::size_t i = 1; i <= m; ++i) {
            const auto delta = scan.next();
            if (i >= i0 && static_cast<std::int64_t>(seq.decoys(i)) > delta) {
                k = i == i0 ? 0 : i - 1;
                break;
            }
        }
    }
    return make_report(seq, k, Procedure::fdp_sd, alpha, gamma);
}

DiscoveryReport run_fdp_sd(const CompetitionSequence& seq, const DeltaTable& table) {
    const std::size_t m = seq.size();
    if (table.m() < m) throw DomainError("delta table shorter than the sequence");
    const std::size_t i0 = table.i0();
    std::size_t k = 0;
    if (i0 <= m) {
        k = m;
        for (std::size_t i = i0; i <= m; ++i) {
            if (static_cast<std::int64_t>(seq.decoys(i)) > table.delta(i)) {
                k = i == i0 ? 0 : i - 1;
                break;
            }
        }
    }
    return make_report(seq, k, Procedure::fdp_sd, table.alpha(), table.gamma());
}

DiscoveryReport run_fdp_sd_randomized(const CompetitionSequence& seq, double alpha, double gamma, Rng& rng) {
    check_levels(alpha, gamma);
    if (seq.empty()) return make_report(seq, 0, Procedure::fdp_sd_randomized, alpha, gamma);
    return run_fdp_sd_randomized(seq, DeltaTable::compute(seq.size(), alpha, gamma), rng);
}

DiscoveryReport run_fdp_sd_randomized(const CompetitionSequence& seq, const DeltaTable& table, Rng& rng) {
    const std::size_t m = seq.size();
    if (table.m() < m) throw DomainError("delta table shorter than the sequence");
    const std::size_t i0 = table.i0();
    std::size_t k = 0;
    if (i0 <= m) {
        k = m;
        std::int64_t prev_delta = -1;
        std::int64_t prev_choice = 0;
        double prev_weight = 1.0;
        for (std::size_t i = 1; i <= m; ++i) {
            const std::int64_t delta = table.delta(i);
            const double w = table.weights(i).weight;
            std::int64_t choice;
            if (i == 1 || delta > prev_delta) {
                choice = bernoulli(rng, w) ? delta : delta + 1;
            } else if (prev_choice == delta + 1) {
                choice = prev_choice;
            } else {
                double ratio;
                if (prev_weight > 0.0) {
                    ratio = std::clamp(w / prev_weight, 0.0, 1.0);
                } else if (w == 0.0) {
                    ratio = 1.0;
                } else {
                    throw std::logic_error("randomized stepdown: coupling from a zero weight at index " +
                                           std::to_string(i));
                }
                choice = bernoulli(rng, ratio) ? delta : delta + 1;
            }
            if (i >= i0 && static_cast<std::int64_t>(seq.decoys(i)) > choice) {
                k = i == i0 ? 0 : i - 1;
                break;
            }
            prev_delta = delta;
            prev_choice = choice;
            prev_weight = w;
        }
    }
    return make_report(seq, k, Procedure::fdp_sd_randomized, table.alpha(), table.gamma());
}

}  // namespace compfdp
