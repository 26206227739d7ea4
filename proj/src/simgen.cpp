#include "compfdp/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

#include "compfdp/errors.hpp"

namespace compfdp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Scores are carried as complements c = 1 - score, which keeps full
// precision near 1 (Beta(0.05, b) draws are often far below 1e-16).

// Beta(1, k): 1 - U^(1/k).
double beta1(Rng& rng, double k) { return -std::expm1(std::log(uniform01(rng)) / k); }

double beta(Rng& rng, double a, double b) {
    std::gamma_distribution<double> ga(a, 1.0);
    std::gamma_distribution<double> gb(b, 1.0);
    const double x = ga(rng);
    const double y = gb(rng);
    return x / (x + y);
}

int competition_sign(double target, double decoy) { return (target > decoy) - (target < decoy); }

// gumbel_quantile(1 - c, g) without forming 1 - c. c == 0 is clamped to the
// smallest normal double so the score stays finite.
double gumbel_from_complement(double c, const GumbelParams& g) {
    if (c >= 1.0) return -kInf;
    c = std::max(c, std::numeric_limits<double>::min());
    return g.location - g.scale * std::log(-std::log1p(-c));
}

void check_params(const SpectrumIdParams& p) {
    if (p.m < 1) throw DomainError("spectrum-ID model needs m >= 1");
    if (!(p.pi0 >= 0.0 && p.pi0 <= 1.0)) throw DomainError("pi0 must lie in [0,1]");
    if (!(p.a > 0.0) || !(p.b > 0.0)) throw DomainError("Beta shape parameters must be positive");
    if (p.n_candidates < 2) throw DomainError("need at least 2 candidate peptides");
    for (const auto& g : p.pool)
        if (!(g.scale > 0.0) || !std::isfinite(g.location)) throw DomainError("Gumbel scale must be positive");
}

}  // namespace

double gumbel_quantile(double p, const GumbelParams& g) {
    if (p <= 0.0) return -kInf;
    if (p >= 1.0) return kInf;
    return g.location - g.scale * std::log(-std::log(p));
}

std::vector<GumbelParams> default_gumbel_pool(std::uint64_t seed, std::size_t size) {
    Rng rng(derive_seed(seed, 0x9001));
    std::vector<GumbelParams> pool(size);
    for (auto& g : pool) {
        g.location = 20.0 + 20.0 * uniform01(rng);
        g.scale = 3.0 + 5.0 * uniform01(rng);
    }
    return pool;
}

SpectrumIdData gen_spectrum_id(const SpectrumIdParams& params) {
    Rng rng(params.seed);
    return gen_spectrum_id(params, rng);
}

SpectrumIdData gen_spectrum_id(const SpectrumIdParams& params, Rng& rng) {
    check_params(params);
    std::vector<GumbelParams> default_pool;
    const std::vector<GumbelParams>* pool = &params.pool;
    if (!params.calibrated && pool->empty()) {
        default_pool = default_gumbel_pool();
        pool = &default_pool;
    }
    const auto n = static_cast<double>(params.n_candidates);

    SpectrumIdData out;
    out.pairs.reserve(params.m);
    out.truth.is_true_null.reserve(params.m);
    for (std::size_t i = 0; i < params.m; ++i) {
        const bool foreign = bernoulli(rng, params.pi0);
        double cx = kInf;  // X = -inf for a foreign spectrum
        double cy;
        if (foreign) {
            cy = beta1(rng, n);
        } else {
            cx = beta(rng, params.a, params.b);
            cy = beta1(rng, n - 1.0);
        }
        const double cd = beta1(rng, n);
        const double ct = std::min(cx, cy);
        out.truth.is_true_null.push_back(std::min(cy, cd) < cx);

        double target = 1.0 - ct;
        double decoy = 1.0 - cd;
        if (!params.calibrated) {
            const auto& g = (*pool)[static_cast<std::size_t>(uniform_index(rng, pool->size()))];
            const int before = competition_sign(cd, ct);
            target = gumbel_from_complement(ct, g);
            decoy = gumbel_from_complement(cd, g);
            if (competition_sign(target, decoy) != before)
                throw std::logic_error("Gumbel transform changed the competition outcome of spectrum " +
                                       std::to_string(i));
        }
        out.pairs.push_back({target, decoy});
    }
    return out;
}

GenericNullData gen_generic_null(std::size_t m, std::size_t num_false, std::uint64_t seed) {
    Rng rng(seed);
    return gen_generic_null(m, num_false, rng);
}

GenericNullData gen_generic_null(std::size_t m, std::size_t num_false, Rng& rng) {
    if (m < 1) throw DomainError("generic-null model needs m >= 1");
    if (num_false > m) throw DomainError("num_false must not exceed m");
    GenericNullData out;
    out.hypotheses.reserve(m);
    out.truth.is_true_null.reserve(m);
    for (std::size_t r = 0; r < m; ++r) {
        // Rank r sits strictly between m - r and m - r + 0.5.
        const double score = static_cast<double>(m - r) + 0.5 * uniform01(rng);
        const bool false_null = r < num_false;
        const int label = false_null || fair_coin(rng) ? kTargetWin : kDecoyWin;
        out.hypotheses.push_back({score, label, r});
        out.truth.is_true_null.push_back(!false_null);
    }
    return out;
}

}  // namespace compfdp
