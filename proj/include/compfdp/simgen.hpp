#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "compfdp/core.hpp"
#include "compfdp/rng.hpp"

namespace compfdp {

/// Location/scale of the Gumbel distribution a spectrum's scores are mapped
/// through in the uncalibrated model.
struct GumbelParams {
    double location = 0.0;
    double scale = 1.0;
};

/// Stand-in pool: `size` pairs, location uniform on [20, 40], scale uniform
/// on [3, 8].
std::vector<GumbelParams> default_gumbel_pool(std::uint64_t seed = kDefaultSeed, std::size_t size = 500);

/// Spectrum-identification model. A spectrum is foreign with probability
/// pi0. Native spectra have a generating-peptide score X ~ 1 - Beta(a, b) and
/// a best random target match Y ~ 1 - Beta(1, n - 1); foreign spectra have
/// X = -inf and Y ~ 1 - Beta(1, n). The decoy score is always 1 - Beta(1, n).
struct SpectrumIdParams {
    std::size_t m = 2000;
    double pi0 = 0.5;
    double a = 0.05;
    double b = 10.0;
    std::int64_t n_candidates = 100;
    bool calibrated = true;
    std::vector<GumbelParams> pool;  ///< uncalibrated only; empty selects default_gumbel_pool()
    std::uint64_t seed = kDefaultSeed;
};

struct SpectrumIdData {
    std::vector<ScorePair> pairs;
    SimulationTruth truth;
};

/// Target score max(X, Y) against the decoy score; a hypothesis is a true
/// null iff max(Y, decoy) > X.
SpectrumIdData gen_spectrum_id(const SpectrumIdParams& params);

/// Scores drawn with `rng` instead of params.seed (params.seed is ignored).
SpectrumIdData gen_spectrum_id(const SpectrumIdParams& params, Rng& rng);

struct GenericNullParams {
    std::size_t m = 2000;
    std::size_t num_false = 0;
};

struct GenericNullData {
    std::vector<LabeledHypothesis> hypotheses;
    SimulationTruth truth;
};

/// m hypotheses with distinct random scores; the num_false highest-scoring
/// ones are false nulls labelled +1 and every other label is a fair coin.
GenericNullData gen_generic_null(std::size_t m, std::size_t num_false, std::uint64_t seed);
GenericNullData gen_generic_null(std::size_t m, std::size_t num_false, Rng& rng);

/// Inverse Gumbel CDF; maps 0 to -inf and 1 to +inf.
double gumbel_quantile(double p, const GumbelParams& g);

}  // namespace compfdp
