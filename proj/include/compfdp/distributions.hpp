#pragma once

#include <cstdint>

// Binomial(n, 1/2) and negative-binomial(d, 1/2) kernels. Every probability is
// assembled from a single binomial point mass evaluated with a saddle-point
// expansion (stirling error + deviance terms) and a ratio sum over the
// smaller tail, then exponentiated once.

namespace compfdp {

/// Binomial(n, 1/2) point mass at k.
double binom_pmf_half(std::int64_t n, std::int64_t k);

/// P[B(n, 1/2) <= k]; 0 for k < 0 and 1 for k >= n.
double binom_cdf_half(std::int64_t n, std::int64_t k);

/// P[X <= k] for X ~ NB(d, 1/2), the number of successes before the d-th
/// failure: P(X = k) = C(k + d - 1, k) 2^-(k + d).
double nb_cdf_half(std::int64_t d, std::int64_t k);

/// G_d(k) = P[X >= k] = 1 - nb_cdf_half(d, k - 1); 1 for k <= 0.
double nb_upper_tail(std::int64_t d, std::int64_t k);

/// min{i >= 0 : nb_cdf_half(d, i) >= q} for q in (0, 1).
std::int64_t nb_quantile(std::int64_t d, double q);

/// The (1 - u) quantile of NB(d, 1/2) located from the upper tail:
/// min{i >= 0 : nb_upper_tail(d, i + 1) <= u}, u in (0, 1]. Agrees with
/// nb_quantile(d, 1 - u) but stays exact when u is itself a tail value
/// produced by nb_upper_tail.
std::int64_t nb_tail_quantile(std::int64_t d, double u);

}  // namespace compfdp
