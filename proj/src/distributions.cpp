#include "compfdp/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "compfdp/errors.hpp"

namespace compfdp {
namespace {

constexpr double kLn2 = std::numbers::ln2;
constexpr double kLn2Pi = 1.8378770664093454836;       // log(2 pi)
constexpr double kLnSqrt2Pi = 0.91893853320467274178;  // log(sqrt(2 pi))

// log(n!) - log(sqrt(2 pi n) (n/e)^n)
double stirling_error(double n) {
    constexpr double s0 = 1.0 / 12.0;
    constexpr double s1 = 1.0 / 360.0;
    constexpr double s2 = 1.0 / 1260.0;
    constexpr double s3 = 1.0 / 1680.0;
    constexpr double s4 = 1.0 / 1188.0;
    if (n <= 15.0) return std::lgamma(n + 1.0) - (n + 0.5) * std::log(n) + n - kLnSqrt2Pi;
    const double nn = n * n;
    if (n > 500) return (s0 - s1 / nn) / n;
    if (n > 80) return (s0 - (s1 - s2 / nn) / nn) / n;
    if (n > 35) return (s0 - (s1 - (s2 - s3 / nn) / nn) / nn) / n;
    return (s0 - (s1 - (s2 - (s3 - s4 / nn) / nn) / nn) / nn) / n;
}

// x log(x / np) + np - x, evaluated without cancellation near x == np.
double deviance(double x, double np) {
    if (std::fabs(x - np) < 0.1 * (x + np)) {
        double v = (x - np) / (x + np);
        double s = (x - np) * v;
        double ej = 2 * x * v;
        v *= v;
        for (int j = 1; j < 1000; ++j) {
            ej *= v;
            const double s1 = s + ej / (2 * j + 1);
            if (s1 == s) return s1;
            s = s1;
        }
        return s;
    }
    return x * std::log(x / np) + np - x;
}

double log_pmf_half(std::int64_t n, std::int64_t k) {
    const double nd = static_cast<double>(n);
    if (k == 0 || k == n) return -nd * kLn2;
    const double x = static_cast<double>(k);
    const double half = 0.5 * nd;
    const double lc = stirling_error(nd) - stirling_error(x) - stirling_error(nd - x) - deviance(x, half) -
                      deviance(nd - x, half);
    const double lf = kLn2Pi + std::log(x) + std::log1p(-x / nd);
    return lc - 0.5 * lf;
}

// P[B(n,1/2) <= k] for 0 <= k with 2k + 1 <= n (the lower tail is the smaller one).
double lower_tail(std::int64_t n, std::int64_t k) {
    if (k == 0) return std::ldexp(1.0, static_cast<int>(-std::min<std::int64_t>(n, 2000)));
    double term = 1.0;
    double sum = 1.0;
    for (std::int64_t j = k; j > 0; --j) {
        term *= static_cast<double>(j) / static_cast<double>(n - j + 1);
        sum += term;
        if (term < sum * 0x1.0p-60) break;
    }
    return std::exp(log_pmf_half(n, k) + std::log(sum));
}

// Up to this size every partial row sum of C(n, j) fits in 64 bits, so the
// CDF is computed exactly and rounded once.
constexpr std::int64_t kExactMaxN = 62;

unsigned __int128 choose_sum(std::int64_t n, std::int64_t k) {
    unsigned __int128 c = 1, sum = 1;
    for (std::int64_t j = 0; j < k; ++j) {
        c = c * static_cast<unsigned>(n - j) / static_cast<unsigned>(j + 1);
        sum += c;
    }
    return sum;
}

double exact_cdf(std::int64_t n, std::int64_t k) {
    return std::ldexp(static_cast<double>(static_cast<std::uint64_t>(choose_sum(n, k))), static_cast<int>(-n));
}

}  // namespace

double binom_pmf_half(std::int64_t n, std::int64_t k) {
    if (n < 0) throw DomainError("binomial size must be non-negative, got " + std::to_string(n));
    if (k < 0 || k > n) return 0.0;
    if (k == 0 || k == n) return std::ldexp(1.0, static_cast<int>(-std::min<std::int64_t>(n, 2000)));
    return std::exp(log_pmf_half(n, k));
}

double binom_cdf_half(std::int64_t n, std::int64_t k) {
    if (n < 0) throw DomainError("binomial size must be non-negative, got " + std::to_string(n));
    if (k < 0) return 0.0;
    if (k >= n) return 1.0;
    if (2 * k + 1 == n) return 0.5;
    if (n <= kExactMaxN) return exact_cdf(n, k);
    if (2 * k + 1 <= n) return lower_tail(n, k);
    // P[B <= k] = 1 - P[B >= k + 1] = 1 - P[B <= n - k - 1] by symmetry at p = 1/2.
    return 1.0 - lower_tail(n, n - k - 1);
}

double nb_cdf_half(std::int64_t d, std::int64_t k) {
    if (d <= 0) throw DomainError("negative binomial size must be positive, got " + std::to_string(d));
    if (k < 0) return 0.0;
    // X <= k  iff  at most k successes among the first k + d trials.
    return binom_cdf_half(k + d, k);
}

double nb_upper_tail(std::int64_t d, std::int64_t k) {
    if (d <= 0) throw DomainError("negative binomial size must be positive, got " + std::to_string(d));
    if (k <= 0) return 1.0;
    // X >= k  iff  at most d - 1 failures among the first k + d - 1 trials.
    return binom_cdf_half(k + d - 1, d - 1);
}

namespace {

// Smallest i in [0, inf) with pred(i); pred must be monotone false -> true.
template <class Pred>
std::int64_t first_true(std::int64_t guess, Pred pred) {
    std::int64_t hi = std::max<std::int64_t>(guess, 1);
    while (!pred(hi)) hi *= 2;
    std::int64_t lo = -1;  // pred(lo) treated as false
    while (hi - lo > 1) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        (pred(mid) ? hi : lo) = mid;
    }
    return hi;
}

}  // namespace

std::int64_t nb_quantile(std::int64_t d, double q) {
    if (d <= 0) throw DomainError("negative binomial size must be positive, got " + std::to_string(d));
    if (!(q > 0.0 && q < 1.0)) throw DomainError("quantile level must lie in (0,1)");
    return first_true(d, [&](std::int64_t i) { return nb_cdf_half(d, i) >= q; });
}

std::int64_t nb_tail_quantile(std::int64_t d, double u) {
    if (d <= 0) throw DomainError("negative binomial size must be positive, got " + std::to_string(d));
    if (!(u > 0.0 && u <= 1.0)) throw DomainError("tail level must lie in (0,1]");
    return first_true(d, [&](std::int64_t i) { return nb_upper_tail(d, i + 1) <= u; });
}

}  // namespace compfdp
