#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "compfdp/core.hpp"
#include "compfdp/mc_quantiles.hpp"
#include "compfdp/rng.hpp"

namespace compfdp {

/// TDC: the largest k with (D_k + 1) / T_k <= alpha (infinite when T_k = 0),
/// or 0 if there is none.
DiscoveryReport run_tdc(const CompetitionSequence& seq, double alpha);

enum class BandKind { uniform, standardized, kr };

std::string_view band_name(BandKind kind);
std::optional<BandKind> parse_band(std::string_view name);

/// Tables a uniform or standardized band reads from. Shared, read-only.
struct QuantileSource {
    std::shared_ptr<const UniformQuantileTable> uniform;
    std::shared_ptr<const StandardizedQuantileTable> standardized;
};

/// Which upper prediction band to use and how. d_max == 0 selects the
/// automatic choice (d_infty for FDP control, the TDC ceiling for bounds);
/// it is ignored for the KR band.
struct BandSpec {
    BandKind kind = BandKind::kr;
    double gamma = 0.05;
    std::int64_t d_max = 0;
    QuantileSource tables;
    DrawMode draw = DrawMode::randomized;
};

/// -log(gamma) / log(2 - gamma).
double kr_constant(double gamma);

/// floor(alpha (m + 1) / (1 + alpha)): no TDC list can hold more decoy wins
/// than this minus one.
std::int64_t compute_d_max_tdc(double alpha, std::size_t m);

/// xi_{d0}^{d0}, the band built for d_max = d0 evaluated at its last index
/// (conservative u for the uniform band). 0 for d0 == 0.
double band_endpoint(std::int64_t d0, const BandSpec& band);

/// Largest d0 in 0..m with band_endpoint(d0) / (m - d0 + 1) <= alpha. The
/// scan runs upward and stops past the ceiling
/// ceil(alpha (m + 1) / (1 + alpha)) once 50 consecutive d0 fail.
/// Throws ConfigError when the tables stop short of the ceiling + 1.
std::int64_t compute_d_infty(std::size_t m, double alpha, const BandSpec& band);

/// A materialized band: value(d) for d = 1..d_max, +infinity beyond.
///   uniform:      value(d) = (1 - u) quantile of NB(d, 1/2)
///   standardized: value(d) = z sqrt(2d) + d
///   kr:           value(d) = C d   (so value(D + 1) = C (1 + D))
class Band {
public:
    BandKind kind() const { return kind_; }
    std::int64_t d_max() const { return d_max_; }
    /// The drawn uniform level u, the z quantile or the KR constant.
    double level() const { return level_; }
    double value(std::int64_t d) const;

private:
    friend class BandPlan;
    BandKind kind_ = BandKind::kr;
    std::int64_t d_max_ = 0;
    double level_ = 0.0;
    std::shared_ptr<const std::vector<double>> values_;
};

/// Everything about a band that does not depend on the data: d_max, the
/// quantile lookups and, for the uniform band, both candidate band vectors
/// (u = rho and u = sigma). draw() then only flips the randomization coin.
class BandPlan {
public:
    static BandPlan for_fdp_control(std::size_t m, double alpha, const BandSpec& band);
    static BandPlan for_tdc_bound(std::size_t m, double alpha, const BandSpec& band);

    const BandSpec& spec() const { return spec_; }
    std::size_t m() const { return m_; }
    double alpha() const { return alpha_; }
    std::int64_t d_max() const { return d_max_; }

    Band draw(Rng& rng) const;

private:
    static BandPlan make(std::size_t m, double alpha, const BandSpec& band, std::int64_t d_max);

    BandSpec spec_;
    std::size_t m_ = 0;
    double alpha_ = 0.0;
    std::int64_t d_max_ = 0;
    double weight_ = 1.0;  // probability of the rho variant
    double rho_ = 0.0;
    double sigma_ = 0.0;
    double level_ = 0.0;
    std::shared_ptr<const std::vector<double>> rho_values_;
    std::shared_ptr<const std::vector<double>> sigma_values_;
};

/// tau = max{k : value(D_k + 1) / T_k <= alpha, or k = 0}.
std::size_t band_threshold(const CompetitionSequence& seq, double alpha, const Band& band);

/// FDP-UB / FDP-SB / FDP-KRB depending on band.kind.
DiscoveryReport run_fdp_band(const CompetitionSequence& seq, double alpha, const BandSpec& band, Rng& rng);
DiscoveryReport run_fdp_band(const CompetitionSequence& seq, const BandPlan& plan, Rng& rng);

/// Upper prediction bound on the FDP of TDC's list (TDC-UB / -SB / -KRB by
/// band.kind): min(value(D + 1) / T, 1), or 0 when TDC reported nothing.
double bound_tdc_fdp(const CompetitionSequence& seq, const DiscoveryReport& tdc_report, const BandSpec& band, Rng& rng);
double bound_tdc_fdp(const CompetitionSequence& seq, const DiscoveryReport& tdc_report, const BandPlan& plan,
                     Rng& rng);

Procedure fdp_procedure(BandKind kind);
Procedure bound_procedure(BandKind kind);

}  // namespace compfdp
