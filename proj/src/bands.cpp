#include "compfdp/bands.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "compfdp/distributions.hpp"
#include "compfdp/errors.hpp"

namespace compfdp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::int64_t kScanPatience = 50;

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0,1)");
}
void check_gamma(double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("gamma must lie in (0,1)");
}

const UniformQuantileTable& uniform_table(const BandSpec& band) {
    if (!band.tables.uniform) throw ConfigError("the uniform band needs a uniform quantile table");
    return *band.tables.uniform;
}
const StandardizedQuantileTable& standardized_table(const BandSpec& band) {
    if (!band.tables.standardized) throw ConfigError("the standardized band needs a standardized quantile table");
    return *band.tables.standardized;
}

double uniform_value(std::int64_t d, double u) {
    if (u <= 0.0) return kInf;
    return static_cast<double>(nb_tail_quantile(d, u));
}

std::shared_ptr<const std::vector<double>> uniform_values(std::int64_t d_max, double u) {
    auto v = std::make_shared<std::vector<double>>();
    v->reserve(static_cast<std::size_t>(d_max));
    for (std::int64_t d = 1; d <= d_max; ++d) v->push_back(uniform_value(d, u));
    return v;
}

}  // namespace

DiscoveryReport run_tdc(const CompetitionSequence& seq, double alpha) {
    check_alpha(alpha);
    std::size_t k = 0;
    for (std::size_t i = seq.size(); i >= 1; --i) {
        const auto t = seq.targets(i);
        if (t > 0 && static_cast<double>(seq.decoys(i) + 1) / static_cast<double>(t) <= alpha) {
            k = i;
            break;
        }
    }
    return make_report(seq, k, Procedure::tdc, alpha);
}

std::string_view band_name(BandKind kind) {
    switch (kind) {
        case BandKind::uniform: return "uniform";
        case BandKind::standardized: return "standardized";
        case BandKind::kr: return "kr";
    }
    return "unknown";
}

std::optional<BandKind> parse_band(std::string_view name) {
    if (name == "uniform" || name == "ub") return BandKind::uniform;
    if (name == "standardized" || name == "sb") return BandKind::standardized;
    if (name == "kr" || name == "krb") return BandKind::kr;
    return std::nullopt;
}

Procedure fdp_procedure(BandKind kind) {
    switch (kind) {
        case BandKind::uniform: return Procedure::fdp_ub;
        case BandKind::standardized: return Procedure::fdp_sb;
        case BandKind::kr: break;
    }
    return Procedure::fdp_krb;
}

Procedure bound_procedure(BandKind kind) {
    switch (kind) {
        case BandKind::uniform: return Procedure::tdc_ub;
        case BandKind::standardized: return Procedure::tdc_sb;
        case BandKind::kr: break;
    }
    return Procedure::tdc_krb;
}

double kr_constant(double gamma) {
    check_gamma(gamma);
    return -std::log(gamma) / std::log(2.0 - gamma);
}

std::int64_t compute_d_max_tdc(double alpha, std::size_t m) {
    check_alpha(alpha);
    if (m < 1) throw DomainError("m must be >= 1");
    const double x = alpha * static_cast<double>(m + 1) / (1.0 + alpha);
    return static_cast<std::int64_t>(std::floor(x + 1e-9));
}

double band_endpoint(std::int64_t d0, const BandSpec& band) {
    if (d0 <= 0) return 0.0;
    switch (band.kind) {
        case BandKind::uniform: {
            const auto& e = uniform_table(band).entry(band.gamma, d0);
            return uniform_value(d0, e.rho);
        }
        case BandKind::standardized: {
            const double z = standardized_table(band).quantile(band.gamma, d0);
            const auto d = static_cast<double>(d0);
            return z * std::sqrt(2.0 * d) + d;
        }
        case BandKind::kr: break;
    }
    throw DomainError("d_infty is only defined for the uniform and standardized bands");
}

std::int64_t compute_d_infty(std::size_t m, double alpha, const BandSpec& band) {
    check_alpha(alpha);
    check_gamma(band.gamma);
    if (band.kind == BandKind::kr) throw DomainError("d_infty is only defined for the uniform and standardized bands");
    const auto mm = static_cast<std::int64_t>(m);
    const auto ceiling =
        static_cast<std::int64_t>(std::ceil(alpha * static_cast<double>(m + 1) / (1.0 + alpha) - 1e-9));
    std::int64_t table_end = 0;
    if (band.kind == BandKind::uniform && band.tables.uniform) table_end = band.tables.uniform->info.d0;
    if (band.kind == BandKind::standardized && band.tables.standardized)
        table_end = band.tables.standardized->info.d0;
    std::int64_t best = 0;
    std::int64_t failures = 0;
    for (std::int64_t d0 = 1; d0 <= mm; ++d0) {
        if (d0 > ceiling && failures >= kScanPatience) break;
        // Past the ceiling the endpoint alone already exceeds the budget,
        // so a table that ends there only trims the patience margin.
        if (d0 > table_end && d0 > ceiling + 1 && table_end > 0) break;
        const double xi = band_endpoint(d0, band);
        if (xi / static_cast<double>(mm - d0 + 1) <= alpha) {
            best = d0;
            failures = 0;
        } else {
            ++failures;
        }
    }
    return best;
}

double Band::value(std::int64_t d) const {
    if (d < 1) return 0.0;
    if (kind_ == BandKind::kr) return level_ * static_cast<double>(d);
    if (d > d_max_) return kInf;
    if (kind_ == BandKind::standardized) {
        const auto dd = static_cast<double>(d);
        return level_ * std::sqrt(2.0 * dd) + dd;
    }
    return (*values_)[static_cast<std::size_t>(d - 1)];
}

BandPlan BandPlan::make(std::size_t m, double alpha, const BandSpec& band, std::int64_t d_max) {
    BandPlan p;
    p.spec_ = band;
    p.m_ = m;
    p.alpha_ = alpha;
    p.d_max_ = d_max;
    switch (band.kind) {
        case BandKind::kr:
            p.level_ = kr_constant(band.gamma);
            break;
        case BandKind::standardized:
            if (d_max > 0) p.level_ = z_quantile(standardized_table(band), d_max, band.gamma);
            break;
        case BandKind::uniform:
            if (d_max > 0) {
                const auto& e = uniform_table(band).entry(band.gamma, d_max);
                p.rho_ = e.rho;
                p.sigma_ = e.sigma;
                p.weight_ = band.draw == DrawMode::conservative ? 1.0 : mixing_weight(e, band.gamma);
                p.rho_values_ = uniform_values(d_max, e.rho);
                if (p.weight_ < 1.0) p.sigma_values_ = uniform_values(d_max, e.sigma);
            }
            break;
    }
    return p;
}

BandPlan BandPlan::for_fdp_control(std::size_t m, double alpha, const BandSpec& band) {
    check_alpha(alpha);
    check_gamma(band.gamma);
    std::int64_t d_max = 0;
    if (band.kind != BandKind::kr) d_max = band.d_max > 0 ? band.d_max : compute_d_infty(m, alpha, band);
    return make(m, alpha, band, d_max);
}

BandPlan BandPlan::for_tdc_bound(std::size_t m, double alpha, const BandSpec& band) {
    check_alpha(alpha);
    check_gamma(band.gamma);
    std::int64_t d_max = 0;
    if (band.kind != BandKind::kr) d_max = band.d_max > 0 ? band.d_max : (m > 0 ? compute_d_max_tdc(alpha, m) : 0);
    return make(m, alpha, band, d_max);
}

Band BandPlan::draw(Rng& rng) const {
    Band b;
    b.kind_ = spec_.kind;
    b.d_max_ = d_max_;
    b.level_ = level_;
    if (spec_.kind == BandKind::uniform) {
        const bool use_rho = d_max_ == 0 || weight_ >= 1.0 || (spec_.draw == DrawMode::randomized && bernoulli(rng, weight_));
        b.level_ = use_rho ? rho_ : sigma_;
        b.values_ = use_rho ? rho_values_ : sigma_values_;
    }
    return b;
}

std::size_t band_threshold(const CompetitionSequence& seq, double alpha, const Band& band) {
    for (std::size_t k = seq.size(); k >= 1; --k) {
        const auto t = seq.targets(k);
        if (t == 0) continue;
        const double xi = band.value(static_cast<std::int64_t>(seq.decoys(k)) + 1);
        if (xi / static_cast<double>(t) <= alpha) return k;
    }
    return 0;
}

DiscoveryReport run_fdp_band(const CompetitionSequence& seq, double alpha, const BandSpec& band, Rng& rng) {
    return run_fdp_band(seq, BandPlan::for_fdp_control(seq.size(), alpha, band), rng);
}

DiscoveryReport run_fdp_band(const CompetitionSequence& seq, const BandPlan& plan, Rng& rng) {
    if (plan.m() != seq.size()) throw DomainError("band plan was built for a different number of hypotheses");
    const Band band = plan.draw(rng);
    const std::size_t tau = band_threshold(seq, plan.alpha(), band);
    return make_report(seq, tau, fdp_procedure(plan.spec().kind), plan.alpha(), plan.spec().gamma);
}

double bound_tdc_fdp(const CompetitionSequence& seq, const DiscoveryReport& tdc_report, const BandSpec& band,
                     Rng& rng) {
    return bound_tdc_fdp(seq, tdc_report, BandPlan::for_tdc_bound(seq.size(), tdc_report.alpha, band), rng);
}

double bound_tdc_fdp(const CompetitionSequence& seq, const DiscoveryReport& tdc_report, const BandPlan& plan,
                     Rng& rng) {
    if (tdc_report.m != seq.size() || tdc_report.k > seq.size())
        throw DomainError("TDC report does not match the sequence");
    if (plan.m() != seq.size()) throw DomainError("band plan was built for a different number of hypotheses");
    const Band band = plan.draw(rng);
    const std::size_t k = tdc_report.k;
    const std::size_t t = seq.targets(k);
    if (t == 0) return 0.0;
    const auto next_decoy = static_cast<std::int64_t>(seq.decoys(k)) + 1;
    if (plan.spec().kind != BandKind::kr && plan.spec().d_max == 0 && tdc_report.procedure == Procedure::tdc &&
        next_decoy > band.d_max())
        throw std::logic_error("TDC list holds more decoy wins than d_max allows");
    return std::min(band.value(next_decoy) / static_cast<double>(t), 1.0);
}

}  // namespace compfdp
