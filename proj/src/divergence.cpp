#include "sentra/divergence.hpp"

#include <cmath>

namespace sentra {

std::optional<double> pearson(std::span<const double> a, std::span<const double> b) {
    const std::size_t n = std::min(a.size(), b.size());
    if (n < 2) return std::nullopt;
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double da = a[i] - ma;
        const double db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa <= 0.0 || sbb <= 0.0) return std::nullopt;
    double rho = sab / std::sqrt(saa * sbb);
    if (rho > 1.0) rho = 1.0;
    if (rho < -1.0) rho = -1.0;
    return rho;
}

CorrelationBreak correlation_break(std::span<const double> prices_asset,
                                   std::span<const double> prices_ref) {
    auto rho = pearson(prices_asset, prices_ref);
    if (!rho) return {0.0, true};
    return {1.0 - std::fabs(*rho), false};
}

double saturate_z(double z, double kappa, double z_threshold) {
    const double mag = std::fabs(z);
    if (mag < z_threshold) return 0.0;
    return 1.0 - std::exp(-kappa * (mag - z_threshold));
}

double composite_omega(double z_norm, double rho_cb, double alpha) {
    return alpha * z_norm + (1.0 - alpha) * rho_cb;
}

std::vector<double> to_returns(std::span<const double> prices) {
    std::vector<double> out;
    if (prices.size() < 2) return out;
    out.reserve(prices.size() - 1);
    for (std::size_t i = 1; i < prices.size(); ++i) {
        out.push_back(prices[i] / prices[i - 1] - 1.0);
    }
    return out;
}

DivergenceScore score_divergence(std::optional<double> z, std::span<const double> prices_asset,
                                 std::span<const double> prices_ref,
                                 const DivergenceConfig& cfg) {
    DivergenceScore s;
    const std::size_t n = std::min(prices_asset.size(), prices_ref.size());
    if (n < 2) {
        s.partial = true;
    } else {
        std::span<const double> a = prices_asset.subspan(prices_asset.size() - n, n);
        std::span<const double> b = prices_ref.subspan(prices_ref.size() - n, n);
        CorrelationBreak cb;
        if (cfg.correlation_on_returns) {
            const auto ra = to_returns(a);
            const auto rb = to_returns(b);
            cb = correlation_break(ra, rb);
        } else {
            cb = correlation_break(a, b);
        }
        s.rho_cb = cb.rho_cb;
        s.degenerate = cb.degenerate;
        if (prices_ref.size() < prices_asset.size()) s.partial = true;
    }
    if (z) s.z_norm = saturate_z(*z, cfg.kappa, cfg.z_threshold);
    s.omega = composite_omega(s.z_norm, s.rho_cb, cfg.alpha);
    return s;
}

}  // namespace sentra
