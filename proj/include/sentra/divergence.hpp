#pragma once

#include <optional>
#include <span>
#include <vector>

#include "sentra/config.hpp"

namespace sentra {

struct CorrelationBreak {
    double rho_cb = 0.0;     // 1 - |pearson|, in [0, 1]
    bool degenerate = false; // a constant series offers no decorrelation evidence
};

struct DivergenceScore {
    double rho_cb = 0.0;
    double z_norm = 0.0;  // in [0, 1)
    double omega = 0.0;
    bool degenerate = false;
    bool partial = false;  // reference window missing or too short
};

// Pearson correlation of two equal-length series; empty when either series
// is constant (correlation undefined).
std::optional<double> pearson(std::span<const double> a, std::span<const double> b);

// Decorrelation from the reference series: 1 - |rho|. A degenerate series
// yields rho_cb = 0 (no diversification bonus).
CorrelationBreak correlation_break(std::span<const double> prices_asset,
                                   std::span<const double> prices_ref);

// Exponential saturation of the anomaly magnitude above the trigger
// threshold; 0 below it, asymptotically approaching 1.
double saturate_z(double z, double kappa, double z_threshold);

// Convex blend of the saturated anomaly and the decorrelation term.
double composite_omega(double z_norm, double rho_cb, double alpha);

// Full score for one asset. `z` may be absent (score falls back to the
// decorrelation term alone with z_norm = 0). Series shorter than 2 or a
// missing reference window set `partial` and contribute rho_cb = 0.
DivergenceScore score_divergence(std::optional<double> z, std::span<const double> prices_asset,
                                 std::span<const double> prices_ref,
                                 const DivergenceConfig& cfg);

// Log-return transform used when correlation_on_returns is set.
std::vector<double> to_returns(std::span<const double> prices);

}  // namespace sentra
