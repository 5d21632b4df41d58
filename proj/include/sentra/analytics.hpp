#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sentra/journal.hpp"

namespace sentra {

struct FrictionReport {
    std::int64_t n_total = 0;
    std::int64_t n_rejected = 0;  // hard-gate + contextual rejections
    std::int64_t n_gate_reject = 0;
    std::int64_t n_contextual_reject = 0;
    std::int64_t n_wait = 0;
    std::int64_t n_executed = 0;
    std::int64_t n_aborted = 0;
    double friction = 0.0;  // (n_rejected + n_wait) / n_total
    double wait_rate = 0.0;
    double reject_rate = 0.0;
};

struct PerfReport {
    std::int64_t trades = 0;
    std::int64_t wins = 0;
    double win_rate = 0.0;
    double gross_profit = 0.0;
    double gross_loss = 0.0;  // reported as magnitude
    double net_pnl = 0.0;
    std::optional<double> profit_factor;  // absent when gross_loss is zero
    double max_drawdown = 0.0;
    double mean_win = 0.0;
    double mean_loss = 0.0;  // magnitude
    double mean_sl_pct = 0.0;
    double mean_tp_pct = 0.0;
    double mean_rr = 0.0;
    double breakeven_wr = 0.0;  // 1 / (1 + mean_rr)
    double binom_p = 1.0;
    double total_notional = 0.0;
};

struct CostScenario {
    std::string name;
    double round_trip_rate = 0.0;
    double total_cost = 0.0;
    double adjusted_net_pnl = 0.0;
};

struct TradeCostInputs {
    double quantity = 0.0;  // base-asset units
    double price = 0.0;
    double taker_fee = 0.0;
    double bid = 0.0;
    double ask = 0.0;
    double sigma = 0.0;   // 1-minute realized volatility fraction
    double volume = 0.0;  // average traded volume over the execution window
    double lambda = 0.8;  // impact coefficient
};

struct TradeCostBreakdown {
    double fee = 0.0;
    double half_spread = 0.0;
    double impact = 0.0;
    bool impact_defined = true;  // false when volume is zero
    double total = 0.0;
};

struct FundingFlow {
    double rate = 0.0;      // per interval
    double quantity = 0.0;  // position size
    double dt = 1.0;        // intervals covered
};

struct ClassStats {
    std::string name;
    std::int64_t trades = 0;
    double win_rate = 0.0;
    double avg_confidence = 0.0;
    double net_pnl = 0.0;
};

struct EquityPoint {
    int trade_index = 0;  // 1-based, ordered by close time
    double cumulative_pnl = 0.0;
};

struct EquityCurve {
    std::vector<EquityPoint> points;
    double max_drawdown = 0.0;
};

// Counts derived solely from pipeline_complete events in the journal.
FrictionReport friction(Journal& store);
FrictionReport friction_from_counts(std::int64_t n_total, std::int64_t n_gate_reject,
                                    std::int64_t n_contextual_reject, std::int64_t n_wait,
                                    std::int64_t n_executed, std::int64_t n_aborted = 0);

// Full performance statistics over closed trades; empty when there are none.
std::optional<PerfReport> performance(Journal& store);
std::optional<PerfReport> performance_from_trades(const std::vector<TradeRow>& closed);

// Exact one-tailed P(X >= wins | Binomial(n, p0)) by direct summation in the
// log domain (no normal approximation).
double binomial_edge_test(std::int64_t wins, std::int64_t n, double p0 = 0.5);
// Complement P(X <= k) used by the consistency property.
double binomial_lower_tail(std::int64_t k, std::int64_t n, double p0 = 0.5);

// Round-trip cost decomposition: exchange fee + half-spread + square-root
// market impact.
TradeCostBreakdown trade_cost(const TradeCostInputs& in);

std::vector<CostScenario> cost_sensitivity(double net_pnl, double total_notional,
                                           const std::vector<std::pair<std::string, double>>& rates);

double funding_adjusted_benchmark(double price_pnl, const std::vector<FundingFlow>& flows);

extern const std::set<std::string> kDefaultLargeCaps;

// Large caps by membership; mid caps have >= midcap_min_trades; the rest are
// long tail. Totals reconcile with performance().
std::vector<ClassStats> asset_class_breakdown(Journal& store,
                                              const std::set<std::string>& large_caps = kDefaultLargeCaps,
                                              int midcap_min_trades = 3);

EquityCurve equity_curve(Journal& store);
EquityCurve equity_curve_from_pnls(const std::vector<double>& pnls);

}  // namespace sentra
