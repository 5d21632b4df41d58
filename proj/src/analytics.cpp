#include "sentra/analytics.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "sentra/errors.hpp"

namespace sentra {

const std::set<std::string> kDefaultLargeCaps = {"BTC", "ETH", "SOL", "AVAX",
                                                 "DOGE", "ADA", "XRP", "DOT"};

FrictionReport friction_from_counts(std::int64_t n_total, std::int64_t n_gate_reject,
                                    std::int64_t n_contextual_reject, std::int64_t n_wait,
                                    std::int64_t n_executed, std::int64_t n_aborted) {
    FrictionReport f;
    f.n_total = n_total;
    f.n_gate_reject = n_gate_reject;
    f.n_contextual_reject = n_contextual_reject;
    f.n_rejected = n_gate_reject + n_contextual_reject;
    f.n_wait = n_wait;
    f.n_executed = n_executed;
    f.n_aborted = n_aborted;
    if (n_total > 0) {
        f.friction = static_cast<double>(f.n_rejected + f.n_wait) / static_cast<double>(n_total);
        f.wait_rate = static_cast<double>(f.n_wait) / static_cast<double>(n_total);
        f.reject_rate = static_cast<double>(f.n_rejected) / static_cast<double>(n_total);
    }
    return f;
}

FrictionReport friction(Journal& store) {
    std::int64_t gate = 0, contextual = 0, wait = 0, executed = 0, aborted = 0, total = 0;
    for (const auto& row : store.log_rows()) {
        if (row.kind != event::kPipelineComplete) continue;
        ++total;
        std::string stage;
        try {
            const auto j = nlohmann::json::parse(row.payload);
            stage = j.value("stage_reached", "");
        } catch (const nlohmann::json::exception&) {
            stage.clear();
        }
        if (stage == "analyst_wait") ++wait;
        else if (stage == "gate_reject") ++gate;
        else if (stage == "contextual_reject") ++contextual;
        else if (stage == "executed") ++executed;
        else ++aborted;
    }
    return friction_from_counts(total, gate, contextual, wait, executed, aborted);
}

std::optional<PerfReport> performance_from_trades(const std::vector<TradeRow>& closed_in) {
    std::vector<TradeRow> closed;
    for (const auto& t : closed_in)
        if (t.closed_at && t.pnl_usd) closed.push_back(t);
    if (closed.empty()) return std::nullopt;

    std::sort(closed.begin(), closed.end(), [](const TradeRow& a, const TradeRow& b) {
        if (*a.closed_at != *b.closed_at) return *a.closed_at < *b.closed_at;
        return a.id < b.id;
    });

    PerfReport r;
    r.trades = static_cast<std::int64_t>(closed.size());
    double sl_pct_sum = 0.0, tp_pct_sum = 0.0;
    std::vector<double> pnls;
    pnls.reserve(closed.size());
    for (const auto& t : closed) {
        const double pnl = *t.pnl_usd;
        pnls.push_back(pnl);
        if (pnl > 0.0) {
            ++r.wins;
            r.gross_profit += pnl;
        } else {
            r.gross_loss += -pnl;
        }
        r.total_notional += t.size_usd;
        if (t.entry > 0.0) {
            sl_pct_sum += std::fabs(t.entry - t.stop_loss) / t.entry;
            tp_pct_sum += std::fabs(t.take_profit - t.entry) / t.entry;
        }
    }
    r.net_pnl = r.gross_profit - r.gross_loss;
    r.win_rate = static_cast<double>(r.wins) / static_cast<double>(r.trades);
    if (r.gross_loss > 0.0) r.profit_factor = r.gross_profit / r.gross_loss;
    const std::int64_t losses = r.trades - r.wins;
    if (r.wins > 0) r.mean_win = r.gross_profit / static_cast<double>(r.wins);
    if (losses > 0) r.mean_loss = r.gross_loss / static_cast<double>(losses);
    r.mean_sl_pct = sl_pct_sum / static_cast<double>(r.trades);
    r.mean_tp_pct = tp_pct_sum / static_cast<double>(r.trades);
    if (r.mean_sl_pct > 0.0) r.mean_rr = r.mean_tp_pct / r.mean_sl_pct;
    if (r.mean_rr > 0.0) r.breakeven_wr = 1.0 / (1.0 + r.mean_rr);
    r.max_drawdown = equity_curve_from_pnls(pnls).max_drawdown;
    r.binom_p = binomial_edge_test(r.wins, r.trades, 0.5);
    return r;
}

std::optional<PerfReport> performance(Journal& store) {
    return performance_from_trades(store.trades());
}

namespace {

// log C(n, k) + k log p + (n-k) log q, evaluated in long double.
long double log_binom_term(std::int64_t n, std::int64_t k, long double log_p, long double log_q) {
    const long double lc = std::lgamma(static_cast<long double>(n) + 1) -
                           std::lgamma(static_cast<long double>(k) + 1) -
                           std::lgamma(static_cast<long double>(n - k) + 1);
    return lc + static_cast<long double>(k) * log_p + static_cast<long double>(n - k) * log_q;
}

double binom_sum(std::int64_t from, std::int64_t to, std::int64_t n, double p0) {
    if (from > to) return 0.0;
    const long double log_p = std::log(static_cast<long double>(p0));
    const long double log_q = std::log1p(static_cast<long double>(-p0));
    long double acc = 0.0L;
    for (std::int64_t k = from; k <= to; ++k) {
        long double term;
        if (p0 == 0.0) term = (k == 0) ? 1.0L : 0.0L;
        else if (p0 == 1.0) term = (k == n) ? 1.0L : 0.0L;
        else term = std::exp(log_binom_term(n, k, log_p, log_q));
        acc += term;
    }
    if (acc > 1.0L) acc = 1.0L;
    if (acc < 0.0L) acc = 0.0L;
    return static_cast<double>(acc);
}

}  // namespace

double binomial_edge_test(std::int64_t wins, std::int64_t n, double p0) {
    if (n < 1 || wins < 0 || wins > n) throw ConfigError("binomial_edge_test: bad arguments");
    if (wins == 0) return 1.0;
    return binom_sum(wins, n, n, p0);
}

double binomial_lower_tail(std::int64_t k, std::int64_t n, double p0) {
    if (n < 1 || k < 0) return 0.0;
    if (k >= n) return 1.0;
    return binom_sum(0, k, n, p0);
}

TradeCostBreakdown trade_cost(const TradeCostInputs& in) {
    TradeCostBreakdown out;
    out.fee = in.quantity * in.price * in.taker_fee;
    out.half_spread = 0.5 * in.quantity * std::fabs(in.ask - in.bid);
    if (in.volume > 0.0) {
        out.impact = in.lambda * in.sigma * std::sqrt(in.quantity / in.volume) * in.price;
    } else {
        // A zero-volume window would make the impact term infinite; it is
        // omitted and flagged instead.
        out.impact = 0.0;
        out.impact_defined = false;
    }
    out.total = out.fee + out.half_spread + out.impact;
    return out;
}

std::vector<CostScenario> cost_sensitivity(
    double net_pnl, double total_notional,
    const std::vector<std::pair<std::string, double>>& rates) {
    std::vector<CostScenario> out;
    out.reserve(rates.size());
    for (const auto& [name, rate] : rates) {
        CostScenario s;
        s.name = name;
        s.round_trip_rate = rate;
        s.total_cost = total_notional * rate;
        s.adjusted_net_pnl = net_pnl - s.total_cost;
        out.push_back(std::move(s));
    }
    return out;
}

double funding_adjusted_benchmark(double price_pnl, const std::vector<FundingFlow>& flows) {
    double adj = price_pnl;
    for (const auto& f : flows) adj += f.rate * f.quantity * f.dt;
    return adj;
}

std::vector<ClassStats> asset_class_breakdown(Journal& store,
                                              const std::set<std::string>& large_caps,
                                              int midcap_min_trades) {
    std::map<std::string, std::vector<const TradeRow*>> by_asset;
    auto all = store.trades();
    std::vector<TradeRow> closed;
    for (const auto& t : all)
        if (t.closed_at && t.pnl_usd) closed.push_back(t);
    for (const auto& t : closed) by_asset[t.asset].push_back(&t);

    ClassStats large{"large_caps"}, mid{"mid_caps"}, tail{"long_tail"};
    auto add = [](ClassStats& c, const std::vector<const TradeRow*>& trades) {
        for (const auto* t : trades) {
            c.trades += 1;
            if (*t->pnl_usd > 0.0) c.win_rate += 1.0;  // accumulate wins, normalize below
            c.avg_confidence += t->confidence;
            c.net_pnl += *t->pnl_usd;
        }
    };
    for (const auto& [asset, trades] : by_asset) {
        if (large_caps.count(asset)) add(large, trades);
        else if (static_cast<int>(trades.size()) >= midcap_min_trades) add(mid, trades);
        else add(tail, trades);
    }
    for (ClassStats* c : {&large, &mid, &tail}) {
        if (c->trades > 0) {
            c->win_rate /= static_cast<double>(c->trades);
            c->avg_confidence /= static_cast<double>(c->trades);
        }
    }
    return {large, mid, tail};
}

EquityCurve equity_curve_from_pnls(const std::vector<double>& pnls) {
    EquityCurve out;
    double cum = 0.0, peak = 0.0, dd = 0.0;
    int idx = 0;
    for (double p : pnls) {
        cum += p;
        if (cum > peak) peak = cum;
        dd = std::max(dd, peak - cum);
        out.points.push_back({++idx, cum});
    }
    out.max_drawdown = dd;
    return out;
}

EquityCurve equity_curve(Journal& store) {
    auto all = store.trades();
    std::vector<TradeRow> closed;
    for (const auto& t : all)
        if (t.closed_at && t.pnl_usd) closed.push_back(t);
    std::sort(closed.begin(), closed.end(), [](const TradeRow& a, const TradeRow& b) {
        if (*a.closed_at != *b.closed_at) return *a.closed_at < *b.closed_at;
        return a.id < b.id;
    });
    std::vector<double> pnls;
    pnls.reserve(closed.size());
    for (const auto& t : closed) pnls.push_back(*t.pnl_usd);
    return equity_curve_from_pnls(pnls);
}

}  // namespace sentra
