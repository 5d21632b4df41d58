#include "sentra/report.hpp"

#include <iomanip>

#include "sentra/decimal.hpp"

namespace sentra {

namespace {

std::string pct(double v, int digits = 2) { return format_fixed(v * 100.0, digits) + "%"; }
std::string usd(double v) { return (v < 0 ? "-$" : "$") + format_fixed(std::fabs(v), 2); }

void rule(std::ostream& out, int width = 58) {
    out << std::string(width, '-') << "\n";
}

}  // namespace

void render_friction(const FrictionReport& f, std::ostream& out) {
    rule(out);
    out << "Pipeline execution summary\n";
    rule(out);
    out << std::left;
    out << std::setw(34) << "Total invocations" << f.n_total << "\n";
    out << std::setw(34) << "Analyst self-abstain" << f.n_wait << "  (" << pct(f.wait_rate, 1)
        << ")\n";
    out << std::setw(34) << "Rejected: hard gates" << f.n_gate_reject << "\n";
    out << std::setw(34) << "Rejected: contextual" << f.n_contextual_reject << "\n";
    if (f.n_aborted > 0) out << std::setw(34) << "Aborted" << f.n_aborted << "\n";
    out << std::setw(34) << "Friction" << (f.n_rejected + f.n_wait) << "  (" << pct(f.friction, 1)
        << ")\n";
    out << std::setw(34) << "Trades executed" << f.n_executed << "\n";
    rule(out);
}

void render_performance(const PerfReport& p, std::ostream& out) {
    rule(out);
    out << "Trading performance (closed trades)\n";
    rule(out);
    out << std::left;
    out << std::setw(34) << "Total trades" << p.trades << "\n";
    out << std::setw(34) << "Win rate" << pct(p.win_rate) << "  (" << p.wins << " wins)\n";
    out << std::setw(34) << "Gross profit" << usd(p.gross_profit) << "\n";
    out << std::setw(34) << "Gross loss" << usd(-p.gross_loss) << "\n";
    out << std::setw(34) << "Net PnL" << usd(p.net_pnl) << "\n";
    out << std::setw(34) << "Profit factor"
        << (p.profit_factor ? format_fixed(*p.profit_factor, 3) : std::string("n/a")) << "\n";
    out << std::setw(34) << "Max cumulative drawdown" << usd(p.max_drawdown) << "\n";
    out << std::setw(34) << "Mean win" << usd(p.mean_win) << "\n";
    out << std::setw(34) << "Mean loss" << usd(-p.mean_loss) << "\n";
    out << std::setw(34) << "Mean stop-loss" << pct(p.mean_sl_pct, 3) << "\n";
    out << std::setw(34) << "Mean take-profit" << pct(p.mean_tp_pct, 3) << "\n";
    out << std::setw(34) << "Mean risk/reward" << format_fixed(p.mean_rr, 2) << ":1\n";
    out << std::setw(34) << "Break-even win rate" << pct(p.breakeven_wr) << "\n";
    out << std::setw(34) << "Binomial p-value (WR=0.50)" << format_fixed(p.binom_p, 4) << "\n";
    out << std::setw(34) << "Total notional" << usd(p.total_notional) << "\n";
    rule(out);
}

void render_breakdown(const std::vector<ClassStats>& classes, std::ostream& out) {
    rule(out, 66);
    out << "Behavior by asset class\n";
    rule(out, 66);
    out << std::left << std::setw(14) << "Class" << std::right << std::setw(8) << "Trades"
        << std::setw(12) << "Win rate" << std::setw(12) << "Avg conf" << std::setw(14)
        << "Net PnL" << "\n";
    for (const auto& c : classes) {
        out << std::left << std::setw(14) << c.name << std::right << std::setw(8) << c.trades
            << std::setw(12) << pct(c.win_rate, 1) << std::setw(12)
            << format_fixed(c.avg_confidence, 3) << std::setw(14) << usd(c.net_pnl) << "\n";
    }
    rule(out, 66);
}

void render_cost_scenarios(const std::vector<CostScenario>& scenarios, std::ostream& out) {
    rule(out, 72);
    out << "Net PnL sensitivity to round-trip transaction costs\n";
    rule(out, 72);
    out << std::left << std::setw(30) << "Scenario" << std::right << std::setw(12) << "Round-trip"
        << std::setw(14) << "Total cost" << std::setw(16) << "Adj. net PnL" << "\n";
    for (const auto& s : scenarios) {
        out << std::left << std::setw(30) << s.name << std::right << std::setw(11)
            << pct(s.round_trip_rate) << std::setw(14) << usd(-s.total_cost) << std::setw(16)
            << usd(s.adjusted_net_pnl) << "\n";
    }
    rule(out, 72);
}

nlohmann::json friction_json(const FrictionReport& f) {
    nlohmann::json j;
    j["n_total"] = f.n_total;
    j["n_rejected"] = f.n_rejected;
    j["n_gate_reject"] = f.n_gate_reject;
    j["n_contextual_reject"] = f.n_contextual_reject;
    j["n_wait"] = f.n_wait;
    j["n_executed"] = f.n_executed;
    j["n_aborted"] = f.n_aborted;
    j["friction"] = f.friction;
    j["wait_rate"] = f.wait_rate;
    j["reject_rate"] = f.reject_rate;
    return j;
}

nlohmann::json performance_json(const PerfReport& p) {
    nlohmann::json j;
    j["trades"] = p.trades;
    j["wins"] = p.wins;
    j["win_rate"] = p.win_rate;
    j["gross_profit"] = p.gross_profit;
    j["gross_loss"] = p.gross_loss;
    j["net_pnl"] = p.net_pnl;
    if (p.profit_factor) j["profit_factor"] = *p.profit_factor;
    else j["profit_factor"] = nullptr;
    j["max_drawdown"] = p.max_drawdown;
    j["mean_win"] = p.mean_win;
    j["mean_loss"] = p.mean_loss;
    j["mean_sl_pct"] = p.mean_sl_pct;
    j["mean_tp_pct"] = p.mean_tp_pct;
    j["mean_rr"] = p.mean_rr;
    j["breakeven_wr"] = p.breakeven_wr;
    j["binom_p"] = p.binom_p;
    j["total_notional"] = p.total_notional;
    return j;
}

nlohmann::json breakdown_json(const std::vector<ClassStats>& classes) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : classes) {
        arr.push_back(nlohmann::json{{"class", c.name},
                                     {"trades", c.trades},
                                     {"win_rate", c.win_rate},
                                     {"avg_confidence", c.avg_confidence},
                                     {"net_pnl", c.net_pnl}});
    }
    return arr;
}

nlohmann::json cost_scenarios_json(const std::vector<CostScenario>& scenarios) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& s : scenarios) {
        arr.push_back(nlohmann::json{{"name", s.name},
                                     {"round_trip_rate", s.round_trip_rate},
                                     {"total_cost", s.total_cost},
                                     {"adjusted_net_pnl", s.adjusted_net_pnl}});
    }
    return arr;
}

void write_equity_csv(const EquityCurve& curve, std::ostream& out) {
    out << "trade_index,cumulative_pnl\n";
    for (const auto& p : curve.points) {
        out << p.trade_index << "," << format_fixed(p.cumulative_pnl, 8) << "\n";
    }
}

}  // namespace sentra
