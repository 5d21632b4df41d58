#pragma once

#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

#include "sentra/analytics.hpp"

namespace sentra {

// Terminal tables for the session reports.
void render_friction(const FrictionReport& f, std::ostream& out);
void render_performance(const PerfReport& p, std::ostream& out);
void render_breakdown(const std::vector<ClassStats>& classes, std::ostream& out);
void render_cost_scenarios(const std::vector<CostScenario>& scenarios, std::ostream& out);

// Machine-readable forms.
nlohmann::json friction_json(const FrictionReport& f);
nlohmann::json performance_json(const PerfReport& p);
nlohmann::json breakdown_json(const std::vector<ClassStats>& classes);
nlohmann::json cost_scenarios_json(const std::vector<CostScenario>& scenarios);

// Equity curve as CSV: trade_index,cumulative_pnl.
void write_equity_csv(const EquityCurve& curve, std::ostream& out);

}  // namespace sentra
