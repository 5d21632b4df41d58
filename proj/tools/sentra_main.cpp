#include <atomic>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "sentra/analytics.hpp"
#include "sentra/errors.hpp"
#include "sentra/journal.hpp"
#include "sentra/report.hpp"
#include "sentra/session.hpp"

namespace {

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop.store(true); }

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitStorage = 3;
constexpr int kExitTransport = 4;

struct RunOptions {
    sentra::SessionConfig cfg;
    std::string feed_kind = "replay";
    std::string backend_kind = "mock";
    std::string backend_api = "ollama";
    std::string mode = "DRY_RUN";
    std::string correlation_on = "prices";
};

void add_run_options(CLI::App* cmd, RunOptions& o) {
    auto& cfg = o.cfg;
    cmd->set_config("--config", "", "Configuration file (key = value)");

    cmd->add_option("--journal", cfg.journal_path, "Journal database path")
        ->envname("SENTRA_JOURNAL")
        ->capture_default_str();
    cmd->add_option("--seed", cfg.seed, "Master seed for the deterministic backend")
        ->envname("SENTRA_SEED")
        ->capture_default_str();
    cmd->add_option("--mode", o.mode, "DRY_RUN or LIVE")->capture_default_str();
    cmd->add_option("--assets", cfg.assets, "Assets to monitor (default: all in the feed)")
        ->delimiter(',');
    cmd->add_option("--polling-interval", cfg.polling_interval_s, "Polling interval, seconds")
        ->capture_default_str();
    cmd->add_option("--asset-cooldown", cfg.asset_cooldown_s, "Per-asset cooldown, seconds")
        ->capture_default_str();
    cmd->add_option("--memory-k", cfg.memory_briefing_k, "Past trades in the memory briefing")
        ->capture_default_str();

    cmd->add_option("--trigger.z-threshold", cfg.trigger.z_threshold)->capture_default_str();
    cmd->add_option("--trigger.return-floor", cfg.trigger.return_floor)->capture_default_str();
    cmd->add_option("--trigger.window", cfg.trigger.window)->capture_default_str();
    cmd->add_option("--trigger.min-warmup", cfg.trigger.min_warmup)->capture_default_str();

    cmd->add_option("--divergence.kappa", cfg.divergence.kappa)->capture_default_str();
    cmd->add_option("--divergence.alpha", cfg.divergence.alpha)->capture_default_str();
    cmd->add_option("--divergence.reference-asset", cfg.divergence.reference_asset)
        ->capture_default_str();
    cmd->add_option("--divergence.correlation-on", o.correlation_on, "prices or returns")
        ->capture_default_str();

    cmd->add_option("--risk.confidence-gate", cfg.risk.confidence_gate)->capture_default_str();
    cmd->add_option("--risk.max-risk-pct", cfg.risk.max_risk_pct)->capture_default_str();
    cmd->add_option("--risk.max-size-usd", cfg.risk.max_size_usd)->capture_default_str();

    cmd->add_option("--gate.cooldown", cfg.gate.cooldown_s, "Inter-pipeline cooldown, seconds")
        ->capture_default_str();
    cmd->add_option("--gate.watchdog", cfg.gate.watchdog_s, "Force-release ceiling, seconds")
        ->capture_default_str();

    cmd->add_option("--feed.kind", o.feed_kind, "replay or rest")->capture_default_str();
    cmd->add_option("--replay", cfg.feed.replay_path, "Replay CSV (implies --feed.kind replay)");
    cmd->add_option("--feed.price-url", cfg.feed.price_url)->envname("SENTRA_PRICE_URL");
    cmd->add_option("--feed.price-field", cfg.feed.price_field)->capture_default_str();
    cmd->add_option("--feed.candles-url", cfg.feed.candles_url);
    cmd->add_option("--feed.candles-field", cfg.feed.candles_field);
    cmd->add_option("--feed.orderbook-url", cfg.feed.orderbook_url);
    cmd->add_option("--feed.bid-field", cfg.feed.bid_field)->capture_default_str();
    cmd->add_option("--feed.ask-field", cfg.feed.ask_field)->capture_default_str();
    cmd->add_option("--feed.funding-url", cfg.feed.funding_url);
    cmd->add_option("--feed.funding-field", cfg.feed.funding_field)->capture_default_str();
    cmd->add_option("--feed.timeout", cfg.feed.timeout_s)->capture_default_str();

    cmd->add_option("--backend.kind", o.backend_kind, "mock or remote")->capture_default_str();
    cmd->add_option("--backend.api", o.backend_api, "openai or ollama")->capture_default_str();
    cmd->add_option("--backend.endpoint", cfg.backend.endpoint)->envname("SENTRA_BACKEND_URL");
    cmd->add_option("--backend.model", cfg.backend.model)->capture_default_str();
    cmd->add_option("--backend.timeout", cfg.backend.timeout_s)->capture_default_str();
    cmd->add_option("--backend.mock-profile", cfg.backend.mock_profile, "honest or adversarial")
        ->capture_default_str();

    cmd->add_option("--channel.public-endpoint", cfg.channel.public_endpoint);
    cmd->add_option("--channel.private-endpoint", cfg.channel.private_endpoint);
    cmd->add_option("--channel.private-proxy", cfg.channel.private_proxy);
    cmd->add_option("--channel.health-url", cfg.channel.health_url);
    cmd->add_option("--channel.safety-ttl", cfg.channel.safety_ttl_s)->capture_default_str();
}

int finalize_and_run(RunOptions& o) {
    auto& cfg = o.cfg;
    if (o.mode == "LIVE") cfg.channel.mode = sentra::Mode::Live;
    else if (o.mode == "DRY_RUN") cfg.channel.mode = sentra::Mode::DryRun;
    else {
        std::cerr << "error: --mode must be DRY_RUN or LIVE\n";
        return kExitUsage;
    }
    cfg.divergence.correlation_on_returns = (o.correlation_on == "returns");
    cfg.divergence.z_threshold = cfg.trigger.z_threshold;
    cfg.divergence.window = cfg.trigger.window;
    if (!cfg.feed.replay_path.empty()) o.feed_kind = "replay";
    cfg.feed.kind = o.feed_kind == "rest" ? sentra::FeedConfig::Kind::Rest
                                          : sentra::FeedConfig::Kind::Replay;
    if (cfg.feed.kind == sentra::FeedConfig::Kind::Replay && cfg.feed.replay_path.empty()) {
        std::cerr << "error: replay mode requires --replay FILE\n";
        return kExitUsage;
    }
    cfg.backend.kind = o.backend_kind == "remote" ? sentra::BackendConfig::Kind::Remote
                                                  : sentra::BackendConfig::Kind::SeededMock;
    cfg.backend.api = o.backend_api == "openai" ? sentra::BackendConfig::Api::OpenAi
                                                : sentra::BackendConfig::Api::Ollama;
    cfg.feed.poll_interval_s = cfg.polling_interval_s;

    try {
        sentra::Journal journal(cfg.journal_path);
        auto deps = sentra::make_default_deps(cfg);
        sentra::Session session(cfg, journal, std::move(deps));
        std::signal(SIGINT, on_signal);
        std::signal(SIGTERM, on_signal);
        return session.run(&g_stop);
    } catch (const sentra::StorageError& e) {
        std::cerr << "storage error: " << e.what() << "\n";
        return kExitStorage;
    } catch (const sentra::TransportError& e) {
        std::cerr << "transport error: " << e.what() << "\n";
        return kExitTransport;
    } catch (const sentra::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    }
}

int require_journal(const std::string& path) {
    if (!std::filesystem::exists(path)) {
        std::cerr << "error: journal not found: " << path << "\n";
        return kExitUsage;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Anomaly-gated deliberative trading engine"};
    app.require_subcommand(1);

    RunOptions run_opts;
    auto* cmd_run = app.add_subcommand("run", "Run a trading session (live or replay feed)");
    add_run_options(cmd_run, run_opts);

    RunOptions replay_opts;
    auto* cmd_replay = app.add_subcommand("replay", "Run a deterministic replay session");
    add_run_options(cmd_replay, replay_opts);
    std::string replay_file;
    cmd_replay->add_option("file", replay_file, "Replay CSV file");

    std::string report_journal, equity_csv;
    bool report_json = false;
    auto* cmd_report = app.add_subcommand("report", "Render session reports from a journal");
    cmd_report->add_option("--journal", report_journal, "Journal database path")->required();
    cmd_report->add_flag("--json", report_json, "Machine-readable JSON output");
    cmd_report->add_option("--equity-csv", equity_csv, "Write the equity curve as CSV");

    std::string cost_journal;
    std::vector<double> cost_rates;
    double cost_net = 0.0, cost_notional = 0.0;
    bool have_net = false, have_notional = false;
    auto* cmd_cost = app.add_subcommand("cost-sensitivity",
                                        "Net PnL under round-trip transaction cost scenarios");
    cmd_cost->add_option("--journal", cost_journal, "Journal database path")->required();
    cmd_cost->add_option("--rates", cost_rates, "Round-trip rates (fractions)")->delimiter(',');
    cmd_cost->add_option("--net", cost_net, "Override net PnL (USD)");
    cmd_cost->add_option("--notional", cost_notional, "Override total notional (USD)");

    std::string dump_journal, dump_out;
    auto* cmd_dump = app.add_subcommand("dump", "Canonical NDJSON session dump");
    cmd_dump->add_option("--journal", dump_journal, "Journal database path")->required();
    cmd_dump->add_option("--out", dump_out, "Output path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (app.got_subcommand(cmd_run)) return finalize_and_run(run_opts);

        if (app.got_subcommand(cmd_replay)) {
            if (!replay_file.empty()) replay_opts.cfg.feed.replay_path = replay_file;
            replay_opts.feed_kind = "replay";
            return finalize_and_run(replay_opts);
        }

        if (app.got_subcommand(cmd_report)) {
            if (int rc = require_journal(report_journal)) return rc;
            sentra::Journal journal(report_journal);
            auto friction_report = sentra::friction(journal);
            auto perf = sentra::performance(journal);
            auto classes = sentra::asset_class_breakdown(journal);
            if (report_json) {
                nlohmann::json j;
                j["friction"] = sentra::friction_json(friction_report);
                j["performance"] = perf ? sentra::performance_json(*perf) : nlohmann::json(nullptr);
                j["asset_classes"] = sentra::breakdown_json(classes);
                std::cout << j.dump(2) << "\n";
            } else {
                sentra::render_friction(friction_report, std::cout);
                if (perf) {
                    sentra::render_performance(*perf, std::cout);
                    sentra::render_breakdown(classes, std::cout);
                } else {
                    std::cout << "No closed trades in this journal.\n";
                }
            }
            if (!equity_csv.empty()) {
                std::ofstream out(equity_csv);
                if (!out) {
                    std::cerr << "error: cannot write " << equity_csv << "\n";
                    return kExitStorage;
                }
                sentra::write_equity_csv(sentra::equity_curve(journal), out);
            }
            return kExitOk;
        }

        if (app.got_subcommand(cmd_cost)) {
            if (int rc = require_journal(cost_journal)) return rc;
            sentra::Journal journal(cost_journal);
            have_net = cmd_cost->count("--net") > 0;
            have_notional = cmd_cost->count("--notional") > 0;
            double net = cost_net, notional = cost_notional;
            if (!have_net || !have_notional) {
                auto perf = sentra::performance(journal);
                if (!perf) {
                    std::cerr << "error: no closed trades and no --net/--notional overrides\n";
                    return kExitUsage;
                }
                if (!have_net) net = perf->net_pnl;
                if (!have_notional) notional = perf->total_notional;
            }
            std::vector<std::pair<std::string, double>> rates;
            if (cost_rates.empty()) {
                rates = {{"Zero cost (dry-run baseline)", 0.0},
                         {"Conservative (maker only)", 0.0004},
                         {"Realistic (taker + spread)", 0.001},
                         {"Adverse (illiquid long tail)", 0.002}};
            } else {
                for (double r : cost_rates) rates.emplace_back("Custom", r);
            }
            sentra::render_cost_scenarios(sentra::cost_sensitivity(net, notional, rates),
                                          std::cout);
            return kExitOk;
        }

        if (app.got_subcommand(cmd_dump)) {
            if (int rc = require_journal(dump_journal)) return rc;
            sentra::Journal journal(dump_journal);
            if (dump_out.empty()) {
                journal.export_session(std::cout);
            } else {
                std::ofstream out(dump_out, std::ios::binary);
                if (!out) {
                    std::cerr << "error: cannot write " << dump_out << "\n";
                    return kExitStorage;
                }
                journal.export_session(out);
            }
            return kExitOk;
        }
    } catch (const sentra::StorageError& e) {
        std::cerr << "storage error: " << e.what() << "\n";
        return kExitStorage;
    } catch (const sentra::TransportError& e) {
        std::cerr << "transport error: " << e.what() << "\n";
        return kExitTransport;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
