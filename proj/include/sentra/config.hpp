#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sentra/types.hpp"

namespace sentra {

struct TriggerConfig {
    double z_threshold = 2.0;     // anomaly gate, in baseline sigmas
    double return_floor = 0.003;  // absolute-return safety net
    int window = 30;              // rolling baseline capacity
    int min_warmup = 10;          // samples required before z is defined
    double std_epsilon = 1e-12;   // below this the z-score is undefined
};

struct DivergenceConfig {
    double kappa = 0.5;
    double alpha = 0.5;  // weight of the saturated anomaly term
    double z_threshold = 2.0;
    std::string reference_asset = "BTC";
    bool correlation_on_returns = false;  // default: raw price windows
    int window = 30;
};

struct RiskConfig {
    double confidence_gate = 0.60;
    double max_risk_pct = 0.02;  // |entry - stop| / entry ceiling
    double max_size_usd = 500.0;
};

struct GateConfig {
    std::int64_t cooldown_s = 1800;  // release-to-admit spacing
    std::int64_t watchdog_s = 300;   // force-release ceiling for a stuck holder
};

struct BackendConfig {
    enum class Kind { SeededMock, Remote };
    enum class Api { OpenAi, Ollama };
    Kind kind = Kind::SeededMock;
    Api api = Api::Ollama;
    std::string endpoint;  // e.g. http://127.0.0.1:11434
    std::string model = "qwen3.5:9b";
    int timeout_s = 120;
    std::uint64_t seed = 42;
    std::string mock_profile = "honest";  // honest | adversarial
};

struct FeedConfig {
    enum class Kind { Replay, Rest };
    Kind kind = Kind::Replay;
    std::string replay_path;
    int poll_interval_s = 60;
    // Live adapter: URL templates with {asset} placeholder and JSON pointer
    // field mappings ("/price" style; bare integers index into arrays).
    std::string price_url;
    std::string price_field = "/price";
    std::string candles_url;
    std::string candles_field = "";  // pointer to the candle array, "" = root
    std::string candle_open = "1", candle_high = "2", candle_low = "3",
                candle_close = "4", candle_volume = "5", candle_time = "0";
    std::string orderbook_url;
    std::string bid_field = "/bid", ask_field = "/ask";
    std::string bid_depth_field = "", ask_depth_field = "";
    std::string funding_url;
    std::string funding_field = "/funding_rate";
    int timeout_s = 10;
};

struct ChannelSettings {
    Mode mode = Mode::DryRun;
    std::string public_endpoint;
    std::string private_endpoint;
    std::string private_proxy;  // empty = none configured
    std::string health_url;     // exchange reachability probe target
    int safety_ttl_s = 10;
};

struct SessionConfig {
    // Operating defaults; all tunable via config file or CLI.
    int polling_interval_s = 60;
    TriggerConfig trigger;
    DivergenceConfig divergence;
    RiskConfig risk;
    GateConfig gate;
    std::int64_t asset_cooldown_s = 300;
    int memory_briefing_k = 5;
    int context_candles = 20;

    std::vector<std::string> assets;  // empty = every asset the feed offers
    FeedConfig feed;
    BackendConfig backend;
    ChannelSettings channel;
    std::string journal_path = "sentra.db";
    std::uint64_t seed = 42;
};

}  // namespace sentra
