#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sentra {

using Timestamp = std::int64_t;  // epoch seconds (UTC)

enum class Mode { DryRun, Live };

inline const char* mode_name(Mode m) { return m == Mode::DryRun ? "DRY_RUN" : "LIVE"; }

struct PriceTick {
    std::string asset;
    Timestamp timestamp = 0;
    double price = 0.0;  // quote currency, > 0
    double volume = 0.0;
};

struct Candle {
    std::string asset;
    double open = 0.0;
    double high = 0.0;
    double low = 0.0;
    double close = 0.0;
    double volume = 0.0;
    int interval_s = 60;
    Timestamp timestamp = 0;
};

struct OrderbookSnapshot {
    double best_bid = 0.0;
    double best_ask = 0.0;
    double bid_depth = 0.0;  // quote-currency notional at top of book
    double ask_depth = 0.0;
    bool synthesized = false;  // true when derived from price only
};

struct MarketContext {
    std::string asset;
    std::vector<Candle> candles;  // ordered by timestamp, at most 20
    OrderbookSnapshot orderbook;
    double funding_rate = 0.0;  // per funding interval
    Timestamp snapshot_time = 0;
    bool partial = false;  // cold start (<20 candles) or synthesized fields
    std::string partial_reason;
};

enum class Signal { Long, Short, Wait };

inline const char* signal_name(Signal s) {
    switch (s) {
        case Signal::Long: return "long";
        case Signal::Short: return "short";
        default: return "wait";
    }
}

inline std::optional<Signal> signal_from_string(const std::string& s) {
    if (s == "long") return Signal::Long;
    if (s == "short") return Signal::Short;
    if (s == "wait") return Signal::Wait;
    return std::nullopt;
}

struct OrderRequest {
    std::string asset;
    Signal side = Signal::Long;
    double size_usd = 0.0;
    double entry = 0.0;
    double stop_loss = 0.0;
    double take_profit = 0.0;
    std::string client_id;
};

}  // namespace sentra
