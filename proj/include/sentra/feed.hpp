#pragma once

#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sentra/channels.hpp"
#include "sentra/config.hpp"
#include "sentra/types.hpp"

namespace sentra {

/**
 * @brief Source of per-asset price observations and deliberation context.
 *
 * Implementations: ReplayFeed (deterministic CSV read-through with a virtual
 * clock) and RestFeed (generic JSON-over-HTTP adapter). Both route every
 * fetch through the public channel counter.
 */
class FeedSource {
public:
    virtual ~FeedSource() = default;

    // One tick per asset with a fresh observation at `now`; assets without
    // data are omitted. Throws ReplayExhausted at end of file (replay only).
    virtual std::vector<PriceTick> poll(const std::vector<std::string>& assets, Timestamp now) = 0;

    // Context for one asset after a trigger fired: recent candles, orderbook,
    // funding rate. Throws TransportError when it cannot be built.
    virtual MarketContext market_context(const std::string& asset, Timestamp now) = 0;

    // Timestamp of the next available observation; drives the virtual clock
    // in replay mode. Empty for live feeds (wall clock) or at end of file.
    virtual std::optional<Timestamp> next_time() = 0;

    // Non-fatal errors collected during the last poll (live adapter).
    virtual std::vector<std::string> take_errors() { return {}; }

    // Fast-forwards past observations at or before `ts` (replay only); used
    // after a hot restart so already-journaled cycles are not replayed.
    virtual void skip_until(Timestamp /*ts*/) {}
};

// Deterministic file feed. Expected CSV header:
//   timestamp,asset,price,volume[,best_bid,best_ask,bid_depth,ask_depth][,funding_rate]
// Rows must be sorted by timestamp; (asset, timestamp) pairs must be unique.
class ReplayFeed : public FeedSource {
public:
    ReplayFeed(const std::string& path, ChannelCounters* counters, int context_candles = 20);

    std::vector<PriceTick> poll(const std::vector<std::string>& assets, Timestamp now) override;
    MarketContext market_context(const std::string& asset, Timestamp now) override;
    std::optional<Timestamp> next_time() override;
    void skip_until(Timestamp ts) override;

    // Last seen price per asset (used to force-close positions at session end).
    std::optional<double> last_price(const std::string& asset) const;

private:
    struct Row {
        PriceTick tick;
        std::optional<OrderbookSnapshot> book;
        std::optional<double> funding;
    };

    ChannelCounters* counters_;
    int context_candles_;
    std::vector<std::pair<Timestamp, std::vector<Row>>> groups_;
    std::size_t pos_ = 0;
    std::map<std::string, std::deque<Row>> history_;  // rows already emitted
};

// Live adapter: REST GET endpoints configured as URL templates with an
// {asset} placeholder; responses decoded via JSON pointer field mappings.
class RestFeed : public FeedSource {
public:
    RestFeed(const FeedConfig& cfg, ChannelCounters* counters);

    std::vector<PriceTick> poll(const std::vector<std::string>& assets, Timestamp now) override;
    MarketContext market_context(const std::string& asset, Timestamp now) override;
    std::optional<Timestamp> next_time() override { return std::nullopt; }
    std::vector<std::string> take_errors() override;

private:
    std::string fetch(const std::string& url_template, const std::string& asset);

    FeedConfig cfg_;
    ChannelCounters* counters_;
    std::vector<std::string> errors_;
    std::map<std::string, Timestamp> last_seen_;
};

}  // namespace sentra
