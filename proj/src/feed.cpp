#include "sentra/feed.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "sentra/errors.hpp"

namespace sentra {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

double parse_double(const std::string& s, const std::string& what) {
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("replay: bad numeric field '" + s + "' for " + what);
    }
}

}  // namespace

ReplayFeed::ReplayFeed(const std::string& path, ChannelCounters* counters, int context_candles)
    : counters_(counters), context_candles_(context_candles) {
    std::ifstream in(path);
    if (!in) throw ConfigError("replay file not readable: " + path);

    std::string line;
    if (!std::getline(in, line)) throw ConfigError("replay file is empty (no header): " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto header = split_csv(line);
    std::map<std::string, int> col;
    for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = static_cast<int>(i);
    for (const char* required : {"timestamp", "asset", "price"}) {
        if (!col.count(required))
            throw ConfigError(std::string("replay header missing column '") + required + "'");
    }
    auto get = [&](const std::vector<std::string>& f, const char* name) -> std::optional<std::string> {
        auto it = col.find(name);
        if (it == col.end() || it->second >= static_cast<int>(f.size())) return std::nullopt;
        if (f[it->second].empty()) return std::nullopt;
        return f[it->second];
    };

    std::set<std::pair<std::string, Timestamp>> seen;
    Timestamp prev_ts = -1;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto f = split_csv(line);
        Row row;
        row.tick.timestamp =
            static_cast<Timestamp>(parse_double(*get(f, "timestamp"), "timestamp"));
        row.tick.asset = *get(f, "asset");
        row.tick.price = parse_double(*get(f, "price"), "price");
        if (auto v = get(f, "volume")) row.tick.volume = parse_double(*v, "volume");
        if (row.tick.price <= 0.0)
            throw ConfigError("replay line " + std::to_string(line_no) + ": price must be > 0");
        if (row.tick.timestamp < prev_ts)
            throw ConfigError("replay line " + std::to_string(line_no) +
                              ": timestamps must be non-decreasing");
        if (!seen.insert({row.tick.asset, row.tick.timestamp}).second)
            throw ConfigError("replay line " + std::to_string(line_no) + ": duplicate (" +
                              row.tick.asset + ", " + std::to_string(row.tick.timestamp) + ")");
        auto bid = get(f, "best_bid");
        auto ask = get(f, "best_ask");
        if (bid && ask) {
            OrderbookSnapshot book;
            book.best_bid = parse_double(*bid, "best_bid");
            book.best_ask = parse_double(*ask, "best_ask");
            if (auto v = get(f, "bid_depth")) book.bid_depth = parse_double(*v, "bid_depth");
            if (auto v = get(f, "ask_depth")) book.ask_depth = parse_double(*v, "ask_depth");
            if (book.best_bid <= 0.0 || book.best_ask < book.best_bid)
                throw ConfigError("replay line " + std::to_string(line_no) +
                                  ": orderbook must satisfy ask >= bid > 0");
            row.book = book;
        }
        if (auto v = get(f, "funding_rate")) row.funding = parse_double(*v, "funding_rate");

        if (groups_.empty() || groups_.back().first != row.tick.timestamp) {
            groups_.emplace_back(row.tick.timestamp, std::vector<Row>{});
        }
        groups_.back().second.push_back(std::move(row));
        prev_ts = groups_.back().first;
    }
}

std::optional<Timestamp> ReplayFeed::next_time() {
    if (pos_ >= groups_.size()) return std::nullopt;
    return groups_[pos_].first;
}

void ReplayFeed::skip_until(Timestamp ts) {
    // Consumed rows still feed the candle cache, mirroring a live adapter
    // that refetches recent candles after a restart.
    while (pos_ < groups_.size() && groups_[pos_].first <= ts) {
        for (const auto& row : groups_[pos_].second) {
            auto& h = history_[row.tick.asset];
            h.push_back(row);
            while (static_cast<int>(h.size()) > context_candles_) h.pop_front();
        }
        ++pos_;
    }
}

std::vector<PriceTick> ReplayFeed::poll(const std::vector<std::string>& assets, Timestamp) {
    if (pos_ >= groups_.size()) throw ReplayExhausted();
    if (counters_) counters_->public_calls.fetch_add(1);
    const auto& group = groups_[pos_++];
    std::vector<PriceTick> out;
    for (const auto& row : group.second) {
        if (!assets.empty() &&
            std::find(assets.begin(), assets.end(), row.tick.asset) == assets.end())
            continue;
        out.push_back(row.tick);
        auto& h = history_[row.tick.asset];
        h.push_back(row);
        while (static_cast<int>(h.size()) > context_candles_) h.pop_front();
    }
    return out;
}

MarketContext ReplayFeed::market_context(const std::string& asset, Timestamp now) {
    if (counters_) counters_->public_calls.fetch_add(1);
    auto it = history_.find(asset);
    if (it == history_.end() || it->second.empty())
        throw TransportError("no replay history for asset " + asset);
    const auto& h = it->second;

    MarketContext ctx;
    ctx.asset = asset;
    ctx.snapshot_time = now;
    for (const auto& row : h) {
        Candle c;
        c.asset = asset;
        c.open = c.high = c.low = c.close = row.tick.price;
        c.volume = row.tick.volume;
        c.timestamp = row.tick.timestamp;
        ctx.candles.push_back(c);
    }
    if (static_cast<int>(ctx.candles.size()) < context_candles_) {
        ctx.partial = true;
        ctx.partial_reason = "cold_start";
    }
    const Row& last = h.back();
    if (last.book) {
        ctx.orderbook = *last.book;
    } else {
        // Price-only fixture: degenerate book at the last price, zero depth.
        ctx.orderbook.best_bid = ctx.orderbook.best_ask = last.tick.price;
        ctx.orderbook.bid_depth = ctx.orderbook.ask_depth = 0.0;
        ctx.orderbook.synthesized = true;
        ctx.partial = true;
        if (ctx.partial_reason.empty()) ctx.partial_reason = "synthesized_orderbook";
    }
    ctx.funding_rate = last.funding.value_or(0.0);
    return ctx;
}

std::optional<double> ReplayFeed::last_price(const std::string& asset) const {
    auto it = history_.find(asset);
    if (it == history_.end() || it->second.empty()) return std::nullopt;
    return it->second.back().tick.price;
}

// ---------------------------------------------------------------------------

namespace {

std::string expand_template(const std::string& tmpl, const std::string& asset) {
    std::string out = tmpl;
    const std::string key = "{asset}";
    for (std::size_t at = out.find(key); at != std::string::npos; at = out.find(key)) {
        out.replace(at, key.size(), asset);
    }
    return out;
}

// Splits "http://host:port/path" into (origin, path).
std::pair<std::string, std::string> split_url(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw ConfigError("feed URL missing scheme: " + url);
    auto path_at = url.find('/', scheme_end + 3);
    if (path_at == std::string::npos) return {url, "/"};
    return {url.substr(0, path_at), url.substr(path_at)};
}

// Field mapping: a JSON pointer ("/data/price") or a bare key/index.
nlohmann::json extract(const nlohmann::json& j, const std::string& spec) {
    if (spec.empty()) return j;
    if (spec.front() == '/') return j.at(nlohmann::json::json_pointer(spec));
    if (j.is_array()) return j.at(static_cast<std::size_t>(std::stoul(spec)));
    return j.at(spec);
}

double extract_number(const nlohmann::json& j, const std::string& spec) {
    auto v = extract(j, spec);
    if (v.is_string()) return std::stod(v.get<std::string>());
    return v.get<double>();
}

}  // namespace

RestFeed::RestFeed(const FeedConfig& cfg, ChannelCounters* counters)
    : cfg_(cfg), counters_(counters) {
    if (cfg_.price_url.empty()) throw ConfigError("live feed requires feed.price_url");
}

std::string RestFeed::fetch(const std::string& url_template, const std::string& asset) {
    if (counters_) counters_->public_calls.fetch_add(1);
    const auto [origin, path] = split_url(expand_template(url_template, asset));
    httplib::Client client(origin);
    client.set_connection_timeout(cfg_.timeout_s, 0);
    client.set_read_timeout(cfg_.timeout_s, 0);
    auto res = client.Get(path);
    if (!res) throw TransportError("GET " + origin + path + " failed: " + to_string(res.error()));
    if (res->status != 200)
        throw TransportError("GET " + origin + path + " -> HTTP " + std::to_string(res->status));
    return res->body;
}

std::vector<PriceTick> RestFeed::poll(const std::vector<std::string>& assets, Timestamp now) {
    std::vector<PriceTick> out;
    for (const auto& asset : assets) {
        try {
            const auto body = fetch(cfg_.price_url, asset);
            const auto j = nlohmann::json::parse(body);
            PriceTick tick;
            tick.asset = asset;
            tick.timestamp = now;
            tick.price = extract_number(j, cfg_.price_field);
            if (tick.price <= 0.0) throw TransportError("non-positive price for " + asset);
            auto it = last_seen_.find(asset);
            if (it != last_seen_.end() && now <= it->second) continue;  // no fresh observation
            last_seen_[asset] = now;
            out.push_back(std::move(tick));
        } catch (const std::exception& e) {
            errors_.push_back(asset + ": " + e.what());
        }
    }
    return out;
}

MarketContext RestFeed::market_context(const std::string& asset, Timestamp now) {
    MarketContext ctx;
    ctx.asset = asset;
    ctx.snapshot_time = now;
    try {
        if (!cfg_.candles_url.empty()) {
            const auto j = nlohmann::json::parse(fetch(cfg_.candles_url, asset));
            const auto rows = extract(j, cfg_.candles_field);
            for (const auto& e : rows) {
                Candle c;
                c.asset = asset;
                c.open = extract_number(e, cfg_.candle_open);
                c.high = extract_number(e, cfg_.candle_high);
                c.low = extract_number(e, cfg_.candle_low);
                c.close = extract_number(e, cfg_.candle_close);
                c.volume = extract_number(e, cfg_.candle_volume);
                c.timestamp = static_cast<Timestamp>(extract_number(e, cfg_.candle_time));
                ctx.candles.push_back(c);
            }
            std::sort(ctx.candles.begin(), ctx.candles.end(),
                      [](const Candle& a, const Candle& b) { return a.timestamp < b.timestamp; });
            if (ctx.candles.size() > 20) {
                ctx.candles.erase(ctx.candles.begin(),
                                  ctx.candles.end() - static_cast<std::ptrdiff_t>(20));
            }
        }
        if (ctx.candles.size() < 20) {
            ctx.partial = true;
            ctx.partial_reason = "cold_start";
        }
        if (!cfg_.orderbook_url.empty()) {
            const auto j = nlohmann::json::parse(fetch(cfg_.orderbook_url, asset));
            ctx.orderbook.best_bid = extract_number(j, cfg_.bid_field);
            ctx.orderbook.best_ask = extract_number(j, cfg_.ask_field);
            if (!cfg_.bid_depth_field.empty())
                ctx.orderbook.bid_depth = extract_number(j, cfg_.bid_depth_field);
            if (!cfg_.ask_depth_field.empty())
                ctx.orderbook.ask_depth = extract_number(j, cfg_.ask_depth_field);
        } else if (!ctx.candles.empty()) {
            ctx.orderbook.best_bid = ctx.orderbook.best_ask = ctx.candles.back().close;
            ctx.orderbook.synthesized = true;
            ctx.partial = true;
        }
        if (!cfg_.funding_url.empty()) {
            const auto j = nlohmann::json::parse(fetch(cfg_.funding_url, asset));
            ctx.funding_rate = extract_number(j, cfg_.funding_field);
        }
    } catch (const TransportError&) {
        throw;
    } catch (const std::exception& e) {
        throw TransportError(std::string("context decode failed: ") + e.what());
    }
    return ctx;
}

std::vector<std::string> RestFeed::take_errors() {
    auto out = std::move(errors_);
    errors_.clear();
    return out;
}

}  // namespace sentra
