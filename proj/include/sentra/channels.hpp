#pragma once

#include <atomic>
#include <cstdint>
#include <string>
#include <vector>

namespace sentra {

// Call counters shared between the market-data path (public channel) and the
// order path (private channel). The separation invariant is asserted on
// these: market data never touches the private counter and orders never
// touch the public one.
struct ChannelCounters {
    std::atomic<std::uint64_t> public_calls{0};
    std::atomic<std::uint64_t> private_calls{0};
};

// Transport carrying serialized orders over the private channel. The live
// implementation is a stub by design; tests install recording or failing
// doubles.
class OrderTransport {
public:
    virtual ~OrderTransport() = default;
    // Throws TransportError on failure.
    virtual std::string send(const std::string& order_json) = 0;
};

class StubOrderTransport : public OrderTransport {
public:
    std::string send(const std::string& order_json) override {
        sent_.push_back(order_json);
        return "{\"status\":\"accepted\"}";
    }
    const std::vector<std::string>& sent() const { return sent_; }

private:
    std::vector<std::string> sent_;
};

}  // namespace sentra
