#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>

namespace sentra {

// Money-like quantities are journaled as integers scaled by 1e8 so that
// round-trips through storage never accumulate float drift.
using Scaled = std::int64_t;

inline constexpr double kDecimalScale = 1e8;

inline Scaled to_scaled(double v) {
    return static_cast<Scaled>(std::llround(v * kDecimalScale));
}

inline double from_scaled(Scaled s) {
    return static_cast<double>(s) / kDecimalScale;
}

// Fixed 8-decimal rendering used by the canonical session dump. Stable across
// platforms for identical scaled values.
inline std::string format_scaled(Scaled s) {
    const Scaled sign = s < 0 ? -1 : 1;
    const Scaled mag = s < 0 ? -s : s;
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%s%lld.%08lld", sign < 0 ? "-" : "",
                  static_cast<long long>(mag / 100000000LL),
                  static_cast<long long>(mag % 100000000LL));
    return buf;
}

inline std::string format_fixed(double v, int digits = 8) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

// Shortest round-trip rendering for raw doubles (vol_history values are
// persisted bit-exactly, not in fixed point).
inline std::string format_exact(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace sentra
