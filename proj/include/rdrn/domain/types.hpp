#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rdrn {

// Radio operator identifier. Unique per node within a scenario.
class Callsign {
public:
    Callsign() = default;

    explicit Callsign(std::string id) : m_id(std::move(id)) {
        if (m_id.empty()) {
            throw std::invalid_argument("Callsign: empty id");
        }
    }

    const std::string& str() const noexcept { return m_id; }
    bool empty() const noexcept { return m_id.empty(); }

    auto operator<=>(const Callsign&) const = default;

private:
    std::string m_id;
};

// Local-plane position in meters: x east, y north.
struct GeoPosition {
    double x = 0.0;
    double y = 0.0;

    bool operator==(const GeoPosition&) const = default;
};

inline bool is_finite(const GeoPosition& p) noexcept {
    return std::isfinite(p.x) && std::isfinite(p.y);
}

// Euclidean distance on the local plane, meters.
inline double distance(const GeoPosition& a, const GeoPosition& b) noexcept {
    return std::hypot(a.x - b.x, a.y - b.y);
}

// Bearing of `to` as seen from `from`, degrees in [0, 360): 0 = +x axis,
// increasing counterclockwise.
inline double bearing_deg(const GeoPosition& from, const GeoPosition& to) noexcept {
    const double deg = std::atan2(to.y - from.y, to.x - from.x) * 180.0 / 3.141592653589793238462643383279502884;
    return deg < 0.0 ? deg + 360.0 : deg;
}

// Simulation time with exact millisecond resolution. Fixed-point so that
// event ordering never depends on floating-point rounding.
class SimTime {
public:
    constexpr SimTime() = default;

    static constexpr SimTime from_ms(std::int64_t ms) {
        if (ms < 0) {
            throw std::invalid_argument("SimTime: negative time");
        }
        SimTime t;
        t.m_ms = ms;
        return t;
    }

    // Rounds to the nearest millisecond.
    static SimTime from_seconds(double s) {
        if (!(s >= 0.0) || !std::isfinite(s)) {
            throw std::invalid_argument("SimTime: negative or non-finite seconds");
        }
        return from_ms(static_cast<std::int64_t>(std::llround(s * 1000.0)));
    }

    constexpr std::int64_t millis() const noexcept { return m_ms; }
    constexpr double seconds() const noexcept { return static_cast<double>(m_ms) / 1000.0; }

    constexpr SimTime operator+(SimTime o) const { return from_ms(m_ms + o.m_ms); }

    // Signed difference in milliseconds; callers handle ordering themselves.
    constexpr std::int64_t diff_ms(SimTime o) const noexcept { return m_ms - o.m_ms; }

    SimTime plus_seconds(double s) const { return from_ms(m_ms + std::llround(s * 1000.0)); }

    auto operator<=>(const SimTime&) const = default;

private:
    std::int64_t m_ms = 0;
};

}  // namespace rdrn

template <>
struct std::hash<rdrn::Callsign> {
    std::size_t operator()(const rdrn::Callsign& c) const noexcept {
        return std::hash<std::string>{}(c.str());
    }
};
