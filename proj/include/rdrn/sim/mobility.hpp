#pragma once

#include "rdrn/domain/types.hpp"
#include "rdrn/sim/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace rdrn::sim {

// Constant speed and direction until a handoff; then both are redrawn
// uniformly.
struct MobilityState {
    GeoPosition position;
    double speed_mps = 0.0;
    double direction_deg = 0.0;
    double max_speed_mps = 0.0;
};

inline MobilityState mobility_step(const MobilityState& m, double dt_s) {
    if (dt_s < 0.0) {
        throw std::invalid_argument("mobility_step: negative dt");
    }
    constexpr double kDegToRad = 3.141592653589793238462643383279502884 / 180.0;
    MobilityState out = m;
    out.position.x += m.speed_mps * std::cos(m.direction_deg * kDegToRad) * dt_s;
    out.position.y += m.speed_mps * std::sin(m.direction_deg * kDegToRad) * dt_s;
    return out;
}

inline MobilityState resample_on_handoff(const MobilityState& m, RngStream& mobility_stream) {
    MobilityState out = m;
    out.speed_mps = mobility_stream.uniform(0.0, m.max_speed_mps);
    out.direction_deg = mobility_stream.uniform(0.0, 360.0);
    return out;
}

}  // namespace rdrn::sim
