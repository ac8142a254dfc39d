#pragma once

#include "rdrn/domain/types.hpp"
#include "rdrn/sim/rng.hpp"

#include <stdexcept>
#include <vector>

namespace rdrn::sim {

// Poisson connection-setup process with exponential call lifetimes.
struct TrafficModel {
    double inter_setup_mean_s = 1200.0;
    double call_duration_mean_s = 600.0;
};

struct Call {
    SimTime setup;
    SimTime teardown;
};

class PoissonCallSource {
public:
    PoissonCallSource(TrafficModel model, RngStream stream)
        : m_model(model), m_stream(stream) {
        if (!(model.inter_setup_mean_s > 0.0) || !(model.call_duration_mean_s > 0.0)) {
            throw std::invalid_argument("PoissonCallSource: means must be positive");
        }
    }

    Call next() {
        m_clock = m_clock.plus_seconds(m_stream.exponential(m_model.inter_setup_mean_s));
        const double duration = m_stream.exponential(m_model.call_duration_mean_s);
        return Call{m_clock, m_clock.plus_seconds(duration)};
    }

    // All calls with setup time strictly inside [0, window_end).
    std::vector<Call> calls_until(SimTime window_end) {
        std::vector<Call> out;
        while (true) {
            const Call c = next();
            if (!(c.setup < window_end)) {
                break;
            }
            out.push_back(c);
        }
        return out;
    }

private:
    TrafficModel m_model;
    RngStream m_stream;
    SimTime m_clock;
};

}  // namespace rdrn::sim
