#pragma once

#include "rdrn/domain/types.hpp"

#include <cstdint>
#include <functional>
#include <queue>
#include <stdexcept>
#include <vector>

namespace rdrn::sim {

// Deterministic discrete-event queue. Events dispatch in (time, seq) order;
// seq is assigned at schedule time, so equal-time events run in schedule
// order. The clock never decreases.
class EventQueue {
public:
    using Handler = std::function<void()>;

    SimTime now() const noexcept { return m_now; }

    std::uint64_t schedule(SimTime at, Handler fn) {
        if (at < m_now) {
            throw std::logic_error("EventQueue: scheduling in the past");
        }
        const std::uint64_t seq = m_next_seq++;
        m_heap.push(Entry{at, seq, std::move(fn)});
        return seq;
    }

    std::uint64_t schedule_in(double delay_s, Handler fn) {
        return schedule(m_now.plus_seconds(delay_s), std::move(fn));
    }

    bool empty() const noexcept { return m_heap.empty(); }
    std::size_t pending() const noexcept { return m_heap.size(); }

    // Dispatches events with time <= t, then advances the clock to t.
    // Returns the number of events dispatched.
    std::size_t run_until(SimTime t) {
        std::size_t count = 0;
        while (!m_heap.empty() && m_heap.top().time <= t) {
            count += step();
        }
        if (m_now < t) {
            m_now = t;
        }
        return count;
    }

    // Dispatches everything currently schedulable, up to a safety limit.
    std::size_t run_all(std::size_t max_events = 10'000'000) {
        std::size_t count = 0;
        while (!m_heap.empty()) {
            if (count >= max_events) {
                throw std::runtime_error("EventQueue: event limit exceeded");
            }
            count += step();
        }
        return count;
    }

    std::size_t step() {
        if (m_heap.empty()) {
            return 0;
        }
        Entry e = m_heap.top();
        m_heap.pop();
        m_now = e.time;
        e.fn();
        return 1;
    }

private:
    struct Entry {
        SimTime time;
        std::uint64_t seq = 0;
        Handler fn;
    };

    struct Later {
        bool operator()(const Entry& a, const Entry& b) const noexcept {
            if (a.time != b.time) {
                return b.time < a.time;
            }
            return b.seq < a.seq;
        }
    };

    SimTime m_now;
    std::uint64_t m_next_seq = 0;
    std::priority_queue<Entry, std::vector<Entry>, Later> m_heap;
};

}  // namespace rdrn::sim
