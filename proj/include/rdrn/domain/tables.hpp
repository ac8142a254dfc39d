#pragma once

#include "rdrn/domain/types.hpp"

#include <map>
#include <optional>

namespace rdrn {

struct PositionEntry {
    GeoPosition position;
    SimTime time;

    bool operator==(const PositionEntry&) const = default;
};

// Callsign-keyed position table. Ordered map so that every iteration over
// entries (topology input, packet emission, logs) is deterministic.
class PositionTable {
public:
    void upsert(const Callsign& cs, GeoPosition pos, SimTime t) {
        m_entries[cs] = PositionEntry{pos, t};
    }

    void erase(const Callsign& cs) { m_entries.erase(cs); }

    std::optional<PositionEntry> find(const Callsign& cs) const {
        const auto it = m_entries.find(cs);
        if (it == m_entries.end()) {
            return std::nullopt;
        }
        return it->second;
    }

    bool contains(const Callsign& cs) const { return m_entries.count(cs) != 0; }
    std::size_t size() const noexcept { return m_entries.size(); }
    bool empty() const noexcept { return m_entries.empty(); }
    void clear() noexcept { m_entries.clear(); }

    const std::map<Callsign, PositionEntry>& entries() const noexcept { return m_entries; }

    // Nearest entry to `from`, optionally excluding one callsign. Ties break
    // toward the lexicographically smaller callsign.
    std::optional<Callsign> nearest(const GeoPosition& from, const Callsign* exclude = nullptr) const {
        std::optional<Callsign> best;
        double best_dist = 0.0;
        for (const auto& [cs, entry] : m_entries) {
            if (exclude && cs == *exclude) {
                continue;
            }
            const double d = distance(from, entry.position);
            if (!best || d < best_dist) {
                best = cs;
                best_dist = d;
            }
        }
        return best;
    }

    bool operator==(const PositionTable&) const = default;

private:
    std::map<Callsign, PositionEntry> m_entries;
};

// One entry per edge switch.
using SwitchPositionTable = PositionTable;
// One entry per associated remote node.
using UserPositionTable = PositionTable;

}  // namespace rdrn
