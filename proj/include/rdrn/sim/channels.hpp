#pragma once

#include "rdrn/domain/packet.hpp"
#include "rdrn/domain/types.hpp"
#include "rdrn/perf/models.hpp"
#include "rdrn/sim/event_queue.hpp"
#include "rdrn/sim/rng.hpp"

#include <functional>
#include <map>
#include <memory>
#include <set>
#include <vector>

namespace rdrn::sim {

// Per-kind delivery failure probabilities for fault-injection studies.
class DropTable {
public:
    void set(PacketKind k, double p);
    double get(PacketKind k) const;
    bool any() const noexcept { return !m_probs.empty(); }

private:
    std::map<PacketKind, double> m_probs;
};

struct ChannelStats {
    std::uint64_t transmissions = 0;
    std::uint64_t collided = 0;
    std::uint64_t deliveries = 0;
    std::uint64_t dropped = 0;
    std::uint64_t bits_offered = 0;
};

// Shared pure-contention broadcast channel. A packet occupies the channel
// for size/bandwidth seconds; any temporal overlap between two transmissions
// destroys both. Loss beyond collisions is a per-(packet, listener) coin.
class BroadcastChannel {
public:
    using Deliver = std::function<void(const Callsign& dst, const Callsign& src,
                                       const OrderwirePacket&)>;
    using PositionOf = std::function<GeoPosition(const Callsign&)>;

    BroadcastChannel(EventQueue& queue, RngStream loss_stream);

    void set_bandwidth_bps(double bps);
    void set_collisions_enabled(bool on) { m_collisions = on; }
    void set_range_m(double range) { m_range_m = range; }
    void set_drop_table(DropTable t) { m_drops = std::move(t); }
    void set_deliver(Deliver d) { m_deliver = std::move(d); }
    void set_position_lookup(PositionOf p) { m_position_of = std::move(p); }

    void attach(const Callsign& node);
    void detach(const Callsign& node);

    void transmit(const Callsign& src, const OrderwirePacket& packet);

    const ChannelStats& stats() const noexcept { return m_stats; }

private:
    struct Transmission {
        SimTime start;
        SimTime end;
        bool collided = false;
    };

    EventQueue& m_queue;
    RngStream m_loss;
    double m_bandwidth_bps = 19200.0;
    bool m_collisions = true;
    double m_range_m = -1.0;  // < 0 means unlimited
    DropTable m_drops;
    Deliver m_deliver;
    PositionOf m_position_of;
    std::set<Callsign> m_nodes;
    std::vector<std::unique_ptr<Transmission>> m_active;
    ChannelStats m_stats;
};

// Error-free point-to-point orderwire service. Each directed link is FIFO:
// a packet is delivered one per-kind latency after the link finishes the
// previous packet. Optional per-kind drops model protocol-level loss above
// the link for the failure studies.
class P2pNetwork {
public:
    using Deliver = BroadcastChannel::Deliver;

    P2pNetwork(EventQueue& queue, RngStream loss_stream);

    void set_timings(perf::TimingConstants tc) { m_timings = tc; }
    void set_drop_table(DropTable t) { m_drops = std::move(t); }
    void set_deliver(Deliver d) { m_deliver = std::move(d); }

    void establish(const Callsign& a, const Callsign& b);
    void teardown(const Callsign& a, const Callsign& b);
    bool linked(const Callsign& a, const Callsign& b) const;

    // Throws std::runtime_error when no link exists.
    void send(const Callsign& src, const Callsign& dst, const OrderwirePacket& packet);

    const ChannelStats& stats() const noexcept { return m_stats; }

private:
    struct DirectedLink {
        SimTime busy_until;
        bool up = false;
        std::uint64_t epoch = 0;  // bumped on teardown to void in-flight packets
    };

    using Key = std::pair<Callsign, Callsign>;

    EventQueue& m_queue;
    RngStream m_loss;
    perf::TimingConstants m_timings;
    DropTable m_drops;
    Deliver m_deliver;
    std::map<Key, DirectedLink> m_links;
    ChannelStats m_stats;
};

}  // namespace rdrn::sim
