#include "rdrn/sim/channels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rdrn::sim {

void DropTable::set(PacketKind k, double p) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument("DropTable: probability outside [0,1]");
    }
    if (p == 0.0) {
        m_probs.erase(k);
    } else {
        m_probs[k] = p;
    }
}

double DropTable::get(PacketKind k) const {
    const auto it = m_probs.find(k);
    return it == m_probs.end() ? 0.0 : it->second;
}

BroadcastChannel::BroadcastChannel(EventQueue& queue, RngStream loss_stream)
    : m_queue(queue), m_loss(loss_stream) {}

void BroadcastChannel::set_bandwidth_bps(double bps) {
    if (!(bps > 0.0)) {
        throw std::invalid_argument("BroadcastChannel: bandwidth must be positive");
    }
    m_bandwidth_bps = bps;
}

void BroadcastChannel::attach(const Callsign& node) {
    m_nodes.insert(node);
}

void BroadcastChannel::detach(const Callsign& node) {
    m_nodes.erase(node);
}

void BroadcastChannel::transmit(const Callsign& src, const OrderwirePacket& packet) {
    if (m_nodes.count(src) == 0) {
        throw std::runtime_error("BroadcastChannel: transmitter not attached");
    }
    const int bits = packet_size_bits(packet);
    // Occupancy rounded up to whole milliseconds.
    const std::int64_t duration_ms = std::max<std::int64_t>(
        1, static_cast<std::int64_t>(
               std::ceil(static_cast<double>(bits) * 1000.0 / m_bandwidth_bps)));

    const SimTime start = m_queue.now();
    const SimTime end = SimTime::from_ms(start.millis() + duration_ms);

    ++m_stats.transmissions;
    m_stats.bits_offered += static_cast<std::uint64_t>(bits);

    auto tx = std::make_unique<Transmission>();
    tx->start = start;
    tx->end = end;
    Transmission* self = tx.get();

    if (m_collisions) {
        for (auto& other : m_active) {
            // Overlap of [start, end) intervals kills both transmissions.
            if (other->end > start) {
                other->collided = true;
                self->collided = true;
            }
        }
    }
    m_active.push_back(std::move(tx));

    // Decide per-listener loss now so that draw order is schedule order.
    const double p_drop = m_drops.get(packet.kind());
    std::vector<Callsign> receivers;
    GeoPosition src_pos{};
    const bool ranged = m_range_m >= 0.0 && m_position_of;
    if (ranged) {
        src_pos = m_position_of(src);
    }
    for (const auto& node : m_nodes) {
        if (node == src) {
            continue;
        }
        if (ranged && distance(src_pos, m_position_of(node)) > m_range_m) {
            continue;
        }
        if (m_drops.any() && m_loss.coin(p_drop)) {
            ++m_stats.dropped;
            continue;
        }
        receivers.push_back(node);
    }

    m_queue.schedule(end, [this, self, src, packet, receivers = std::move(receivers)] {
        const bool collided = self->collided;
        std::erase_if(m_active, [self](const auto& t) { return t.get() == self; });
        if (collided) {
            ++m_stats.collided;
            return;
        }
        for (const auto& dst : receivers) {
            ++m_stats.deliveries;
            if (m_deliver) {
                m_deliver(dst, src, packet);
            }
        }
    });
}

P2pNetwork::P2pNetwork(EventQueue& queue, RngStream loss_stream)
    : m_queue(queue), m_loss(loss_stream) {}

void P2pNetwork::establish(const Callsign& a, const Callsign& b) {
    if (a == b) {
        throw std::invalid_argument("P2pNetwork: self link");
    }
    for (const auto& key : {Key{a, b}, Key{b, a}}) {
        auto [it, inserted] = m_links.try_emplace(key);
        if (inserted || !it->second.up) {
            it->second.up = true;
            it->second.busy_until = m_queue.now();
        }
    }
}

void P2pNetwork::teardown(const Callsign& a, const Callsign& b) {
    for (const auto& key : {Key{a, b}, Key{b, a}}) {
        const auto it = m_links.find(key);
        if (it != m_links.end() && it->second.up) {
            it->second.up = false;
            ++it->second.epoch;  // voids in-flight packets on this direction
        }
    }
}

bool P2pNetwork::linked(const Callsign& a, const Callsign& b) const {
    const auto it = m_links.find(Key{a, b});
    return it != m_links.end() && it->second.up;
}

void P2pNetwork::send(const Callsign& src, const Callsign& dst, const OrderwirePacket& packet) {
    const auto it = m_links.find(Key{src, dst});
    if (it == m_links.end() || !it->second.up) {
        throw std::runtime_error("P2pNetwork: link absent " + src.str() + "->" + dst.str());
    }
    DirectedLink& link = it->second;

    const double latency = m_timings.latency_s(packet.kind());
    const SimTime start = std::max(m_queue.now(), link.busy_until);
    const SimTime arrival = start.plus_seconds(latency);
    link.busy_until = arrival;

    ++m_stats.transmissions;
    m_stats.bits_offered += static_cast<std::uint64_t>(packet_size_bits(packet));

    if (m_drops.any() && m_loss.coin(m_drops.get(packet.kind()))) {
        ++m_stats.dropped;
        return;
    }

    const std::uint64_t epoch = link.epoch;
    m_queue.schedule(arrival, [this, src, dst, packet, epoch] {
        const auto lit = m_links.find(Key{src, dst});
        if (lit == m_links.end() || !lit->second.up || lit->second.epoch != epoch) {
            return;  // link torn down while the packet was in flight
        }
        ++m_stats.deliveries;
        if (m_deliver) {
            m_deliver(dst, src, packet);
        }
    });
}

}  // namespace rdrn::sim
