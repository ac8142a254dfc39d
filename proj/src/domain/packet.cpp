#include "rdrn/domain/packet.hpp"

#include <charconv>
#include <sstream>

namespace rdrn {

namespace {

struct KindName {
    PacketKind kind;
    std::string_view name;
};

constexpr KindName kKindNames[] = {
    {PacketKind::Mycall, "MYCALL"},       {PacketKind::Newswitch, "NEWSWITCH"},
    {PacketKind::Switchpos, "SWITCHPOS"}, {PacketKind::Topology, "TOPOLOGY"},
    {PacketKind::UserPos, "USER_POS"},    {PacketKind::Handoff, "HANDOFF"},
    {PacketKind::GvtUpdate, "GVT_UPDATE"},
};

}  // namespace

std::string_view to_string(PacketKind k) {
    for (const auto& kn : kKindNames) {
        if (kn.kind == k) {
            return kn.name;
        }
    }
    return "UNKNOWN";
}

std::optional<PacketKind> packet_kind_from_string(std::string_view s) {
    for (const auto& kn : kKindNames) {
        if (kn.name == s) {
            return kn.kind;
        }
    }
    return std::nullopt;
}

OrderwirePacket::OrderwirePacket(Body body, std::optional<VncHeader> vnc)
    : m_body(std::move(body)), m_vnc(vnc) {
    if (const auto* h = std::get_if<HandoffBody>(&m_body)) {
        const bool has_assignment = h->assignment.has_value();
        const bool has_redirect = h->redirect.has_value();
        if (has_assignment == has_redirect) {
            throw std::invalid_argument("HandoffBody: exactly one of assignment/redirect required");
        }
    }
    if (m_vnc && m_vnc->receive_time < m_vnc->send_time) {
        throw std::invalid_argument("VncHeader: receive_time < send_time");
    }
}

void OrderwirePacket::set_vnc(std::optional<VncHeader> h) {
    if (h && h->receive_time < h->send_time) {
        throw std::invalid_argument("VncHeader: receive_time < send_time");
    }
    m_vnc = h;
}

PacketKind OrderwirePacket::kind() const noexcept {
    struct Visitor {
        PacketKind operator()(const MycallBody&) const { return PacketKind::Mycall; }
        PacketKind operator()(const NewswitchBody&) const { return PacketKind::Newswitch; }
        PacketKind operator()(const SwitchposBody&) const { return PacketKind::Switchpos; }
        PacketKind operator()(const TopologyBody&) const { return PacketKind::Topology; }
        PacketKind operator()(const UserPosBody&) const { return PacketKind::UserPos; }
        PacketKind operator()(const HandoffBody&) const { return PacketKind::Handoff; }
        PacketKind operator()(const GvtUpdateBody&) const { return PacketKind::GvtUpdate; }
    };
    return std::visit(Visitor{}, m_body);
}

int packet_size_bits(const OrderwirePacket& p) {
    using namespace wire;
    int bits = kKindBits;
    struct Visitor {
        int operator()(const MycallBody&) const { return kCallsignBits + kTimeBits; }
        int operator()(const NewswitchBody&) const { return 0; }
        int operator()(const SwitchposBody&) const { return kTimeBits + 2 * kCoordBits; }
        int operator()(const TopologyBody& b) const {
            const int per_node = kCallsignBits + 2 * kCoordBits;
            const int per_link = 2 * kCallsignBits + kFrequencyBits;
            return static_cast<int>(b.nodes.size()) * per_node +
                   static_cast<int>(b.links.size()) * per_link;
        }
        int operator()(const UserPosBody&) const { return kCallsignBits + kTimeBits + 2 * kCoordBits; }
        int operator()(const HandoffBody& b) const {
            int n = static_cast<int>(b.replacement_vcis.size()) * 2 * kVciBits;
            if (b.assignment) {
                n += kFrequencyBits + kSlotBits + 2 * kCoordBits;
            } else {
                n += kCallsignBits;
            }
            return n;
        }
        int operator()(const GvtUpdateBody&) const { return kCallsignBits + kTimeBits; }
    };
    bits += std::visit(Visitor{}, p.body());
    if (p.vnc()) {
        bits += kVncHeaderBits;
    }
    return bits;
}

namespace {

void put_coord(std::ostream& os, double v) {
    std::ostringstream tmp;
    tmp.precision(17);
    tmp << v;
    os << tmp.str();
}

class TokenReader {
public:
    explicit TokenReader(std::string_view line) : m_line(line) {}

    std::string_view next() {
        while (m_pos < m_line.size() && m_line[m_pos] == ' ') {
            ++m_pos;
        }
        if (m_pos >= m_line.size()) {
            throw std::invalid_argument("decode_packet: truncated line");
        }
        const std::size_t start = m_pos;
        while (m_pos < m_line.size() && m_line[m_pos] != ' ') {
            ++m_pos;
        }
        return m_line.substr(start, m_pos - start);
    }

    bool done() {
        while (m_pos < m_line.size() && m_line[m_pos] == ' ') {
            ++m_pos;
        }
        return m_pos >= m_line.size();
    }

    std::int64_t next_i64() {
        const auto tok = next();
        std::int64_t v = 0;
        const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
            throw std::invalid_argument("decode_packet: bad integer token");
        }
        return v;
    }

    double next_double() {
        const auto tok = next();
        try {
            std::size_t used = 0;
            const double v = std::stod(std::string(tok), &used);
            if (used != tok.size()) {
                throw std::invalid_argument("trailing");
            }
            return v;
        } catch (const std::exception&) {
            throw std::invalid_argument("decode_packet: bad float token");
        }
    }

private:
    std::string_view m_line;
    std::size_t m_pos = 0;
};

}  // namespace

std::string encode_packet(const OrderwirePacket& p) {
    std::ostringstream os;
    os << to_string(p.kind());
    struct Visitor {
        std::ostream& os;
        void operator()(const MycallBody& b) const {
            os << ' ' << b.callsign.str() << ' ' << b.startup_time.millis();
        }
        void operator()(const NewswitchBody&) const {}
        void operator()(const SwitchposBody& b) const {
            os << ' ' << b.time.millis() << ' ';
            put_coord(os, b.position.x);
            os << ' ';
            put_coord(os, b.position.y);
        }
        void operator()(const TopologyBody& b) const {
            os << ' ' << b.nodes.size() << ' ' << b.links.size();
            for (const auto& n : b.nodes) {
                os << ' ' << n.callsign.str() << ' ';
                put_coord(os, n.position.x);
                os << ' ';
                put_coord(os, n.position.y);
            }
            for (const auto& l : b.links) {
                os << ' ' << l.a.str() << ' ' << l.b.str() << ' ' << l.frequency;
            }
        }
        void operator()(const UserPosBody& b) const {
            os << ' ' << b.callsign.str() << ' ' << b.time.millis() << ' ';
            put_coord(os, b.position.x);
            os << ' ';
            put_coord(os, b.position.y);
        }
        void operator()(const HandoffBody& b) const {
            if (b.assignment) {
                os << " assign " << b.assignment->frequency << ' ' << b.assignment->slot << ' ';
                put_coord(os, b.assignment->es_position.x);
                os << ' ';
                put_coord(os, b.assignment->es_position.y);
            } else {
                os << " redirect " << b.redirect->str();
            }
            os << ' ' << b.replacement_vcis.size();
            for (const auto& r : b.replacement_vcis) {
                os << ' ' << r.original << ' ' << r.replacement;
            }
        }
        void operator()(const GvtUpdateBody& b) const {
            os << ' ' << b.reporter.str() << ' ' << b.lvt.millis();
        }
    };
    std::visit(Visitor{os}, p.body());
    if (p.vnc()) {
        os << " vnc " << (p.vnc()->antimessage ? 1 : 0) << ' ' << p.vnc()->send_time.millis()
           << ' ' << p.vnc()->receive_time.millis();
    }
    return os.str();
}

OrderwirePacket decode_packet(std::string_view line) {
    TokenReader r(line);
    const auto kind_tok = r.next();
    const auto kind = packet_kind_from_string(kind_tok);
    if (!kind) {
        throw std::invalid_argument("decode_packet: unknown kind");
    }

    OrderwirePacket::Body body{NewswitchBody{}};
    switch (*kind) {
        case PacketKind::Mycall: {
            MycallBody b;
            b.callsign = Callsign(std::string(r.next()));
            b.startup_time = SimTime::from_ms(r.next_i64());
            body = b;
            break;
        }
        case PacketKind::Newswitch:
            break;
        case PacketKind::Switchpos: {
            SwitchposBody b;
            b.time = SimTime::from_ms(r.next_i64());
            b.position.x = r.next_double();
            b.position.y = r.next_double();
            body = b;
            break;
        }
        case PacketKind::Topology: {
            TopologyBody b;
            const auto n_nodes = r.next_i64();
            const auto n_links = r.next_i64();
            for (std::int64_t i = 0; i < n_nodes; ++i) {
                TopologyNodeEntry e;
                e.callsign = Callsign(std::string(r.next()));
                e.position.x = r.next_double();
                e.position.y = r.next_double();
                b.nodes.push_back(std::move(e));
            }
            for (std::int64_t i = 0; i < n_links; ++i) {
                TopologyLinkEntry e;
                e.a = Callsign(std::string(r.next()));
                e.b = Callsign(std::string(r.next()));
                e.frequency = static_cast<int>(r.next_i64());
                b.links.push_back(std::move(e));
            }
            body = b;
            break;
        }
        case PacketKind::UserPos: {
            UserPosBody b;
            b.callsign = Callsign(std::string(r.next()));
            b.time = SimTime::from_ms(r.next_i64());
            b.position.x = r.next_double();
            b.position.y = r.next_double();
            body = b;
            break;
        }
        case PacketKind::Handoff: {
            HandoffBody b;
            const auto form = r.next();
            if (form == "assign") {
                HandoffAssignment a;
                a.frequency = static_cast<int>(r.next_i64());
                a.slot = static_cast<int>(r.next_i64());
                a.es_position.x = r.next_double();
                a.es_position.y = r.next_double();
                b.assignment = a;
            } else if (form == "redirect") {
                b.redirect = Callsign(std::string(r.next()));
            } else {
                throw std::invalid_argument("decode_packet: bad handoff form");
            }
            const auto n_vcis = r.next_i64();
            for (std::int64_t i = 0; i < n_vcis; ++i) {
                VciReplacement v;
                v.original = static_cast<std::uint16_t>(r.next_i64());
                v.replacement = static_cast<std::uint16_t>(r.next_i64());
                b.replacement_vcis.push_back(v);
            }
            body = b;
            break;
        }
        case PacketKind::GvtUpdate: {
            GvtUpdateBody b;
            b.reporter = Callsign(std::string(r.next()));
            b.lvt = SimTime::from_ms(r.next_i64());
            body = b;
            break;
        }
    }

    std::optional<VncHeader> vnc;
    if (!r.done()) {
        const auto tag = r.next();
        if (tag != "vnc") {
            throw std::invalid_argument("decode_packet: trailing tokens");
        }
        VncHeader h;
        h.antimessage = r.next_i64() != 0;
        h.send_time = SimTime::from_ms(r.next_i64());
        h.receive_time = SimTime::from_ms(r.next_i64());
        vnc = h;
    }
    if (!r.done()) {
        throw std::invalid_argument("decode_packet: trailing tokens");
    }
    return OrderwirePacket(std::move(body), vnc);
}

}  // namespace rdrn
