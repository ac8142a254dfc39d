#pragma once

#include "rdrn/domain/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace rdrn {

// Orderwire packet kinds. Ids 1..6 are the configuration protocol proper;
// id 7 carries virtual-time reports when predictive configuration is on.
enum class PacketKind : std::uint8_t {
    Mycall = 1,
    Newswitch = 2,
    Switchpos = 3,
    Topology = 4,
    UserPos = 5,
    Handoff = 6,
    GvtUpdate = 7,
};

std::string_view to_string(PacketKind k);
std::optional<PacketKind> packet_kind_from_string(std::string_view s);

// Declared field widths of the canonical encoding, in bits. The paper-era
// radios never fixed these; they are a convention of this artifact and feed
// both the capacity model and the channel occupancy times.
namespace wire {
inline constexpr int kKindBits = 8;
inline constexpr int kCallsignBits = 48;
inline constexpr int kTimeBits = 48;
inline constexpr int kCoordBits = 32;
inline constexpr int kFrequencyBits = 8;
inline constexpr int kSlotBits = 8;
inline constexpr int kVciBits = 16;
inline constexpr int kVncHeaderBits = 1 + 32 + 32;
}  // namespace wire

struct MycallBody {
    Callsign callsign;
    SimTime startup_time;

    bool operator==(const MycallBody&) const = default;
};

struct NewswitchBody {
    bool operator==(const NewswitchBody&) const = default;
};

struct SwitchposBody {
    SimTime time;
    GeoPosition position;

    bool operator==(const SwitchposBody&) const = default;
};

struct TopologyNodeEntry {
    Callsign callsign;
    GeoPosition position;

    bool operator==(const TopologyNodeEntry&) const = default;
};

struct TopologyLinkEntry {
    Callsign a;
    Callsign b;
    int frequency = 1;

    bool operator==(const TopologyLinkEntry&) const = default;
};

struct TopologyBody {
    std::vector<TopologyNodeEntry> nodes;
    std::vector<TopologyLinkEntry> links;

    bool operator==(const TopologyBody&) const = default;
};

struct UserPosBody {
    Callsign callsign;
    SimTime time;
    GeoPosition position;

    bool operator==(const UserPosBody&) const = default;
};

struct HandoffAssignment {
    int frequency = 1;
    int slot = 0;
    GeoPosition es_position;

    bool operator==(const HandoffAssignment&) const = default;
};

struct VciReplacement {
    std::uint16_t original = 0;
    std::uint16_t replacement = 0;

    bool operator==(const VciReplacement&) const = default;
};

// Carries either a link assignment (frequency, slot, ES position) or a
// redirect to the next closest switch, never both.
struct HandoffBody {
    std::optional<HandoffAssignment> assignment;
    std::optional<Callsign> redirect;
    std::vector<VciReplacement> replacement_vcis;

    bool operator==(const HandoffBody&) const = default;
};

struct GvtUpdateBody {
    Callsign reporter;
    SimTime lvt;

    bool operator==(const GvtUpdateBody&) const = default;
};

// Optional predictive-execution header: antimessage toggle plus virtual
// send/receive times. Adds exactly 65 bits to any packet that carries it.
struct VncHeader {
    bool antimessage = false;
    SimTime send_time;
    SimTime receive_time;

    bool operator==(const VncHeader&) const = default;
};

class OrderwirePacket {
public:
    using Body = std::variant<MycallBody, NewswitchBody, SwitchposBody, TopologyBody,
                              UserPosBody, HandoffBody, GvtUpdateBody>;

    OrderwirePacket() : m_body(NewswitchBody{}) {}
    explicit OrderwirePacket(Body body, std::optional<VncHeader> vnc = std::nullopt);

    PacketKind kind() const noexcept;

    const Body& body() const noexcept { return m_body; }
    const std::optional<VncHeader>& vnc() const noexcept { return m_vnc; }
    void set_vnc(std::optional<VncHeader> h);

    template <typename T>
    const T& as() const {
        return std::get<T>(m_body);
    }

    template <typename T>
    const T* get_if() const noexcept {
        return std::get_if<T>(&m_body);
    }

    bool operator==(const OrderwirePacket&) const = default;

private:
    Body m_body;
    std::optional<VncHeader> m_vnc;
};

// Size under the canonical encoding. The virtual-header delta is exactly 65
// bits for every kind.
int packet_size_bits(const OrderwirePacket& p);

// Lossless single-line text form, used by transition logs and golden files.
std::string encode_packet(const OrderwirePacket& p);
OrderwirePacket decode_packet(std::string_view line);

}  // namespace rdrn
