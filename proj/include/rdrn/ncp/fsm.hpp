#pragma once

#include "rdrn/domain/packet.hpp"
#include "rdrn/domain/tables.hpp"
#include "rdrn/domain/types.hpp"
#include "rdrn/topo/beams.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace rdrn::ncp {

// The published state diagrams are not reproduced in the paper text; these
// state names are reconstructed from the protocol narrative.
enum class EsPhase { Booting, AwaitingPeers, Master, Slave, Configured };
enum class RnPhase { Booting, AwaitingHandoff, Connected };

std::string_view to_string(EsPhase p);
std::string_view to_string(RnPhase p);

// Oldest start-up time wins; ties break toward the smaller callsign.
Callsign elect_master(const std::map<Callsign, SimTime>& candidates);

// Timer growth applied when a MYCALL arrives after the timer expired.
double mycall_backoff(double t_current, double factor = 2.0);

// Returns the switch strictly closer to the remote node than its current
// one, beyond the hysteresis margin epsilon; none when no switch qualifies.
std::optional<Callsign> handoff_check(const Callsign& rn, const Callsign& current,
                                      const SwitchPositionTable& table, const GeoPosition& rn_pos,
                                      double epsilon_m = 0.0);

enum class TimerKind {
    MycallTimer,      // election window / periodic callsign beacon
    NewswitchRetry,   // per-peer answer timeout (robustness fix 1)
    TopologyWait,     // slave's wait for a TOPOLOGY reply (robustness fix 2)
    TopologyCompute,  // master's topology search in progress
    BeamCompute,      // per-RN beam feasibility in progress
    RnRetry,          // remote node rebroadcast timer
    RnUpdate,         // remote node periodic position report
};

std::string_view to_string(TimerKind k);

// --- events delivered to a state machine ---------------------------------
struct Boot {};

struct PacketArrival {
    Callsign from;
    OrderwirePacket packet;
    bool via_broadcast = false;
};

struct TimerExpiry {
    TimerKind kind;
    Callsign peer;  // meaningful for NewswitchRetry / BeamCompute
};

struct MasterFailed {
    Callsign failed;
};

// Periodic sample of the node's own (possibly moving) position.
struct PositionUpdate {
    GeoPosition position;
};

// Serving peer's point-to-point link went away.
struct PeerLinkDown {
    Callsign peer;
};

using NodeEvent = std::variant<Boot, PacketArrival, TimerExpiry, MasterFailed, PositionUpdate,
                               PeerLinkDown>;

// --- actions returned to the host ----------------------------------------
struct SendBroadcast {
    OrderwirePacket packet;
};

struct SendP2p {
    Callsign dst;
    OrderwirePacket packet;
};

struct EstablishLink {
    Callsign peer;
};

struct TearLink {
    Callsign peer;
};

// Re-arming a (kind, peer) pair supersedes the previous arm.
struct ArmTimer {
    TimerKind kind;
    double delay_s = 0.0;
    Callsign peer;
    bool jitter = false;  // host may add retransmission jitter
};

struct CancelTimer {
    TimerKind kind;
    Callsign peer;  // empty: every timer of this kind
};

// Markers for metrics; no protocol effect.
struct NoteConfigured {};
struct NoteReconfigStart {};
struct NoteDistribute {
    int recipients = 0;
};
struct NoteAssociation {
    Callsign rn;
    int beam = 0;
    int slot = 0;
};
struct NoteHandoffInitiated {
    Callsign rn;
    Callsign to;
};
struct NoteRnConnected {
    Callsign es;
    std::optional<Callsign> previous;
};

using Action = std::variant<SendBroadcast, SendP2p, EstablishLink, TearLink, ArmTimer, CancelTimer,
                            NoteConfigured, NoteReconfigStart, NoteDistribute, NoteAssociation,
                            NoteHandoffInitiated, NoteRnConnected>;

std::string action_summary(const Action& a);
std::string event_name(const NodeEvent& ev);

// --- protocol configuration ----------------------------------------------
struct ProtocolConfig {
    double timer_t_s = 20.0;
    double backoff_factor = 2.0;
    double backoff_cap = 16.0;  // multiplier on the configured timer
    bool fixes_enabled = true;
    double movement_tolerance_m = 0.0;
    double newswitch_retry_s = 2.0 * (0.439 + 0.679);
    double topology_wait_extra_s = 1.0;
    double k_top = 0.0;
    double k_bf = 1.875;
    double k_el_2mb = 2.0;
    topo::BeamConstraints beams;
    int max_beams = 4;
    int slots_per_beam = 4;
    bool use_real_topology = true;
    double rn_retry_s = 3.0;  // about four USER_POS transfer times
    double rn_update_period_s = 1.0;
};

// Master's topology search cost charged as computation delay.
double topology_charge_s(const SwitchPositionTable& table, const topo::BeamConstraints& beams,
                         double k_top);

// --- edge switch ----------------------------------------------------------
struct EsState {
    Callsign self;
    SimTime startup_time;
    GeoPosition position;
    EsPhase phase = EsPhase::Booting;

    double timer_t_s = 20.0;  // current, possibly backed off
    bool second_wait = false;

    std::map<Callsign, SimTime> mycall_seen;
    std::optional<Callsign> master;
    std::optional<SimTime> master_startup;

    SwitchPositionTable switch_table;
    UserPositionTable user_table;
    std::optional<topo::TopologySolution> topology;
    std::optional<topo::BeamPlan> beam_plan;

    std::set<Callsign> awaiting_switchpos;
    bool compute_armed = false;
    bool reconfig_pending = false;  // current round is a reconfiguration
    GeoPosition last_reported_position;

    std::map<Callsign, GeoPosition> pending_rns;  // awaiting beam feasibility

    bool is_master() const noexcept { return phase == EsPhase::Master; }
    bool configured() const noexcept { return topology.has_value(); }
};

struct EsStepResult {
    EsState state;
    std::vector<Action> actions;
};

EsState make_es(Callsign self, GeoPosition position, SimTime startup_time,
                const ProtocolConfig& cfg);

EsStepResult step_es(EsState s, const NodeEvent& ev, SimTime now, const ProtocolConfig& cfg);

// --- remote node -----------------------------------------------------------
struct RnState {
    Callsign self;
    GeoPosition position;
    RnPhase phase = RnPhase::Booting;

    std::optional<Callsign> associated_es;
    std::optional<std::pair<int, int>> assigned;  // frequency, slot
    GeoPosition es_position;
    int retry_count = 0;
};

struct RnStepResult {
    RnState state;
    std::vector<Action> actions;
};

RnState make_rn(Callsign self, GeoPosition position);

RnStepResult step_rn(RnState s, const NodeEvent& ev, SimTime now, const ProtocolConfig& cfg);

}  // namespace rdrn::ncp
