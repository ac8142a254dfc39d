#include "rdrn/ncp/fsm.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rdrn::ncp {

std::string_view to_string(EsPhase p) {
    switch (p) {
        case EsPhase::Booting:
            return "BOOTING";
        case EsPhase::AwaitingPeers:
            return "AWAITING_PEERS";
        case EsPhase::Master:
            return "MASTER";
        case EsPhase::Slave:
            return "SLAVE";
        case EsPhase::Configured:
            return "CONFIGURED";
    }
    return "?";
}

std::string_view to_string(RnPhase p) {
    switch (p) {
        case RnPhase::Booting:
            return "BOOTING";
        case RnPhase::AwaitingHandoff:
            return "AWAITING_HANDOFF";
        case RnPhase::Connected:
            return "CONNECTED";
    }
    return "?";
}

std::string_view to_string(TimerKind k) {
    switch (k) {
        case TimerKind::MycallTimer:
            return "mycall";
        case TimerKind::NewswitchRetry:
            return "newswitch_retry";
        case TimerKind::TopologyWait:
            return "topology_wait";
        case TimerKind::TopologyCompute:
            return "topology_compute";
        case TimerKind::BeamCompute:
            return "beam_compute";
        case TimerKind::RnRetry:
            return "rn_retry";
        case TimerKind::RnUpdate:
            return "rn_update";
    }
    return "?";
}

namespace {

// Election order: older startup first, then smaller callsign.
bool precedes(SimTime startup_a, const Callsign& a, SimTime startup_b, const Callsign& b) {
    if (startup_a != startup_b) {
        return startup_a < startup_b;
    }
    return a < b;
}

}  // namespace

Callsign elect_master(const std::map<Callsign, SimTime>& candidates) {
    if (candidates.empty()) {
        throw std::invalid_argument("elect_master: no candidates");
    }
    auto best = candidates.begin();
    for (auto it = std::next(candidates.begin()); it != candidates.end(); ++it) {
        if (precedes(it->second, it->first, best->second, best->first)) {
            best = it;
        }
    }
    return best->first;
}

double mycall_backoff(double t_current, double factor) {
    if (!(t_current > 0.0)) {
        throw std::invalid_argument("mycall_backoff: timer must be positive");
    }
    if (!(factor > 1.0)) {
        throw std::invalid_argument("mycall_backoff: factor must exceed 1");
    }
    return t_current * factor;
}

std::optional<Callsign> handoff_check(const Callsign& rn, const Callsign& current,
                                      const SwitchPositionTable& table, const GeoPosition& rn_pos,
                                      double epsilon_m) {
    (void)rn;
    const auto cur = table.find(current);
    if (!cur) {
        return std::nullopt;
    }
    const double d_cur = distance(rn_pos, cur->position);
    std::optional<Callsign> best;
    double best_d = d_cur;
    for (const auto& [cs, entry] : table.entries()) {
        if (cs == current) {
            continue;
        }
        const double d = distance(rn_pos, entry.position);
        if (d < best_d) {
            best = cs;
            best_d = d;
        }
    }
    if (best && d_cur - best_d > epsilon_m) {
        return best;
    }
    return std::nullopt;
}

double topology_charge_s(const SwitchPositionTable& table, const topo::BeamConstraints& beams,
                         double k_top) {
    if (k_top <= 0.0) {
        return 0.0;
    }
    const double n = static_cast<double>(table.size());
    int r = 0;
    const auto& entries = table.entries();
    for (auto i = entries.begin(); i != entries.end(); ++i) {
        for (auto j = std::next(i); j != entries.end(); ++j) {
            r += distance(i->second.position, j->second.position) <= beams.rlink_m;
        }
    }
    const double cost = k_top * (n * n + std::pow(static_cast<double>(beams.fmax + 1), r));
    return std::min(cost, 1.0e6);
}

std::string event_name(const NodeEvent& ev) {
    struct Visitor {
        std::string operator()(const Boot&) const { return "boot"; }
        std::string operator()(const PacketArrival& p) const {
            return std::string("rx:") + std::string(to_string(p.packet.kind()));
        }
        std::string operator()(const TimerExpiry& t) const {
            return std::string("timer:") + std::string(to_string(t.kind));
        }
        std::string operator()(const MasterFailed&) const { return "master_failed"; }
        std::string operator()(const PositionUpdate&) const { return "position_update"; }
        std::string operator()(const PeerLinkDown& p) const { return "link_down:" + p.peer.str(); }
    };
    return std::visit(Visitor{}, ev);
}

std::string action_summary(const Action& a) {
    struct Visitor {
        std::string operator()(const SendBroadcast& s) const {
            return std::string("bcast:") + std::string(to_string(s.packet.kind()));
        }
        std::string operator()(const SendP2p& s) const {
            return std::string("p2p:") + s.dst.str() + ":" + std::string(to_string(s.packet.kind()));
        }
        std::string operator()(const EstablishLink& s) const { return "link+:" + s.peer.str(); }
        std::string operator()(const TearLink& s) const { return "link-:" + s.peer.str(); }
        std::string operator()(const ArmTimer& s) const {
            std::ostringstream os;
            os << "arm:" << to_string(s.kind);
            if (!s.peer.empty()) {
                os << ':' << s.peer.str();
            }
            return os.str();
        }
        std::string operator()(const CancelTimer& s) const {
            return std::string("cancel:") + std::string(to_string(s.kind));
        }
        std::string operator()(const NoteConfigured&) const { return "configured"; }
        std::string operator()(const NoteReconfigStart&) const { return "reconfig"; }
        std::string operator()(const NoteDistribute& s) const {
            return "distribute:" + std::to_string(s.recipients);
        }
        std::string operator()(const NoteAssociation& s) const {
            return "assoc:" + s.rn.str() + ":b" + std::to_string(s.beam) + ":s" +
                   std::to_string(s.slot);
        }
        std::string operator()(const NoteHandoffInitiated& s) const {
            return "handoff:" + s.rn.str() + "->" + s.to.str();
        }
        std::string operator()(const NoteRnConnected& s) const { return "connected:" + s.es.str(); }
    };
    return std::visit(Visitor{}, a);
}

// --------------------------------------------------------------------------
// Edge switch machine
// --------------------------------------------------------------------------

EsState make_es(Callsign self, GeoPosition position, SimTime startup_time,
                const ProtocolConfig& cfg) {
    EsState s;
    s.self = std::move(self);
    s.position = position;
    s.last_reported_position = position;
    s.startup_time = startup_time;
    s.timer_t_s = cfg.timer_t_s;
    return s;
}

namespace {

OrderwirePacket mycall_packet(const EsState& s) {
    return OrderwirePacket(MycallBody{s.self, s.startup_time});
}

OrderwirePacket switchpos_packet(const EsState& s, SimTime now) {
    return OrderwirePacket(SwitchposBody{now, s.position});
}

struct EsCtx {
    EsState& s;
    std::vector<Action>& out;
    SimTime now;
    const ProtocolConfig& cfg;

    void arm(TimerKind kind, double delay, Callsign peer = {}, bool jitter = false) {
        out.push_back(ArmTimer{kind, delay, std::move(peer), jitter});
    }

    void apply_backoff() {
        s.timer_t_s =
            std::min(mycall_backoff(s.timer_t_s, cfg.backoff_factor), cfg.timer_t_s * cfg.backoff_cap);
    }

    // Opens (or folds into) a round that will rerun the topology search once
    // every polled switch has answered.
    void begin_exchange(const Callsign& peer) {
        if (s.compute_armed) {
            s.compute_armed = false;
            out.push_back(CancelTimer{TimerKind::TopologyCompute, {}});
        }
        s.awaiting_switchpos.insert(peer);
        out.push_back(EstablishLink{peer});
        out.push_back(SendP2p{peer, OrderwirePacket(NewswitchBody{})});
        if (cfg.fixes_enabled) {
            arm(TimerKind::NewswitchRetry, cfg.newswitch_retry_s, peer);
        }
    }

    void arm_compute() {
        s.compute_armed = true;
        arm(TimerKind::TopologyCompute, topology_charge_s(s.switch_table, cfg.beams, cfg.k_top));
    }

    void open_reconfig_round() {
        if (!s.reconfig_pending) {
            s.reconfig_pending = true;
            out.push_back(NoteReconfigStart{});
        }
        apply_backoff();
    }

    void slave_arm_topology_wait() {
        if (!cfg.fixes_enabled) {
            return;
        }
        const double n = static_cast<double>(s.mycall_seen.size()) + 1.0;
        const double r = n * (n - 1.0) / 2.0;
        const double labelings = std::pow(static_cast<double>(cfg.beams.fmax + 1), r);
        const double estimate =
            std::min(cfg.k_top * (n * n + labelings), 1.0e6) + cfg.topology_wait_extra_s;
        arm(TimerKind::TopologyWait, estimate);
    }

    void demote_to_slave(const Callsign& new_master) {
        s.phase = s.configured() ? EsPhase::Configured : EsPhase::Slave;
        s.master = new_master;
        const auto it = s.mycall_seen.find(new_master);
        s.master_startup = it == s.mycall_seen.end() ? std::optional<SimTime>{} : it->second;
        s.awaiting_switchpos.clear();
        out.push_back(CancelTimer{TimerKind::NewswitchRetry, {}});
        if (s.compute_armed) {
            s.compute_armed = false;
            out.push_back(CancelTimer{TimerKind::TopologyCompute, {}});
        }
        if (!s.configured()) {
            slave_arm_topology_wait();
        }
    }

    void run_topology_and_distribute() {
        const auto result = cfg.use_real_topology ? topo::solve_topology(s.switch_table, cfg.beams)
                                                  : topo::stub_topology(s.switch_table, cfg.beams);
        if (const auto* sol = std::get_if<topo::TopologySolution>(&result)) {
            const bool first = !s.topology.has_value();
            s.topology = *sol;
            OrderwirePacket topo_packet(sol->to_packet_body());
            int n = 0;
            for (const auto& [peer, startup] : s.mycall_seen) {
                (void)startup;
                out.push_back(EstablishLink{peer});
                out.push_back(SendP2p{peer, topo_packet});
                ++n;
            }
            out.push_back(NoteDistribute{n});
            if (first) {
                out.push_back(NoteConfigured{});
            }
        }
        // An infeasible search leaves the previous topology standing; the
        // configuration stays incomplete and shows up in the run diagnosis.
        s.reconfig_pending = false;
    }

    // Answer a remote node asking for service, once feasibility is known.
    void finish_beam_feasibility(const Callsign& rn) {
        const auto pend = s.pending_rns.find(rn);
        if (pend == s.pending_rns.end()) {
            return;
        }
        const GeoPosition rn_pos = pend->second;
        s.pending_rns.erase(pend);

        UserPositionTable with_rn = s.user_table;
        with_rn.upsert(rn, rn_pos, now);
        const auto result =
            topo::allocate_beams(s.position, with_rn, cfg.beams, cfg.max_beams, cfg.slots_per_beam);
        if (const auto* plan = std::get_if<topo::BeamPlan>(&result)) {
            const auto before = s.beam_plan;
            s.beam_plan = *plan;
            s.user_table = with_rn;
            const auto where = plan->find(rn);
            out.push_back(EstablishLink{rn});
            HandoffBody h;
            h.assignment = HandoffAssignment{plan->beams[where->first].frequency, where->second,
                                             s.position};
            out.push_back(SendP2p{rn, OrderwirePacket(h)});
            out.push_back(NoteAssociation{rn, where->first, where->second});
            // Re-steering may move already-connected nodes; tell them.
            for (const auto& [cs, entry] : s.user_table.entries()) {
                (void)entry;
                if (cs == rn) {
                    continue;
                }
                const auto now_at = plan->find(cs);
                const auto was_at = before ? before->find(cs) : std::nullopt;
                if (now_at && was_at && *now_at != *was_at) {
                    HandoffBody update;
                    update.assignment = HandoffAssignment{
                        plan->beams[now_at->first].frequency, now_at->second, s.position};
                    out.push_back(SendP2p{cs, OrderwirePacket(update)});
                }
            }
        } else {
            const auto next = s.switch_table.nearest(rn_pos, &s.self);
            if (next) {
                out.push_back(EstablishLink{rn});
                HandoffBody h;
                h.redirect = *next;
                out.push_back(SendP2p{rn, OrderwirePacket(h)});
            }
            // No alternative switch: stay silent, the node retries.
        }
    }
};

void es_on_mycall(EsCtx& ctx, const Callsign& from, const MycallBody& body) {
    EsState& s = ctx.s;
    if (from == s.self) {
        return;
    }
    s.mycall_seen[from] = body.startup_time;

    switch (s.phase) {
        case EsPhase::Booting:
        case EsPhase::AwaitingPeers:
            return;  // collected; the election happens at the timer
        case EsPhase::Master:
            if (precedes(body.startup_time, from, s.startup_time, s.self)) {
                ctx.demote_to_slave(from);
                return;
            }
            // Late MYCALL: a new switch or a known one signalling change.
            // Poll its position; the round opens if the answer moved.
            if (s.awaiting_switchpos.count(from) == 0) {
                if (!s.switch_table.contains(from)) {
                    ctx.open_reconfig_round();
                }
                ctx.begin_exchange(from);
            }
            return;
        case EsPhase::Slave:
        case EsPhase::Configured:
            return;  // recorded; an older master will reach us itself
    }
}

void es_on_newswitch(EsCtx& ctx, const Callsign& from) {
    EsState& s = ctx.s;
    const auto seen = s.mycall_seen.find(from);
    const bool known_older = seen != s.mycall_seen.end() &&
                             precedes(seen->second, from, s.startup_time, s.self);

    if (s.phase == EsPhase::Master) {
        if (known_older) {
            ctx.demote_to_slave(from);
            ctx.out.push_back(SendP2p{from, switchpos_packet(s, ctx.now)});
            s.last_reported_position = s.position;
        }
        return;  // a younger or unknown claimant is stale traffic
    }

    const bool acceptable = !s.master || *s.master == from || known_older;
    if (!acceptable) {
        return;
    }
    s.master = from;
    if (seen != s.mycall_seen.end()) {
        s.master_startup = seen->second;
    }
    if (s.phase == EsPhase::AwaitingPeers || s.phase == EsPhase::Booting) {
        s.phase = EsPhase::Slave;
        ctx.slave_arm_topology_wait();
    }
    ctx.out.push_back(SendP2p{from, switchpos_packet(s, ctx.now)});
    s.last_reported_position = s.position;
}

void es_on_switchpos(EsCtx& ctx, const Callsign& from, const SwitchposBody& body) {
    EsState& s = ctx.s;
    if (s.phase != EsPhase::Master) {
        return;
    }
    const auto previous = s.switch_table.find(from);
    s.switch_table.upsert(from, body.position, body.time);
    s.awaiting_switchpos.erase(from);
    ctx.out.push_back(CancelTimer{TimerKind::NewswitchRetry, from});

    const bool moved =
        !previous || distance(previous->position, body.position) > ctx.cfg.movement_tolerance_m;
    if (!s.topology) {
        // initial configuration: compute once everyone answered
        if (s.awaiting_switchpos.empty()) {
            ctx.arm_compute();
        }
        return;
    }
    if (moved) {
        ctx.open_reconfig_round();
        if (s.awaiting_switchpos.empty()) {
            ctx.arm_compute();
        }
    } else if (s.reconfig_pending && s.awaiting_switchpos.empty()) {
        ctx.arm_compute();
    }
}

void es_on_topology(EsCtx& ctx, const Callsign& from, const TopologyBody& body) {
    EsState& s = ctx.s;
    if (s.phase == EsPhase::Master) {
        return;  // stale traffic from a superseded master
    }
    if (s.master && *s.master != from) {
        const auto seen = s.mycall_seen.find(from);
        const bool older = seen != s.mycall_seen.end() && s.master_startup &&
                           precedes(seen->second, from, *s.master_startup, *s.master);
        if (!older) {
            return;
        }
        s.master = from;
        s.master_startup = seen->second;
    }

    topo::TopologySolution sol;
    sol.nodes = body.nodes;
    for (const auto& l : body.links) {
        sol.links.push_back(topo::TopologyLink{l.a, l.b, l.frequency});
    }
    const bool first = !s.topology.has_value();
    s.topology = std::move(sol);
    for (const auto& n : body.nodes) {
        s.switch_table.upsert(n.callsign, n.position, ctx.now);
    }
    s.phase = EsPhase::Configured;
    ctx.out.push_back(CancelTimer{TimerKind::TopologyWait, {}});

    // Bring up the orderwire links mirroring the inter-switch beams.
    for (const auto& l : s.topology->links) {
        if (l.a == s.self) {
            ctx.out.push_back(EstablishLink{l.b});
        } else if (l.b == s.self) {
            ctx.out.push_back(EstablishLink{l.a});
        }
    }
    if (first) {
        ctx.out.push_back(NoteConfigured{});
    }
}

void es_on_user_pos(EsCtx& ctx, const Callsign& from, const UserPosBody& body) {
    EsState& s = ctx.s;
    if (s.user_table.contains(from)) {
        // Position report from a connected node; watch for a closer switch.
        s.user_table.upsert(from, body.position, body.time);
        const auto better =
            handoff_check(from, s.self, s.switch_table, body.position, ctx.cfg.movement_tolerance_m);
        if (better) {
            ctx.out.push_back(NoteHandoffInitiated{from, *better});
            HandoffBody h;
            h.redirect = *better;
            ctx.out.push_back(SendP2p{from, OrderwirePacket(h)});
            s.user_table.erase(from);
            if (s.beam_plan) {
                const auto result = topo::allocate_beams(s.position, s.user_table, ctx.cfg.beams,
                                                         ctx.cfg.max_beams, ctx.cfg.slots_per_beam);
                if (const auto* plan = std::get_if<topo::BeamPlan>(&result)) {
                    s.beam_plan = *plan;
                }
            }
        }
        return;
    }

    // Association request. Until the topology arrives this switch cannot
    // place the node; with the robustness fixes off it answers anyway, which
    // reproduces the partitioned-network failure.
    if (!s.configured() && ctx.cfg.fixes_enabled) {
        return;
    }
    if (s.configured()) {
        SwitchPositionTable table = s.switch_table;
        table.upsert(s.self, s.position, ctx.now);
        const auto nearest = table.nearest(body.position);
        if (nearest && *nearest != s.self) {
            return;  // the closer switch will answer
        }
    }
    s.pending_rns[from] = body.position;
    const double charge =
        ctx.cfg.k_bf * static_cast<double>(s.user_table.size() + 1) + ctx.cfg.k_el_2mb;
    ctx.arm(TimerKind::BeamCompute, charge, from);
}

void es_on_timer(EsCtx& ctx, const TimerExpiry& t) {
    EsState& s = ctx.s;
    switch (t.kind) {
        case TimerKind::MycallTimer: {
            if (s.phase == EsPhase::AwaitingPeers) {
                if (s.mycall_seen.empty()) {
                    if (!s.second_wait) {
                        s.second_wait = true;  // rebroadcast below, wait once more
                    } else {
                        s.phase = EsPhase::Master;
                        s.master = s.self;
                        s.master_startup = s.startup_time;
                        ctx.arm_compute();
                    }
                } else {
                    std::map<Callsign, SimTime> candidates = s.mycall_seen;
                    candidates[s.self] = s.startup_time;
                    const Callsign winner = elect_master(candidates);
                    if (winner == s.self) {
                        s.phase = EsPhase::Master;
                        s.master = s.self;
                        s.master_startup = s.startup_time;
                        for (const auto& [peer, startup] : s.mycall_seen) {
                            (void)startup;
                            ctx.begin_exchange(peer);
                        }
                    } else {
                        s.phase = EsPhase::Slave;
                        s.master = winner;
                        s.master_startup = s.mycall_seen.at(winner);
                        ctx.slave_arm_topology_wait();
                    }
                }
            }
            // Periodic callsign beacon in every phase; keeps merge and
            // failure recovery alive under loss.
            ctx.out.push_back(SendBroadcast{mycall_packet(s)});
            ctx.arm(TimerKind::MycallTimer, s.timer_t_s, {}, true);
            return;
        }
        case TimerKind::NewswitchRetry: {
            if (s.phase == EsPhase::Master && s.awaiting_switchpos.count(t.peer) != 0) {
                ctx.out.push_back(SendP2p{t.peer, OrderwirePacket(NewswitchBody{})});
                ctx.arm(TimerKind::NewswitchRetry, ctx.cfg.newswitch_retry_s, t.peer);
            }
            return;
        }
        case TimerKind::TopologyWait: {
            if ((s.phase == EsPhase::Slave || s.phase == EsPhase::AwaitingPeers) && !s.configured() &&
                s.master) {
                ctx.out.push_back(EstablishLink{*s.master});
                ctx.out.push_back(SendP2p{*s.master, switchpos_packet(s, ctx.now)});
                ctx.slave_arm_topology_wait();
            }
            return;
        }
        case TimerKind::TopologyCompute: {
            if (s.phase == EsPhase::Master && s.compute_armed && s.awaiting_switchpos.empty()) {
                s.compute_armed = false;
                s.switch_table.upsert(s.self, s.position, ctx.now);
                ctx.run_topology_and_distribute();
            }
            return;
        }
        case TimerKind::BeamCompute: {
            if (s.pending_rns.count(t.peer) != 0) {
                ctx.finish_beam_feasibility(t.peer);
            }
            return;
        }
        case TimerKind::RnRetry:
        case TimerKind::RnUpdate:
            return;  // not an edge-switch timer
    }
}

}  // namespace

EsStepResult step_es(EsState s, const NodeEvent& ev, SimTime now, const ProtocolConfig& cfg) {
    std::vector<Action> actions;
    EsCtx ctx{s, actions, now, cfg};

    struct Visitor {
        EsCtx& ctx;

        void operator()(const Boot&) const {
            EsState& s = ctx.s;
            s.phase = EsPhase::AwaitingPeers;
            s.switch_table.upsert(s.self, s.position, ctx.now);
            ctx.out.push_back(SendBroadcast{mycall_packet(s)});
            ctx.arm(TimerKind::MycallTimer, s.timer_t_s);
        }

        void operator()(const PacketArrival& p) const {
            struct BodyVisitor {
                EsCtx& ctx;
                const PacketArrival& arrival;
                void operator()(const MycallBody& b) const { es_on_mycall(ctx, arrival.from, b); }
                void operator()(const NewswitchBody&) const { es_on_newswitch(ctx, arrival.from); }
                void operator()(const SwitchposBody& b) const {
                    es_on_switchpos(ctx, arrival.from, b);
                }
                void operator()(const TopologyBody& b) const { es_on_topology(ctx, arrival.from, b); }
                void operator()(const UserPosBody& b) const { es_on_user_pos(ctx, arrival.from, b); }
                void operator()(const HandoffBody&) const {}   // switches do not take handoffs
                void operator()(const GvtUpdateBody&) const {}  // handled by the predictive layer
            };
            std::visit(BodyVisitor{ctx, p}, p.packet.body());
        }

        void operator()(const TimerExpiry& t) const { es_on_timer(ctx, t); }

        void operator()(const MasterFailed& m) const {
            EsState& s = ctx.s;
            if (m.failed == s.self) {
                return;
            }
            s.mycall_seen.erase(m.failed);
            s.switch_table.erase(m.failed);
            s.master.reset();
            s.master_startup.reset();
            s.topology.reset();
            s.awaiting_switchpos.clear();
            s.compute_armed = false;
            s.second_wait = false;
            s.phase = EsPhase::AwaitingPeers;
            ctx.out.push_back(CancelTimer{TimerKind::NewswitchRetry, {}});
            ctx.out.push_back(CancelTimer{TimerKind::TopologyCompute, {}});
            ctx.out.push_back(CancelTimer{TimerKind::TopologyWait, {}});
            ctx.out.push_back(SendBroadcast{mycall_packet(s)});
            ctx.arm(TimerKind::MycallTimer, s.timer_t_s);
        }

        void operator()(const PositionUpdate& p) const {
            EsState& s = ctx.s;
            s.position = p.position;
            s.switch_table.upsert(s.self, s.position, ctx.now);
            if (distance(p.position, s.last_reported_position) <= ctx.cfg.movement_tolerance_m) {
                return;
            }
            s.last_reported_position = p.position;
            if (s.phase == EsPhase::Master) {
                ctx.open_reconfig_round();
                if (s.awaiting_switchpos.empty() && !s.compute_armed) {
                    ctx.arm_compute();
                }
            } else if (s.phase != EsPhase::Booting) {
                // Signal the master that this switch moved.
                ctx.out.push_back(SendBroadcast{mycall_packet(s)});
            }
            // Connected remote nodes track this switch's position.
            if (s.beam_plan) {
                for (const auto& [cs, entry] : s.user_table.entries()) {
                    (void)entry;
                    const auto where = s.beam_plan->find(cs);
                    if (!where) {
                        continue;
                    }
                    HandoffBody h;
                    h.assignment = HandoffAssignment{s.beam_plan->beams[where->first].frequency,
                                                     where->second, s.position};
                    ctx.out.push_back(SendP2p{cs, OrderwirePacket(h)});
                }
            }
        }

        void operator()(const PeerLinkDown& p) const {
            EsState& s = ctx.s;
            if (s.user_table.contains(p.peer)) {
                s.user_table.erase(p.peer);
                if (s.beam_plan) {
                    const auto result = topo::allocate_beams(
                        s.position, s.user_table, ctx.cfg.beams, ctx.cfg.max_beams,
                        ctx.cfg.slots_per_beam);
                    if (const auto* plan = std::get_if<topo::BeamPlan>(&result)) {
                        s.beam_plan = *plan;
                    }
                }
            }
        }
    };
    std::visit(Visitor{ctx}, ev);
    return EsStepResult{std::move(s), std::move(actions)};
}

// --------------------------------------------------------------------------
// Remote node machine
// --------------------------------------------------------------------------

RnState make_rn(Callsign self, GeoPosition position) {
    RnState s;
    s.self = std::move(self);
    s.position = position;
    return s;
}

namespace {

OrderwirePacket user_pos_packet(const RnState& s, SimTime now) {
    return OrderwirePacket(UserPosBody{s.self, now, s.position});
}

}  // namespace

RnStepResult step_rn(RnState s, const NodeEvent& ev, SimTime now, const ProtocolConfig& cfg) {
    std::vector<Action> actions;

    struct Visitor {
        RnState& s;
        std::vector<Action>& out;
        SimTime now;
        const ProtocolConfig& cfg;

        void operator()(const Boot&) const {
            s.phase = RnPhase::AwaitingHandoff;
            out.push_back(SendBroadcast{user_pos_packet(s, now)});
            out.push_back(ArmTimer{TimerKind::RnRetry, cfg.rn_retry_s, {}, true});
        }

        void operator()(const PacketArrival& p) const {
            const auto* h = p.packet.get_if<HandoffBody>();
            if (h == nullptr) {
                return;
            }
            if (h->assignment) {
                const bool update = s.associated_es && *s.associated_es == p.from;
                const auto previous = s.associated_es;
                s.phase = RnPhase::Connected;
                s.associated_es = p.from;
                s.assigned = {h->assignment->frequency, h->assignment->slot};
                s.es_position = h->assignment->es_position;
                s.retry_count = 0;
                if (!update) {
                    out.push_back(EstablishLink{p.from});
                    if (previous && *previous != p.from) {
                        out.push_back(TearLink{*previous});
                    }
                    out.push_back(NoteRnConnected{p.from, previous});
                    out.push_back(ArmTimer{TimerKind::RnUpdate, cfg.rn_update_period_s});
                }
                return;
            }
            // Redirect: ask the named switch directly.
            s.phase = RnPhase::AwaitingHandoff;
            const auto previous = s.associated_es;
            s.associated_es.reset();
            s.assigned.reset();
            if (previous && *previous == p.from) {
                out.push_back(TearLink{*previous});
            }
            out.push_back(EstablishLink{*h->redirect});
            out.push_back(SendP2p{*h->redirect, user_pos_packet(s, now)});
            out.push_back(ArmTimer{TimerKind::RnRetry, cfg.rn_retry_s, {}, true});
        }

        void operator()(const TimerExpiry& t) const {
            switch (t.kind) {
                case TimerKind::RnRetry:
                    if (s.phase == RnPhase::AwaitingHandoff) {
                        ++s.retry_count;
                        out.push_back(SendBroadcast{user_pos_packet(s, now)});
                        out.push_back(ArmTimer{TimerKind::RnRetry, cfg.rn_retry_s, {}, true});
                    }
                    return;
                case TimerKind::RnUpdate:
                    if (s.phase == RnPhase::Connected && s.associated_es) {
                        out.push_back(SendP2p{*s.associated_es, user_pos_packet(s, now)});
                        out.push_back(ArmTimer{TimerKind::RnUpdate, cfg.rn_update_period_s});
                    }
                    return;
                default:
                    return;
            }
        }

        void operator()(const MasterFailed&) const {}

        void operator()(const PositionUpdate& p) const { s.position = p.position; }

        void operator()(const PeerLinkDown& p) const {
            if (s.associated_es && *s.associated_es == p.peer) {
                s.phase = RnPhase::AwaitingHandoff;
                s.associated_es.reset();
                s.assigned.reset();
                out.push_back(SendBroadcast{user_pos_packet(s, now)});
                out.push_back(ArmTimer{TimerKind::RnRetry, cfg.rn_retry_s, {}, true});
            }
        }
    };
    std::visit(Visitor{s, actions, now, cfg}, ev);
    return RnStepResult{std::move(s), std::move(actions)};
}

}  // namespace rdrn::ncp
