#pragma once

#include "rdrn/domain/packet.hpp"
#include "rdrn/domain/tables.hpp"
#include "rdrn/domain/types.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace rdrn::topo {

// Antenna-beam constraints on inter-switch links and remote-node beams.
struct BeamConstraints {
    double rlink_m = 1000.0;     // maximum beam distance
    int fmax = 3;                // non-interfering frequency pairs
    double imult = 1.0;          // interference multiplier
    double twidth_deg = 10.0;    // transmit beam width
    double rwidth_deg = 10.0;    // receive beam width

    void validate() const;
};

// Directed link geometry: a beam from transmitter toward receiver.
struct LinkGeometry {
    GeoPosition transmitter;
    GeoPosition receiver;
};

// True when l2's receiver falls inside l1's interference region: the disk of
// radius imult * len(l1) around l1's transmitter, intersected with l1's
// transmit sector of half-angle twidth/2 about the beam axis. Directional by
// construction; the search uses the OR of both argument orders.
bool links_interfere(const LinkGeometry& l1, const LinkGeometry& l2, const BeamConstraints& c);

struct TopologyLink {
    Callsign a;
    Callsign b;
    int frequency = 1;

    bool operator==(const TopologyLink&) const = default;
};

// A connected inter-switch link set with non-interfering frequency labels.
struct TopologySolution {
    std::vector<TopologyNodeEntry> nodes;  // callsign-sorted
    std::vector<TopologyLink> links;       // candidate order

    bool contains_node(const Callsign& cs) const;
    TopologyBody to_packet_body() const;
    std::string dump() const;

    bool operator==(const TopologySolution&) const = default;
};

enum class InfeasibleReason {
    DisconnectedBeyondRange,
    FrequencyExhaustion,
};

struct Infeasible {
    InfeasibleReason reason;
    std::string detail;
};

using TopologyResult = std::variant<TopologySolution, Infeasible>;

// Labels each candidate link (pairs within rlink) with no-link or a
// frequency, backtracking on pairwise interference conflicts, and returns
// the connected labeling with the fewest links, ties broken by the
// lexicographically smallest label vector (no-link < f1 < ... < fmax).
TopologyResult solve_topology(const SwitchPositionTable& positions, const BeamConstraints& c);

// Nearest-neighbour stand-in for the full search; used when a scenario asks
// for the fast stub. Connects every node to its nearest neighbour and chains
// any remaining components by their closest pair, cycling frequencies.
TopologyResult stub_topology(const SwitchPositionTable& positions, const BeamConstraints& c);

// Validates a solution against the type's own invariants, independently of
// how the search produced it. Returns an explanation for the first violation.
std::optional<std::string> validate_solution(const TopologySolution& s, const BeamConstraints& c);

struct Beam {
    double center_deg = 0.0;
    double width_deg = 0.0;
    int frequency = 1;
    std::map<int, Callsign> slots;  // slot id -> remote node
};

struct BeamPlan {
    std::vector<Beam> beams;
    int slots_per_beam = 4;

    // (beam index, slot id) of a remote node, if assigned.
    std::optional<std::pair<int, int>> find(const Callsign& rn) const;
};

struct BeamInfeasible {
    std::string detail;
};

using BeamPlanResult = std::variant<BeamPlan, BeamInfeasible>;

// Greedy angular clustering: remote nodes sorted by bearing from the switch,
// consecutive nodes grouped while the cluster's angular extent fits twidth.
// Beam center is the midpoint of the cluster extent; slots assigned in
// bearing order. Clusters do not wrap through 0 degrees.
BeamPlanResult allocate_beams(const GeoPosition& es, const UserPositionTable& rns,
                              const BeamConstraints& c, int max_beams, int slots_per_beam);

// Count and size of the antenna weight tables: k_el tables of 2^(m*b)
// entries. Sizing only; the weights themselves are out of scope.
std::pair<std::int64_t, std::int64_t> weight_table_entries(int k_el, int m_bits_per_symbol,
                                                           int b_beams);

}  // namespace rdrn::topo
