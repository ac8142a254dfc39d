#include "rdrn/topo/beams.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace rdrn::topo {

void BeamConstraints::validate() const {
    if (!(rlink_m > 0.0)) {
        throw std::invalid_argument("BeamConstraints: rlink must be positive");
    }
    if (fmax < 1) {
        throw std::invalid_argument("BeamConstraints: fmax must be >= 1");
    }
    if (imult < 0.0) {
        throw std::invalid_argument("BeamConstraints: imult must be >= 0");
    }
    if (!(twidth_deg > 0.0 && twidth_deg <= 360.0) || !(rwidth_deg > 0.0 && rwidth_deg <= 360.0)) {
        throw std::invalid_argument("BeamConstraints: beam widths must be in (0, 360]");
    }
}

namespace {

// Absolute angular difference in [0, 180].
double angle_diff_deg(double a, double b) {
    double d = std::fmod(std::fabs(a - b), 360.0);
    return d > 180.0 ? 360.0 - d : d;
}

struct UnionFind {
    std::vector<int> parent;

    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }

    int find(int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }

    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) {
            return false;
        }
        parent[b] = a;
        return true;
    }

    int components(int n) {
        int c = 0;
        for (int i = 0; i < n; ++i) {
            c += find(i) == i;
        }
        return c;
    }
};

}  // namespace

bool links_interfere(const LinkGeometry& l1, const LinkGeometry& l2, const BeamConstraints& c) {
    if (!is_finite(l1.transmitter) || !is_finite(l1.receiver) || !is_finite(l2.transmitter) ||
        !is_finite(l2.receiver)) {
        throw std::invalid_argument("links_interfere: non-finite endpoint");
    }
    const double radius = c.imult * distance(l1.transmitter, l1.receiver);
    if (radius <= 0.0) {
        return false;
    }
    const double d = distance(l1.transmitter, l2.receiver);
    if (d > radius) {
        return false;
    }
    if (d == 0.0) {
        return true;  // at the sector apex
    }
    const double axis = bearing_deg(l1.transmitter, l1.receiver);
    const double toward = bearing_deg(l1.transmitter, l2.receiver);
    return angle_diff_deg(axis, toward) <= c.twidth_deg / 2.0;
}

bool TopologySolution::contains_node(const Callsign& cs) const {
    return std::any_of(nodes.begin(), nodes.end(),
                       [&](const TopologyNodeEntry& n) { return n.callsign == cs; });
}

TopologyBody TopologySolution::to_packet_body() const {
    TopologyBody body;
    body.nodes = nodes;
    for (const auto& l : links) {
        body.links.push_back(TopologyLinkEntry{l.a, l.b, l.frequency});
    }
    return body;
}

std::string TopologySolution::dump() const {
    std::ostringstream os;
    os << "nodes " << nodes.size() << '\n';
    for (const auto& n : nodes) {
        os << "  " << n.callsign.str() << ' ' << n.position.x << ' ' << n.position.y << '\n';
    }
    os << "links " << links.size() << '\n';
    for (const auto& l : links) {
        os << "  " << l.a.str() << ' ' << l.b.str() << " f" << l.frequency << '\n';
    }
    return os.str();
}

namespace {

struct Candidate {
    int i = 0;
    int j = 0;
    LinkGeometry geom;  // canonical: lex-smaller callsign transmits
};

struct SearchSpace {
    std::vector<TopologyNodeEntry> nodes;
    std::vector<Candidate> candidates;
    std::vector<std::vector<bool>> conflict;
};

SearchSpace build_space(const SwitchPositionTable& positions, const BeamConstraints& c) {
    SearchSpace sp;
    for (const auto& [cs, entry] : positions.entries()) {
        sp.nodes.push_back(TopologyNodeEntry{cs, entry.position});
    }
    const int n = static_cast<int>(sp.nodes.size());
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (distance(sp.nodes[i].position, sp.nodes[j].position) <= c.rlink_m) {
                sp.candidates.push_back(
                    Candidate{i, j, LinkGeometry{sp.nodes[i].position, sp.nodes[j].position}});
            }
        }
    }
    const int r = static_cast<int>(sp.candidates.size());
    sp.conflict.assign(r, std::vector<bool>(r, false));
    for (int a = 0; a < r; ++a) {
        for (int b = a + 1; b < r; ++b) {
            const bool x = links_interfere(sp.candidates[a].geom, sp.candidates[b].geom, c) ||
                           links_interfere(sp.candidates[b].geom, sp.candidates[a].geom, c);
            sp.conflict[a][b] = x;
            sp.conflict[b][a] = x;
        }
    }
    return sp;
}

bool connected_with(const SearchSpace& sp, const std::vector<int>& labels) {
    const int n = static_cast<int>(sp.nodes.size());
    UnionFind uf(n);
    for (std::size_t k = 0; k < labels.size(); ++k) {
        if (labels[k] > 0) {
            uf.unite(sp.candidates[k].i, sp.candidates[k].j);
        }
    }
    return uf.components(n) == 1;
}

TopologySolution make_solution(const SearchSpace& sp, const std::vector<int>& labels) {
    TopologySolution sol;
    sol.nodes = sp.nodes;
    for (std::size_t k = 0; k < labels.size(); ++k) {
        if (labels[k] > 0) {
            sol.links.push_back(TopologyLink{sp.nodes[sp.candidates[k].i].callsign,
                                             sp.nodes[sp.candidates[k].j].callsign, labels[k]});
        }
    }
    return sol;
}

// Depth-first assignment in label-vector lexicographic order (no-link first)
// restricted to exactly `target` links. First hit is the lex-min labeling.
bool search_exact(const SearchSpace& sp, int target, int fmax, std::vector<int>& labels, int pos,
                  int used) {
    const int r = static_cast<int>(sp.candidates.size());
    if (used > target || used + (r - pos) < target) {
        return false;
    }
    if (pos == r) {
        return connected_with(sp, labels);
    }
    for (int label = 0; label <= fmax; ++label) {
        if (label > 0) {
            bool ok = true;
            for (int prev = 0; prev < pos; ++prev) {
                if (labels[prev] == label && sp.conflict[prev][pos]) {
                    ok = false;
                    break;
                }
            }
            if (!ok) {
                continue;
            }
        }
        labels[pos] = label;
        if (search_exact(sp, target, fmax, labels, pos + 1, used + (label > 0 ? 1 : 0))) {
            return true;
        }
    }
    labels[pos] = 0;
    return false;
}

}  // namespace

TopologyResult solve_topology(const SwitchPositionTable& positions, const BeamConstraints& c) {
    c.validate();
    if (positions.empty()) {
        throw std::invalid_argument("solve_topology: need at least one switch");
    }

    SearchSpace sp = build_space(positions, c);
    const int n = static_cast<int>(sp.nodes.size());
    const int r = static_cast<int>(sp.candidates.size());
    if (r > 32) {
        throw std::runtime_error("solve_topology: more candidate links than the search supports");
    }

    {
        UnionFind uf(n);
        for (const auto& cand : sp.candidates) {
            uf.unite(cand.i, cand.j);
        }
        if (uf.components(n) != 1) {
            return Infeasible{InfeasibleReason::DisconnectedBeyondRange,
                              "switches not connectable within rlink"};
        }
    }

    std::vector<int> labels(r, 0);
    for (int target = std::max(0, n - 1); target <= r; ++target) {
        std::fill(labels.begin(), labels.end(), 0);
        if (search_exact(sp, target, c.fmax, labels, 0, 0)) {
            return make_solution(sp, labels);
        }
    }
    return Infeasible{InfeasibleReason::FrequencyExhaustion,
                      "no interference-free frequency labeling connects the switches"};
}

TopologyResult stub_topology(const SwitchPositionTable& positions, const BeamConstraints& c) {
    c.validate();
    if (positions.empty()) {
        throw std::invalid_argument("stub_topology: need at least one switch");
    }
    SearchSpace sp;
    for (const auto& [cs, entry] : positions.entries()) {
        sp.nodes.push_back(TopologyNodeEntry{cs, entry.position});
    }
    const int n = static_cast<int>(sp.nodes.size());
    UnionFind uf(n);
    std::vector<std::pair<int, int>> edges;

    for (int i = 0; i < n; ++i) {
        int best = -1;
        double best_d = 0.0;
        for (int j = 0; j < n; ++j) {
            if (i == j) {
                continue;
            }
            const double d = distance(sp.nodes[i].position, sp.nodes[j].position);
            if (best < 0 || d < best_d) {
                best = j;
                best_d = d;
            }
        }
        if (best >= 0) {
            const auto e = std::minmax(i, best);
            if (std::find(edges.begin(), edges.end(), std::pair<int, int>(e.first, e.second)) ==
                edges.end()) {
                edges.emplace_back(e.first, e.second);
                uf.unite(e.first, e.second);
            }
        }
    }

    // Chain remaining components by their closest cross pair.
    while (uf.components(n) > 1) {
        int bi = -1, bj = -1;
        double best_d = 0.0;
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                if (uf.find(i) == uf.find(j)) {
                    continue;
                }
                const double d = distance(sp.nodes[i].position, sp.nodes[j].position);
                if (bi < 0 || d < best_d) {
                    bi = i;
                    bj = j;
                    best_d = d;
                }
            }
        }
        edges.emplace_back(bi, bj);
        uf.unite(bi, bj);
    }

    std::sort(edges.begin(), edges.end());
    TopologySolution sol;
    sol.nodes = sp.nodes;
    int f = 1;
    for (const auto& [i, j] : edges) {
        sol.links.push_back(TopologyLink{sp.nodes[i].callsign, sp.nodes[j].callsign, f});
        f = f % c.fmax + 1;
    }
    return sol;
}

std::optional<std::string> validate_solution(const TopologySolution& s, const BeamConstraints& c) {
    std::map<Callsign, GeoPosition> pos;
    std::map<Callsign, int> index;
    for (const auto& nd : s.nodes) {
        pos[nd.callsign] = nd.position;
        index[nd.callsign] = static_cast<int>(index.size());
    }

    UnionFind uf(static_cast<int>(s.nodes.size()));
    for (const auto& l : s.links) {
        if (index.count(l.a) == 0 || index.count(l.b) == 0) {
            return "link endpoint not in node list";
        }
        if (l.frequency < 1 || l.frequency > c.fmax) {
            return "frequency label out of range";
        }
        if (distance(pos[l.a], pos[l.b]) > c.rlink_m) {
            return "link longer than rlink";
        }
        uf.unite(index[l.a], index[l.b]);
    }
    if (!s.nodes.empty() && uf.components(static_cast<int>(s.nodes.size())) != 1) {
        return "link graph not connected";
    }
    for (std::size_t a = 0; a < s.links.size(); ++a) {
        for (std::size_t b = a + 1; b < s.links.size(); ++b) {
            if (s.links[a].frequency != s.links[b].frequency) {
                continue;
            }
            const LinkGeometry ga{pos[s.links[a].a], pos[s.links[a].b]};
            const LinkGeometry gb{pos[s.links[b].a], pos[s.links[b].b]};
            if (links_interfere(ga, gb, c) || links_interfere(gb, ga, c)) {
                return "interfering links share a frequency";
            }
        }
    }
    return std::nullopt;
}

std::optional<std::pair<int, int>> BeamPlan::find(const Callsign& rn) const {
    for (std::size_t b = 0; b < beams.size(); ++b) {
        for (const auto& [slot, cs] : beams[b].slots) {
            if (cs == rn) {
                return std::make_pair(static_cast<int>(b), slot);
            }
        }
    }
    return std::nullopt;
}

BeamPlanResult allocate_beams(const GeoPosition& es, const UserPositionTable& rns,
                              const BeamConstraints& c, int max_beams, int slots_per_beam) {
    c.validate();
    if (max_beams < 1 || slots_per_beam < 1) {
        throw std::invalid_argument("allocate_beams: max_beams and slots_per_beam must be >= 1");
    }

    struct RnBearing {
        double bearing;
        Callsign cs;
    };
    std::vector<RnBearing> order;
    for (const auto& [cs, entry] : rns.entries()) {
        if (distance(es, entry.position) > c.rlink_m) {
            return BeamInfeasible{"remote node " + cs.str() + " beyond rlink"};
        }
        order.push_back(RnBearing{bearing_deg(es, entry.position), cs});
    }
    std::sort(order.begin(), order.end(), [](const RnBearing& a, const RnBearing& b) {
        if (a.bearing != b.bearing) {
            return a.bearing < b.bearing;
        }
        return a.cs < b.cs;
    });

    BeamPlan plan;
    plan.slots_per_beam = slots_per_beam;

    std::size_t i = 0;
    while (i < order.size()) {
        const double start = order[i].bearing;
        std::size_t j = i;
        while (j + 1 < order.size() && order[j + 1].bearing - start <= c.twidth_deg) {
            ++j;
        }
        const std::size_t cluster_size = j - i + 1;
        if (cluster_size > static_cast<std::size_t>(slots_per_beam)) {
            return BeamInfeasible{"cluster exceeds slots per beam"};
        }
        Beam beam;
        beam.center_deg = (start + order[j].bearing) / 2.0;
        beam.width_deg = c.twidth_deg;
        int slot = 0;
        for (std::size_t k = i; k <= j; ++k) {
            beam.slots[slot++] = order[k].cs;
        }
        plan.beams.push_back(std::move(beam));
        i = j + 1;
    }

    if (plan.beams.size() > static_cast<std::size_t>(max_beams)) {
        return BeamInfeasible{"more beams required than available"};
    }

    // Overlapping sectors at one switch need distinct frequencies.
    for (std::size_t b = 0; b < plan.beams.size(); ++b) {
        int f = 1;
        for (bool retry = true; retry;) {
            retry = false;
            for (std::size_t p = 0; p < b; ++p) {
                const bool overlap =
                    angle_diff_deg(plan.beams[p].center_deg, plan.beams[b].center_deg) <
                    c.twidth_deg;
                if (overlap && plan.beams[p].frequency == f) {
                    ++f;
                    retry = true;
                    break;
                }
            }
        }
        if (f > c.fmax) {
            return BeamInfeasible{"overlapping beams exhaust frequencies"};
        }
        plan.beams[b].frequency = f;
    }

    return plan;
}

std::pair<std::int64_t, std::int64_t> weight_table_entries(int k_el, int m_bits_per_symbol,
                                                           int b_beams) {
    if (k_el < 1 || m_bits_per_symbol < 1 || b_beams < 1) {
        throw std::invalid_argument("weight_table_entries: all arguments must be >= 1");
    }
    const long long exp = static_cast<long long>(m_bits_per_symbol) * b_beams;
    if (exp > 62) {
        throw std::overflow_error("weight_table_entries: 2^(m*b) exceeds 64-bit range");
    }
    return {k_el, static_cast<std::int64_t>(1) << exp};
}

}  // namespace rdrn::topo
