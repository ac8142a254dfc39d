#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rdrn/sim/rng.hpp"
#include "rdrn/topo/beams.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <vector>

using namespace rdrn;
using namespace rdrn::topo;

namespace {

SwitchPositionTable grid(int n, double spacing) {
    SwitchPositionTable t;
    const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
    for (int i = 0; i < n; ++i) {
        char name[16];
        std::snprintf(name, sizeof(name), "ES%02d", i + 1);
        t.upsert(Callsign(name), {spacing * (i % cols), spacing * (i / cols)}, SimTime{});
    }
    return t;
}

// Exhaustive reference search over all (fmax+1)^R labelings using the same
// preference order: fewest links, then lexicographically smallest labels.
std::optional<std::vector<int>> oracle_best_labels(const SwitchPositionTable& positions,
                                                   const BeamConstraints& c) {
    std::vector<TopologyNodeEntry> nodes;
    for (const auto& [cs, e] : positions.entries()) {
        nodes.push_back({cs, e.position});
    }
    const int n = static_cast<int>(nodes.size());
    struct Cand {
        int i, j;
    };
    std::vector<Cand> cands;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (distance(nodes[i].position, nodes[j].position) <= c.rlink_m) {
                cands.push_back({i, j});
            }
        }
    }
    const int r = static_cast<int>(cands.size());
    REQUIRE(r <= 8);

    std::optional<std::vector<int>> best;
    int best_links = 0;
    std::vector<int> labels(r, 0);
    const auto count_links = [&] {
        return static_cast<int>(std::count_if(labels.begin(), labels.end(),
                                              [](int v) { return v > 0; }));
    };
    std::int64_t total = 1;
    for (int k = 0; k < r; ++k) {
        total *= c.fmax + 1;
    }
    for (std::int64_t code = 0; code < total; ++code) {
        std::int64_t v = code;
        for (int k = r - 1; k >= 0; --k) {
            labels[k] = static_cast<int>(v % (c.fmax + 1));
            v /= c.fmax + 1;
        }
        bool valid = true;
        for (int a = 0; a < r && valid; ++a) {
            for (int b = a + 1; b < r && valid; ++b) {
                if (labels[a] == 0 || labels[a] != labels[b]) {
                    continue;
                }
                const LinkGeometry ga{nodes[cands[a].i].position, nodes[cands[a].j].position};
                const LinkGeometry gb{nodes[cands[b].i].position, nodes[cands[b].j].position};
                if (links_interfere(ga, gb, c) || links_interfere(gb, ga, c)) {
                    valid = false;
                }
            }
        }
        if (!valid) {
            continue;
        }
        // connectivity over chosen links
        std::vector<int> parent(n);
        for (int i = 0; i < n; ++i) {
            parent[i] = i;
        }
        const auto find = [&](int x) {
            while (parent[x] != x) {
                x = parent[x] = parent[parent[x]];
            }
            return x;
        };
        for (int k = 0; k < r; ++k) {
            if (labels[k] > 0) {
                parent[find(cands[k].i)] = find(cands[k].j);
            }
        }
        bool connected = true;
        for (int i = 1; i < n; ++i) {
            connected = connected && find(i) == find(0);
        }
        if (!connected) {
            continue;
        }
        const int nl = count_links();
        if (!best || nl < best_links || (nl == best_links && labels < *best)) {
            best = labels;
            best_links = nl;
        }
    }
    return best;
}

std::vector<int> labels_of(const TopologySolution& sol, const SwitchPositionTable& positions,
                           const BeamConstraints& c) {
    std::vector<TopologyNodeEntry> nodes;
    for (const auto& [cs, e] : positions.entries()) {
        nodes.push_back({cs, e.position});
    }
    const int n = static_cast<int>(nodes.size());
    std::vector<int> out;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (distance(nodes[i].position, nodes[j].position) > c.rlink_m) {
                continue;
            }
            int label = 0;
            for (const auto& l : sol.links) {
                if (l.a == nodes[i].callsign && l.b == nodes[j].callsign) {
                    label = l.frequency;
                }
            }
            out.push_back(label);
        }
    }
    return out;
}

}  // namespace

TEST_CASE("interference geometry") {
    BeamConstraints c;
    c.imult = 1.0;
    c.twidth_deg = 10.0;

    // collinear: l2's receiver halfway along l1's axis
    const LinkGeometry l1{{0, 0}, {100, 0}};
    const LinkGeometry l2{{200, 0}, {50, 0}};
    CHECK(links_interfere(l1, l2, c));

    // receiver 90 degrees off a 10 degree transmit sector
    const LinkGeometry side{{300, 0}, {0, 10}};
    CHECK_FALSE(links_interfere(l1, side, c));

    // zero interference multiplier never interferes
    BeamConstraints zero = c;
    zero.imult = 0.0;
    CHECK_FALSE(links_interfere(l1, l2, zero));

    // directional: conflict test is the OR of both orders
    const LinkGeometry a{{0, 0}, {100, 0}};
    const LinkGeometry b{{90, 1}, {95, 0}};
    CHECK(links_interfere(a, b, c) != links_interfere(b, a, c));
}

TEST_CASE("two switches get a single first-frequency link") {
    BeamConstraints c;
    const auto result = solve_topology(grid(2, 20.0), c);
    const auto* sol = std::get_if<TopologySolution>(&result);
    REQUIRE(sol != nullptr);
    REQUIRE(sol->links.size() == 1);
    CHECK(sol->links[0].frequency == 1);
    CHECK(sol->links[0].a.str() == "ES01");
    CHECK(sol->links[0].b.str() == "ES02");
    CHECK(!validate_solution(*sol, c).has_value());
}

TEST_CASE("single switch is trivially connected") {
    const auto result = solve_topology(grid(1, 20.0), BeamConstraints{});
    const auto* sol = std::get_if<TopologySolution>(&result);
    REQUIRE(sol != nullptr);
    CHECK(sol->links.empty());
}

TEST_CASE("solver equals the exhaustive oracle on a 4-switch grid") {
    BeamConstraints c;
    c.rlink_m = 25.0;  // keeps candidate links at <= 6 on a 20 m grid
    const auto positions = grid(4, 20.0);
    const auto result = solve_topology(positions, c);
    const auto* sol = std::get_if<TopologySolution>(&result);
    REQUIRE(sol != nullptr);
    const auto oracle = oracle_best_labels(positions, c);
    REQUIRE(oracle.has_value());
    CHECK(labels_of(*sol, positions, c) == *oracle);
    CHECK(!validate_solution(*sol, c).has_value());
}

TEST_CASE("solver equals the oracle on random instances") {
    sim::Rng rng(11);
    auto stream = rng.stream("topo-test");
    int checked = 0;
    for (int trial = 0; trial < 200; ++trial) {
        SwitchPositionTable t;
        const int n = 2 + static_cast<int>(stream.next_u64() % 3);
        for (int i = 0; i < n; ++i) {
            char name[16];
            std::snprintf(name, sizeof(name), "ES%02d", i + 1);
            t.upsert(Callsign(name), {stream.uniform(0, 60), stream.uniform(0, 60)}, SimTime{});
        }
        BeamConstraints c;
        c.rlink_m = 45.0;
        c.fmax = 1 + static_cast<int>(stream.next_u64() % 3);
        c.twidth_deg = 10.0 + stream.uniform(0, 30);
        c.imult = stream.uniform(0.0, 1.5);

        // keep within oracle reach
        int cand = 0;
        std::vector<GeoPosition> pos;
        for (const auto& [cs, e] : t.entries()) {
            pos.push_back(e.position);
        }
        for (std::size_t i = 0; i < pos.size(); ++i) {
            for (std::size_t j = i + 1; j < pos.size(); ++j) {
                cand += distance(pos[i], pos[j]) <= c.rlink_m;
            }
        }
        if (cand > 6) {
            continue;
        }
        ++checked;

        const auto result = solve_topology(t, c);
        const auto oracle = oracle_best_labels(t, c);
        if (const auto* sol = std::get_if<TopologySolution>(&result)) {
            REQUIRE(oracle.has_value());
            CHECK(labels_of(*sol, t, c) == *oracle);
            CHECK(!validate_solution(*sol, c).has_value());
        } else {
            CHECK(!oracle.has_value());
        }
    }
    CHECK(checked > 50);
}

TEST_CASE("adding a frequency never makes a feasible topology infeasible") {
    sim::Rng rng(23);
    auto stream = rng.stream("topo-mono");
    for (int trial = 0; trial < 60; ++trial) {
        SwitchPositionTable t;
        const int n = 2 + static_cast<int>(stream.next_u64() % 3);
        for (int i = 0; i < n; ++i) {
            char name[16];
            std::snprintf(name, sizeof(name), "ES%02d", i + 1);
            t.upsert(Callsign(name), {stream.uniform(0, 50), stream.uniform(0, 50)}, SimTime{});
        }
        BeamConstraints c;
        c.rlink_m = 80.0;
        c.fmax = 1 + static_cast<int>(stream.next_u64() % 2);
        c.imult = 1.0;
        c.twidth_deg = 30.0;
        const bool feasible = std::holds_alternative<TopologySolution>(solve_topology(t, c));
        BeamConstraints more = c;
        more.fmax = c.fmax + 1;
        const bool feasible_more = std::holds_alternative<TopologySolution>(solve_topology(t, more));
        if (feasible) {
            CHECK(feasible_more);
        }
    }
}

TEST_CASE("out-of-range switches are reported as disconnected") {
    SwitchPositionTable t;
    t.upsert(Callsign("ES01"), {0, 0}, SimTime{});
    t.upsert(Callsign("ES02"), {5000, 0}, SimTime{});
    const auto result = solve_topology(t, BeamConstraints{});
    const auto* inf = std::get_if<Infeasible>(&result);
    REQUIRE(inf != nullptr);
    CHECK(inf->reason == InfeasibleReason::DisconnectedBeyondRange);
}

TEST_CASE("stub topology links nearest neighbours and stays connected") {
    const auto positions = grid(5, 20.0);
    const auto result = stub_topology(positions, BeamConstraints{});
    const auto* sol = std::get_if<TopologySolution>(&result);
    REQUIRE(sol != nullptr);
    CHECK(sol->links.size() >= 4);
    // connectivity is part of the shared validator; frequency clashes are
    // not the stub's concern, so only check structure here.
    std::map<std::string, int> index;
    for (const auto& nd : sol->nodes) {
        index[nd.callsign.str()] = static_cast<int>(index.size());
    }
    std::vector<int> parent(index.size());
    for (std::size_t i = 0; i < parent.size(); ++i) {
        parent[i] = static_cast<int>(i);
    }
    const auto find = [&](int x) {
        while (parent[x] != x) {
            x = parent[x] = parent[parent[x]];
        }
        return x;
    };
    for (const auto& l : sol->links) {
        parent[find(index[l.a.str()])] = find(index[l.b.str()]);
    }
    for (std::size_t i = 1; i < parent.size(); ++i) {
        CHECK(find(static_cast<int>(i)) == find(0));
    }
}

namespace {

UserPositionTable rns_at_bearings(const GeoPosition& es, const std::vector<double>& bearings,
                                  double range) {
    UserPositionTable t;
    constexpr double kDegToRad = 3.141592653589793238462643383279502884 / 180.0;
    int i = 0;
    for (const double b : bearings) {
        char name[16];
        std::snprintf(name, sizeof(name), "RN%02d", ++i);
        t.upsert(Callsign(name),
                 {es.x + range * std::cos(b * kDegToRad), es.y + range * std::sin(b * kDegToRad)},
                 SimTime{});
    }
    return t;
}

}  // namespace

TEST_CASE("beam allocation clusters by bearing") {
    BeamConstraints c;
    c.twidth_deg = 45.0;
    const GeoPosition es{0, 0};

    SUBCASE("no remote nodes yields an empty plan") {
        const auto r = allocate_beams(es, {}, c, 4, 4);
        const auto* plan = std::get_if<BeamPlan>(&r);
        REQUIRE(plan != nullptr);
        CHECK(plan->beams.empty());
    }

    SUBCASE("two nodes three degrees apart share one beam") {
        const auto rns = rns_at_bearings(es, {40.0, 43.0}, 100.0);
        const auto r = allocate_beams(es, rns, c, 4, 4);
        const auto* plan = std::get_if<BeamPlan>(&r);
        REQUIRE(plan != nullptr);
        REQUIRE(plan->beams.size() == 1);
        CHECK(plan->beams[0].slots.size() == 2);
        CHECK(plan->beams[0].center_deg == doctest::Approx(41.5));
    }

    SUBCASE("five spread nodes exceed four beams") {
        BeamConstraints narrow = c;
        narrow.twidth_deg = 10.0;
        const auto rns = rns_at_bearings(es, {0.0, 90.0, 180.0, 270.0, 359.0}, 100.0);
        const auto r = allocate_beams(es, rns, narrow, 4, 4);
        CHECK(std::holds_alternative<BeamInfeasible>(r));
    }

    SUBCASE("slot capacity limits a cluster") {
        const auto rns = rns_at_bearings(es, {10.0, 11.0, 12.0}, 100.0);
        const auto r = allocate_beams(es, rns, c, 4, 2);
        CHECK(std::holds_alternative<BeamInfeasible>(r));
    }
}

TEST_CASE("beam plans keep every node inside its sector with exclusive slots") {
    sim::Rng rng(5);
    auto stream = rng.stream("beam-prop");
    for (int trial = 0; trial < 300; ++trial) {
        const GeoPosition es{0, 0};
        const int n = static_cast<int>(stream.next_u64() % 8);
        UserPositionTable t;
        for (int i = 0; i < n; ++i) {
            char name[16];
            std::snprintf(name, sizeof(name), "RN%02d", i + 1);
            const double ang = stream.uniform(0, 360);
            const double d = stream.uniform(1, 900);
            constexpr double kDegToRad = 3.141592653589793238462643383279502884 / 180.0;
            t.upsert(Callsign(name), {d * std::cos(ang * kDegToRad), d * std::sin(ang * kDegToRad)},
                     SimTime{});
        }
        BeamConstraints c;
        c.twidth_deg = 10.0 + stream.uniform(0, 50);
        const auto r = allocate_beams(es, t, c, 6, 4);
        const auto* plan = std::get_if<BeamPlan>(&r);
        if (!plan) {
            continue;
        }
        std::set<std::pair<int, int>> seen;
        std::set<std::string> assigned;
        for (std::size_t b = 0; b < plan->beams.size(); ++b) {
            for (const auto& [slot, cs] : plan->beams[b].slots) {
                CHECK(seen.insert({static_cast<int>(b), slot}).second);
                CHECK(assigned.insert(cs.str()).second);
                const double bearing = bearing_deg(es, t.find(cs)->position);
                double diff = std::fabs(bearing - plan->beams[b].center_deg);
                diff = std::fmod(diff, 360.0);
                if (diff > 180.0) {
                    diff = 360.0 - diff;
                }
                CHECK(diff <= plan->beams[b].width_deg / 2.0 + 1e-9);
            }
        }
        CHECK(assigned.size() == t.size());
    }
}

TEST_CASE("weight table sizing") {
    CHECK(weight_table_entries(8, 2, 4) == std::pair<std::int64_t, std::int64_t>{8, 256});
    CHECK(weight_table_entries(1, 1, 1) == std::pair<std::int64_t, std::int64_t>{1, 2});
    CHECK(weight_table_entries(8, 2, 1) == std::pair<std::int64_t, std::int64_t>{8, 4});
    CHECK_THROWS_AS(weight_table_entries(1, 63, 2), std::overflow_error);
    CHECK_THROWS_AS(weight_table_entries(0, 1, 1), std::invalid_argument);
}
