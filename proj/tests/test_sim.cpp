#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rdrn/sim/channels.hpp"
#include "rdrn/sim/event_queue.hpp"
#include "rdrn/sim/mobility.hpp"
#include "rdrn/sim/rng.hpp"
#include "rdrn/sim/traffic.hpp"
#include "rdrn/sim/trace.hpp"

#include <numeric>

using namespace rdrn;
using namespace rdrn::sim;

TEST_CASE("events dispatch in time order with schedule-order tiebreak") {
    EventQueue q;
    std::vector<int> order;
    q.schedule(SimTime::from_ms(10), [&] { order.push_back(2); });
    q.schedule(SimTime::from_ms(5), [&] { order.push_back(1); });
    q.schedule(SimTime::from_ms(10), [&] { order.push_back(3); });
    CHECK(q.run_until(SimTime::from_ms(100)) == 3);
    CHECK(order == std::vector<int>{1, 2, 3});
    CHECK(q.now() == SimTime::from_ms(100));
}

TEST_CASE("run_until with empty queue dispatches nothing") {
    EventQueue q;
    CHECK(q.run_until(SimTime{}) == 0);
}

TEST_CASE("scheduling in the past is rejected") {
    EventQueue q;
    q.schedule(SimTime::from_ms(10), [] {});
    q.run_until(SimTime::from_ms(20));
    CHECK_THROWS_AS(q.schedule(SimTime::from_ms(5), [] {}), std::logic_error);
}

TEST_CASE("clock is monotone across dispatch") {
    EventQueue q;
    std::vector<std::int64_t> times;
    for (int i = 0; i < 50; ++i) {
        q.schedule(SimTime::from_ms(100 - i), [&, i] { times.push_back(q.now().millis()); });
    }
    q.run_all();
    CHECK(std::is_sorted(times.begin(), times.end()));
}

namespace {

struct Sink {
    std::vector<std::tuple<std::string, std::string, PacketKind>> received;

    BroadcastChannel::Deliver fn() {
        return [this](const Callsign& dst, const Callsign& src, const OrderwirePacket& p) {
            received.emplace_back(dst.str(), src.str(), p.kind());
        };
    }
};

OrderwirePacket mycall(const std::string& cs) {
    return OrderwirePacket(MycallBody{Callsign(cs), SimTime::from_ms(0)});
}

}  // namespace

TEST_CASE("single broadcast reaches every other attached node") {
    EventQueue q;
    Rng rng(1);
    BroadcastChannel ch(q, rng.stream("loss"));
    Sink sink;
    ch.set_deliver(sink.fn());
    for (const char* n : {"ES01", "ES02", "ES03"}) {
        ch.attach(Callsign(n));
    }
    ch.transmit(Callsign("ES01"), mycall("ES01"));
    q.run_all();
    CHECK(sink.received.size() == 2);
    CHECK(ch.stats().collided == 0);
}

TEST_CASE("overlapping broadcasts collide and deliver to nobody") {
    EventQueue q;
    Rng rng(1);
    BroadcastChannel ch(q, rng.stream("loss"));
    Sink sink;
    ch.set_deliver(sink.fn());
    for (const char* n : {"ES01", "ES02", "ES03"}) {
        ch.attach(Callsign(n));
    }
    // MYCALL occupies 104 bits / 19200 bps ~ 6 ms; start 2 ms apart.
    ch.transmit(Callsign("ES01"), mycall("ES01"));
    q.schedule(SimTime::from_ms(2), [&] { ch.transmit(Callsign("ES02"), mycall("ES02")); });
    q.run_all();
    CHECK(sink.received.empty());
    CHECK(ch.stats().collided == 2);

    // Non-overlapping transmissions both deliver.
    q.schedule(SimTime::from_ms(100), [&] { ch.transmit(Callsign("ES01"), mycall("ES01")); });
    q.schedule(SimTime::from_ms(200), [&] { ch.transmit(Callsign("ES02"), mycall("ES02")); });
    q.run_all();
    CHECK(sink.received.size() == 4);
}

TEST_CASE("drop probability one suppresses every delivery of that kind") {
    EventQueue q;
    Rng rng(1);
    BroadcastChannel ch(q, rng.stream("loss"));
    Sink sink;
    ch.set_deliver(sink.fn());
    ch.attach(Callsign("ES01"));
    ch.attach(Callsign("ES02"));
    DropTable drops;
    drops.set(PacketKind::Mycall, 1.0);
    ch.set_drop_table(drops);
    for (int i = 0; i < 5; ++i) {
        q.schedule(SimTime::from_ms(i * 50), [&] { ch.transmit(Callsign("ES01"), mycall("ES01")); });
    }
    q.run_all();
    CHECK(sink.received.empty());
    // Unrelated kinds still get through.
    q.schedule(q.now(), [&] {
        ch.transmit(Callsign("ES01"), OrderwirePacket(UserPosBody{Callsign("ES01"), SimTime{}, {0, 0}}));
    });
    q.run_all();
    CHECK(sink.received.size() == 1);
}

TEST_CASE("broadcast range limits listeners") {
    EventQueue q;
    Rng rng(1);
    BroadcastChannel ch(q, rng.stream("loss"));
    Sink sink;
    ch.set_deliver(sink.fn());
    ch.set_range_m(50.0);
    ch.set_position_lookup([](const Callsign& c) {
        if (c.str() == "ES01") return GeoPosition{0, 0};
        if (c.str() == "ES02") return GeoPosition{30, 0};
        return GeoPosition{1000, 0};
    });
    for (const char* n : {"ES01", "ES02", "ES03"}) {
        ch.attach(Callsign(n));
    }
    ch.transmit(Callsign("ES01"), mycall("ES01"));
    q.run_all();
    REQUIRE(sink.received.size() == 1);
    CHECK(std::get<0>(sink.received[0]) == "ES02");
}

TEST_CASE("point-to-point latency matches the measured per-kind times") {
    EventQueue q;
    Rng rng(1);
    P2pNetwork net(q, rng.stream("loss"));
    std::vector<std::pair<PacketKind, std::int64_t>> arrivals;
    net.set_deliver([&](const Callsign&, const Callsign&, const OrderwirePacket& p) {
        arrivals.emplace_back(p.kind(), q.now().millis());
    });
    net.establish(Callsign("ES01"), Callsign("ES02"));
    net.send(Callsign("ES01"), Callsign("ES02"), OrderwirePacket(NewswitchBody{}));
    q.run_all();
    REQUIRE(arrivals.size() == 1);
    CHECK(arrivals[0].second == 439);

    net.send(Callsign("ES02"), Callsign("ES01"),
             OrderwirePacket(SwitchposBody{SimTime{}, {0, 0}}));
    q.run_all();
    REQUIRE(arrivals.size() == 2);
    CHECK(arrivals[1].second - 439 == 679);
}

TEST_CASE("each directed link is serialized and in order") {
    EventQueue q;
    Rng rng(1);
    P2pNetwork net(q, rng.stream("loss"));
    std::vector<PacketKind> arrivals;
    net.set_deliver([&](const Callsign&, const Callsign&, const OrderwirePacket& p) {
        arrivals.push_back(p.kind());
    });
    net.establish(Callsign("A"), Callsign("B"));
    // TOPOLOGY (664 ms) then HANDOFF (473 ms): raw latencies would reorder.
    TopologyBody topo;
    net.send(Callsign("A"), Callsign("B"), OrderwirePacket(topo));
    HandoffBody h;
    h.redirect = Callsign("X");
    net.send(Callsign("A"), Callsign("B"), OrderwirePacket(h));
    q.run_all();
    REQUIRE(arrivals.size() == 2);
    CHECK(arrivals[0] == PacketKind::Topology);
    CHECK(arrivals[1] == PacketKind::Handoff);
}

TEST_CASE("delivered p2p sequence is a prefix-preserving subsequence under loss") {
    EventQueue q;
    Rng rng(3);
    P2pNetwork net(q, rng.stream("loss"));
    std::vector<int> delivered;
    net.set_deliver([&](const Callsign&, const Callsign&, const OrderwirePacket& p) {
        delivered.push_back(static_cast<int>(p.as<GvtUpdateBody>().lvt.millis()));
    });
    DropTable drops;
    drops.set(PacketKind::GvtUpdate, 0.3);
    net.set_drop_table(drops);
    net.establish(Callsign("A"), Callsign("B"));
    for (int i = 0; i < 50; ++i) {
        net.send(Callsign("A"), Callsign("B"),
                 OrderwirePacket(GvtUpdateBody{Callsign("A"), SimTime::from_ms(i)}));
    }
    q.run_all();
    CHECK(delivered.size() < 50);
    CHECK(std::is_sorted(delivered.begin(), delivered.end()));
}

TEST_CASE("sending without a link raises link-absent") {
    EventQueue q;
    Rng rng(1);
    P2pNetwork net(q, rng.stream("loss"));
    CHECK_THROWS_WITH_AS(net.send(Callsign("A"), Callsign("B"), OrderwirePacket(NewswitchBody{})),
                         doctest::Contains("link absent"), std::runtime_error);
    net.establish(Callsign("A"), Callsign("B"));
    net.teardown(Callsign("A"), Callsign("B"));
    CHECK_THROWS_AS(net.send(Callsign("A"), Callsign("B"), OrderwirePacket(NewswitchBody{})),
                    std::runtime_error);
}

TEST_CASE("mobility advances linearly and resamples reproducibly") {
    MobilityState m;
    m.position = {1, 2};
    m.speed_mps = 5.0;
    m.direction_deg = 0.0;
    m.max_speed_mps = 5.0;

    const auto moved = mobility_step(m, 2.0);
    CHECK(moved.position.x == doctest::Approx(11.0));
    CHECK(moved.position.y == doctest::Approx(2.0));

    const auto still = mobility_step(MobilityState{{1, 2}, 0.0, 90.0, 5.0}, 100.0);
    CHECK(still.position.x == doctest::Approx(1.0));
    CHECK(still.position.y == doctest::Approx(2.0));

    Rng rng(42);
    auto s1 = rng.stream("mobility");
    auto s2 = rng.stream("mobility");
    const auto r1 = resample_on_handoff(m, s1);
    const auto r2 = resample_on_handoff(m, s2);
    CHECK(r1.speed_mps == r2.speed_mps);
    CHECK(r1.direction_deg == r2.direction_deg);
    CHECK(r1.speed_mps >= 0.0);
    CHECK(r1.speed_mps <= m.max_speed_mps);
    CHECK(r1.direction_deg >= 0.0);
    CHECK(r1.direction_deg < 360.0);

    CHECK_THROWS_AS(mobility_step(m, -0.1), std::invalid_argument);
}

TEST_CASE("poisson call source hits the configured means") {
    Rng rng(7);
    TrafficModel tm;  // 1200 s inter-setup, 600 s duration
    PoissonCallSource src(tm, rng.stream("traffic"));
    const int n = 10000;
    double sum_gap = 0.0;
    double sum_dur = 0.0;
    SimTime prev;
    for (int i = 0; i < n; ++i) {
        const Call c = src.next();
        sum_gap += static_cast<double>(c.setup.diff_ms(prev)) / 1000.0;
        sum_dur += static_cast<double>(c.teardown.diff_ms(c.setup)) / 1000.0;
        prev = c.setup;
    }
    CHECK(sum_gap / n == doctest::Approx(1200.0).epsilon(0.05));
    CHECK(sum_dur / n == doctest::Approx(600.0).epsilon(0.05));

    PoissonCallSource empty(tm, rng.stream("traffic2"));
    CHECK(empty.calls_until(SimTime{}).empty());
}

TEST_CASE("named substreams are independent of one another") {
    Rng rng(9);
    auto a1 = rng.stream("mobility");
    auto b = rng.stream("loss");
    (void)b.next_u64();
    (void)b.next_u64();
    auto a2 = rng.stream("mobility");
    CHECK(a1.next_u64() == a2.next_u64());
}

TEST_CASE("trace lines carry time node kind detail") {
    TraceLog log;
    log.record(SimTime::from_ms(42), "ES01", "MYCALL", "broadcast");
    CHECK(log.lines().size() == 1);
    CHECK(log.lines()[0] == "42 ES01 MYCALL broadcast");
}
