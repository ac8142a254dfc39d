#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rdrn/perf/models.hpp"

#include <algorithm>
#include <cmath>

using namespace rdrn;
using namespace rdrn::perf;

TEST_CASE("phase1 matches hand-computed values") {
    TimingConstants tc;
    tc.k_top = 0.0;
    // n=1: max term degenerates to T, no exchange, single TOPOLOGY cost.
    CHECK(phase1_time(1, 20.0, 3, 3, tc) == doctest::Approx(20.664).epsilon(1e-12));

    tc.k_top = 0.01;
    // max[20, 1.862] + 0.01*(9 + 64) + 0.664 + 0.2
    CHECK(phase1_time(3, 20.0, 3, 3, tc) == doctest::Approx(21.594).epsilon(1e-12));
}

TEST_CASE("phase1 grows with n") {
    TimingConstants tc;
    tc.k_top = 0.001;
    double prev = 0.0;
    for (int n = 1; n <= 20; ++n) {
        const double v = phase1_time(n, 20.0, 3, n, tc);
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("phase2 matches hand-computed values") {
    TimingConstants tc;  // k_bf = 1.875, k_el_2mb = 2.0
    CHECK(phase2_time(0, tc) == 0.0);
    CHECK(phase2_time(1, tc) == doctest::Approx(4.552).epsilon(1e-12));
    // 2.708 + [4*(3.875) + 6*(5.75) + 4*(7.625) + 1*(9.5)]
    CHECK(phase2_time(4, tc) == doctest::Approx(92.708).epsilon(1e-12));
}

TEST_CASE("phase3 composes the handoff packet with phase2") {
    TimingConstants tc;
    CHECK(phase3_time(0, tc) == doctest::Approx(5.025).epsilon(1e-12));
    for (int u = 0; u <= 10; ++u) {
        CHECK(std::fabs(phase3_time(u, tc) - phase2_time(u + 1, tc) - 0.473) < 1e-9);
    }
}

TEST_CASE("phase2 at least doubles per added node once combinations dominate") {
    TimingConstants tc;
    for (int u = 3; u <= 12; ++u) {
        CHECK(phase2_time(u + 1, tc) / phase2_time(u, tc) >= 2.0);
    }
}

TEST_CASE("aloha update rate and conservation") {
    AlohaModel a;
    a.packet_bits = 400;
    CHECK(aloha_max_update_rate(10, a) == doctest::Approx(51.84).epsilon(1e-12));

    // Offered load at the computed rate equals the usable capacity exactly.
    for (int n : {5, 10, 17, 30}) {
        const double rate = aloha_max_update_rate(n, a, 0.25);
        const double offered =
            rate / 60.0 * n * effective_update_bits(a) * 1.25;
        CHECK(offered == doctest::Approx(0.18 * 19200.0).epsilon(1e-12));
    }
}

TEST_CASE("rate is inversely proportional to the node count") {
    AlohaModel a;
    for (int n : {5, 8, 12}) {
        CHECK(aloha_max_update_rate(2 * n, a) ==
              doctest::Approx(aloha_max_update_rate(n, a) / 2.0).epsilon(1e-12));
    }
}

TEST_CASE("virtual twin load factor") {
    CHECK(vnc_load_factor(400) == doctest::Approx(2.1625).epsilon(1e-12));
    AlohaModel off;
    off.packet_bits = 400;
    AlohaModel on = off;
    on.vnc_enabled = true;
    CHECK(aloha_max_update_rate(10, off) / aloha_max_update_rate(10, on) ==
          doctest::Approx(2.1625).epsilon(1e-12));
    for (int bits = 130; bits <= 4000; bits += 37) {
        const double f = vnc_load_factor(bits);
        CHECK(f > 2.0);
        CHECK(f <= 2.5);
    }
}

TEST_CASE("csv emitters have stable schemas") {
    CHECK(phase1_csv(3, 20.0, 3, 3).rfind("n,p1_seconds\n", 0) == 0);
    CHECK(phase23_csv(2).rfind("u,p2_seconds,p3_seconds\n", 0) == 0);
    AlohaModel a;
    const auto csv = aloha_csv(5, 7, a);
    CHECK(csv.rfind("num_rn,updates_per_min_novnc,updates_per_min_vnc\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}

TEST_CASE("argument validation") {
    CHECK_THROWS_AS(phase1_time(0, 20.0, 3, 3), std::invalid_argument);
    CHECK_THROWS_AS(phase2_time(-1), std::invalid_argument);
    AlohaModel a;
    CHECK_THROWS_AS(aloha_max_update_rate(0, a), std::invalid_argument);
    a.efficiency = 1.5;
    CHECK_THROWS_AS(aloha_max_update_rate(5, a), std::invalid_argument);
}
