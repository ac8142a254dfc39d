#include "rdrn/perf/models.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace rdrn::perf {

double TimingConstants::latency_s(PacketKind k) const {
    switch (k) {
        case PacketKind::Mycall:
            return mycall;
        case PacketKind::Newswitch:
            return newswitch;
        case PacketKind::Switchpos:
            return switchpos;
        case PacketKind::Topology:
            return topology;
        case PacketKind::UserPos:
            return user_pos;
        case PacketKind::Handoff:
            return handoff;
        case PacketKind::GvtUpdate:
            // Not part of the measured set; same order as MYCALL (similar size).
            return mycall;
    }
    throw std::invalid_argument("latency_s: unknown packet kind");
}

double phase1_time(int n, double timer_t, int freq_pairs, int constrained_links,
                   const TimingConstants& tc) {
    if (n < 1) {
        throw std::invalid_argument("phase1_time: n must be >= 1");
    }
    if (freq_pairs < 0 || constrained_links < 0) {
        throw std::invalid_argument("phase1_time: negative label counts");
    }
    const double exchange = (tc.newswitch + tc.mycall) * static_cast<double>(n - 1);
    const double labelings = std::pow(static_cast<double>(freq_pairs + 1),
                                      static_cast<double>(constrained_links));
    const double search = tc.k_top * (static_cast<double>(n) * n + labelings);
    const double distribute = tc.topology + tc.topology_per_es * static_cast<double>(n - 1);
    return std::max(timer_t, exchange) + search + distribute;
}

namespace {

// C(n, r) in double; exact for the ranges the model is used in.
double binomial(int n, int r) {
    double v = 1.0;
    for (int i = 1; i <= r; ++i) {
        v *= static_cast<double>(n - r + i) / static_cast<double>(i);
    }
    return v;
}

}  // namespace

double phase2_time(int u, const TimingConstants& tc) {
    if (u < 0) {
        throw std::invalid_argument("phase2_time: u must be >= 0");
    }
    if (u > 1000) {
        throw std::overflow_error("phase2_time: combination sum overflows for u > 1000");
    }
    double total = tc.user_pos * static_cast<double>(u);
    for (int r = 1; r <= u; ++r) {
        total += binomial(u, r) * (tc.k_bf * static_cast<double>(r) + tc.k_el_2mb);
    }
    return total;
}

double phase3_time(int u_at_new_es, const TimingConstants& tc) {
    return tc.handoff + phase2_time(u_at_new_es + 1, tc);
}

int effective_update_bits(const AlohaModel& a) {
    if (a.packet_bits <= 0) {
        throw std::invalid_argument("effective_update_bits: packet_bits must be positive");
    }
    if (!a.vnc_enabled) {
        return a.packet_bits;
    }
    return 2 * a.packet_bits + wire::kVncHeaderBits;
}

double vnc_load_factor(int packet_bits) {
    if (packet_bits <= 0) {
        throw std::invalid_argument("vnc_load_factor: packet_bits must be positive");
    }
    return 2.0 + static_cast<double>(wire::kVncHeaderBits) / static_cast<double>(packet_bits);
}

double aloha_max_update_rate(int num_rn, const AlohaModel& a, double handoff_fraction) {
    if (num_rn < 1) {
        throw std::invalid_argument("aloha_max_update_rate: num_rn must be >= 1");
    }
    if (!(a.efficiency > 0.0 && a.efficiency < 1.0)) {
        throw std::invalid_argument("aloha_max_update_rate: efficiency must be in (0,1)");
    }
    if (handoff_fraction < 0.0) {
        throw std::invalid_argument("aloha_max_update_rate: negative handoff fraction");
    }
    const double usable_bps = a.efficiency * a.bandwidth_bps;
    const double bits_per_update =
        static_cast<double>(effective_update_bits(a)) * (1.0 + handoff_fraction);
    return usable_bps / (bits_per_update * static_cast<double>(num_rn)) * 60.0;
}

std::string phase1_csv(int n_max, double timer_t, int freq_pairs, int constrained_links,
                       const TimingConstants& tc) {
    std::ostringstream os;
    os << "n,p1_seconds\n";
    for (int n = 1; n <= n_max; ++n) {
        os << n << ',' << phase1_time(n, timer_t, freq_pairs, constrained_links, tc) << '\n';
    }
    return os.str();
}

std::string phase23_csv(int u_max, const TimingConstants& tc) {
    std::ostringstream os;
    os << "u,p2_seconds,p3_seconds\n";
    for (int u = 0; u <= u_max; ++u) {
        os << u << ',' << phase2_time(u, tc) << ',' << phase3_time(u, tc) << '\n';
    }
    return os.str();
}

std::string aloha_csv(int rn_min, int rn_max, const AlohaModel& base, double handoff_fraction) {
    std::ostringstream os;
    os << "num_rn,updates_per_min_novnc,updates_per_min_vnc\n";
    AlohaModel off = base;
    off.vnc_enabled = false;
    AlohaModel on = base;
    on.vnc_enabled = true;
    for (int n = rn_min; n <= rn_max; ++n) {
        os << n << ',' << aloha_max_update_rate(n, off, handoff_fraction) << ','
           << aloha_max_update_rate(n, on, handoff_fraction) << '\n';
    }
    return os.str();
}

}  // namespace rdrn::perf
