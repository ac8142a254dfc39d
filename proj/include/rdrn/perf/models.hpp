#pragma once

#include "rdrn/domain/packet.hpp"

#include <string>

namespace rdrn::perf {

// Measured per-packet transfer-and-process times plus the fit constants of
// the configuration-time model. All seconds. The same constants drive the
// point-to-point channel model so analysis and emulation stay comparable.
struct TimingConstants {
    double user_pos = 0.677;
    double newswitch = 0.439;
    double handoff = 0.473;
    double mycall = 0.492;
    double switchpos = 0.679;
    double topology = 0.664;
    double topology_per_es = 0.1;

    double k_top = 0.0;       // topology search, seconds per unit of N^2+(L+1)^R
    double k_bf = 1.875;      // beam steering convergence, seconds per remote node
    double k_el_2mb = 2.0;    // weight-table generation, seconds per combination
    int m_bits_per_symbol = 2;
    int b_beams = 4;

    double latency_s(PacketKind k) const;
};

// Broadcast-channel capacity model. Pure-contention efficiency default 18%.
struct AlohaModel {
    double bandwidth_bps = 19200.0;
    double efficiency = 0.18;
    int packet_bits = 400;
    bool vnc_enabled = false;
};

// Switch-to-switch configuration time for n switches with timer T, L
// frequency pairs and R constrained links.
double phase1_time(int n, double timer_t, int freq_pairs, int constrained_links,
                   const TimingConstants& tc = {});

// Remote-node configuration time for u nodes at one switch. Sums the beam
// steering and table generation cost over every combination of transmitters.
double phase2_time(int u, const TimingConstants& tc = {});

// Handoff time: one handoff packet plus reconfiguration at the new switch.
double phase3_time(int u_at_new_es, const TimingConstants& tc = {});

// Bits on the air per position update, including the virtual twin when
// predictive configuration is on (one virtual message per real, 65 bits
// longer).
int effective_update_bits(const AlohaModel& a);

// Ratio of on-air load with predictive configuration to without.
double vnc_load_factor(int packet_bits);

// Maximum sustainable update rate, updates per minute per remote node.
// handoff_fraction adds that fraction of extra packets per update.
double aloha_max_update_rate(int num_rn, const AlohaModel& a, double handoff_fraction = 0.0);

// CSV emitters mirroring the capacity and configuration-time studies.
std::string phase1_csv(int n_max, double timer_t, int freq_pairs, int constrained_links,
                       const TimingConstants& tc = {});
std::string phase23_csv(int u_max, const TimingConstants& tc = {});
std::string aloha_csv(int rn_min, int rn_max, const AlohaModel& base, double handoff_fraction = 0.0);

}  // namespace rdrn::perf
