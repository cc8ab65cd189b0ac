#pragma once

#include "prpsim/channel_mac.hpp"
#include "prpsim/sim_core.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace prpsim
{
    enum class StreamKind
    {
        unicast_up,    // STA -> AP -> wired port
        multicast_down // wired port -> AP -> STA
    };

    std::string to_string(StreamKind kind);

    struct StreamConfig
    {
        std::string name = "stream";
        StreamKind kind = StreamKind::unicast_up;
        SimTime Tc = 100'000'000;
        int payload = 50;
        std::optional<std::uint64_t> count;
        std::optional<SimTime> duration; // unset: the scenario duration
        SimTime start_phase = 0;
        std::vector<int> channels; // channel numbers carrying a copy

        void validate() const;

        /// Packets generated when the stream is bounded by `scenario_duration`.
        std::uint64_t packet_count(SimTime scenario_duration) const;
        SimTime t_gen(std::uint64_t seq) const { return start_phase + static_cast<SimTime>(seq - 1) * Tc; }
    };

    struct GeneratedPacket
    {
        std::uint64_t seq;
        SimTime t_gen;

        friend bool operator==(const GeneratedPacket &, const GeneratedPacket &) = default;
    };

    /// seq from 1, t_gen(i) = start_phase + (seq - 1) * Tc.
    std::vector<GeneratedPacket> cyclic_stream(const StreamConfig &cfg, SimTime scenario_duration = 0);

    struct BurstLoadConfig
    {
        int channel = 165;
        int n_nodes = 1;
        int payload = 1500;
        SimTime intra_gap = 400'000;
        double mean_burst_len = 300.0; // packets
        SimTime mean_gap = 200'000'000;

        void validate() const;

        /// Long-run fraction of time a node spends inside bursts.
        double duty_cycle() const;
    };

    // On/off request process of one interfering node: exponential gap, then a
    // burst of max(1, round(Exp(mean_burst_len))) requests spaced intra_gap.
    class BurstProcess
    {
    public:
        BurstProcess(const BurstLoadConfig &cfg, RngStream rng, SimTime t0 = 0);
        SimTime next();

    private:
        void new_burst(SimTime after);

        BurstLoadConfig cfg_;
        RngStream rng_;
        SimTime t_ = 0;
        std::int64_t left_ = 0;
    };

    std::string burst_stream_label(int channel, int node);

    /// Request times of one node before `horizon`.
    std::vector<SimTime> burst_interferer(const BurstLoadConfig &cfg, std::uint64_t seed, int node, SimTime horizon);

    struct AciExperimentConfig
    {
        std::string name = "aci";
        SimTime Tc = 100'000'000;
        SimTime lead = -10'000; // I request relative to M
        int duplex_every = 2;
        int m_channel = 165;
        int i_channel = 161;
        int payload = 50;
        int i_payload = 1500;
        std::optional<std::uint64_t> count; // unset: the scenario duration
        SimTime start_phase = 1'000'000;

        void validate() const;
        std::uint64_t packet_count(SimTime scenario_duration) const;
    };

    struct AciRequest
    {
        std::uint64_t seq;
        SetTag tag;
        SimTime t_m;
        std::optional<SimTime> t_i; // present for A packets
    };

    inline SetTag aci_tag(std::uint64_t seq, int duplex_every)
    {
        return seq % static_cast<std::uint64_t>(duplex_every) == 0 ? SetTag::a : SetTag::not_a;
    }

    std::vector<AciRequest> aci_experiment_schedule(const AciExperimentConfig &cfg, std::uint64_t count);

} // namespace prpsim
