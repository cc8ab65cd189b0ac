#include "prpsim/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace prpsim
{
    std::string to_string(StreamKind kind)
    {
        return kind == StreamKind::unicast_up ? "unicast-up" : "multicast-down";
    }

    void StreamConfig::validate() const
    {
        if (Tc <= 0)
            throw std::invalid_argument("Tc must be positive");
        if (payload < 0)
            throw std::invalid_argument("payload must be >= 0");
        if (start_phase < 0)
            throw std::invalid_argument("start_phase must be >= 0");
        if (duration && *duration < 0)
            throw std::invalid_argument("duration must be >= 0");
        if (channels.empty())
            throw std::invalid_argument("at least one channel is required");
    }

    std::uint64_t StreamConfig::packet_count(SimTime scenario_duration) const
    {
        if (count)
            return *count;
        const SimTime span = duration.value_or(scenario_duration) - start_phase;
        if (span <= 0)
            return 0;
        return static_cast<std::uint64_t>((span + Tc - 1) / Tc);
    }

    std::vector<GeneratedPacket> cyclic_stream(const StreamConfig &cfg, SimTime scenario_duration)
    {
        cfg.validate();
        const std::uint64_t n = cfg.packet_count(scenario_duration);
        std::vector<GeneratedPacket> out;
        out.reserve(n);
        for (std::uint64_t seq = 1; seq <= n; ++seq)
            out.push_back({seq, cfg.t_gen(seq)});
        return out;
    }

    void BurstLoadConfig::validate() const
    {
        if (n_nodes < 0)
            throw std::invalid_argument("n_nodes must be >= 0");
        if (payload <= 0 || intra_gap <= 0 || mean_gap <= 0 || !(mean_burst_len > 0.0))
            throw std::invalid_argument("burst load parameters must be positive");
    }

    double BurstLoadConfig::duty_cycle() const
    {
        const double on = mean_burst_len * static_cast<double>(intra_gap);
        return on / (on + static_cast<double>(mean_gap));
    }

    BurstProcess::BurstProcess(const BurstLoadConfig &cfg, RngStream rng, SimTime t0) : cfg_(cfg), rng_(std::move(rng))
    {
        cfg_.validate();
        new_burst(t0);
    }

    void BurstProcess::new_burst(SimTime after)
    {
        t_ = after + static_cast<SimTime>(std::llround(rng_.exponential(static_cast<double>(cfg_.mean_gap))));
        left_ = std::max<std::int64_t>(1, std::llround(rng_.exponential(cfg_.mean_burst_len)));
    }

    SimTime BurstProcess::next()
    {
        const SimTime t = t_;
        if (--left_ > 0)
            t_ += cfg_.intra_gap;
        else
            new_burst(t + cfg_.intra_gap);
        return t;
    }

    std::string burst_stream_label(int channel, int node)
    {
        return "load.ch" + std::to_string(channel) + ".node" + std::to_string(node);
    }

    std::vector<SimTime> burst_interferer(const BurstLoadConfig &cfg, std::uint64_t seed, int node, SimTime horizon)
    {
        BurstProcess p(cfg, RngStream(seed, burst_stream_label(cfg.channel, node)));
        std::vector<SimTime> out;
        for (SimTime t = p.next(); t < horizon; t = p.next())
            out.push_back(t);
        return out;
    }

    void AciExperimentConfig::validate() const
    {
        if (Tc <= 0)
            throw std::invalid_argument("Tc must be positive");
        if (duplex_every < 1)
            throw std::invalid_argument("duplex_every must be >= 1");
        if (payload < 0 || i_payload < 0)
            throw std::invalid_argument("payload must be >= 0");
        if (start_phase < 0 || start_phase + lead < 0)
            throw std::invalid_argument("start_phase + lead must be >= 0");
        if (m_channel == i_channel)
            throw std::invalid_argument("m_channel and i_channel must differ");
    }

    std::uint64_t AciExperimentConfig::packet_count(SimTime scenario_duration) const
    {
        if (count)
            return *count;
        const SimTime span = scenario_duration - start_phase;
        return span <= 0 ? 0 : static_cast<std::uint64_t>((span + Tc - 1) / Tc);
    }

    std::vector<AciRequest> aci_experiment_schedule(const AciExperimentConfig &cfg, std::uint64_t count)
    {
        cfg.validate();
        std::vector<AciRequest> out;
        out.reserve(count);
        for (std::uint64_t seq = 1; seq <= count; ++seq)
        {
            AciRequest r{seq, aci_tag(seq, cfg.duplex_every), cfg.start_phase + static_cast<SimTime>(seq - 1) * cfg.Tc,
                         std::nullopt};
            if (r.tag == SetTag::a)
                r.t_i = r.t_m + cfg.lead;
            out.push_back(r);
        }
        return out;
    }

} // namespace prpsim
