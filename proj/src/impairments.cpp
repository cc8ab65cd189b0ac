#include "prpsim/impairments.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>

namespace prpsim
{
    void DtimConfig::validate() const
    {
        if (p < 1)
            throw std::invalid_argument("dtim.p must be >= 1");
        if (t_beac <= 0)
            throw std::invalid_argument("dtim.t_beac must be positive");
    }

    int dtim_count(std::int64_t j, int p)
    {
        const std::int64_t c = (static_cast<std::int64_t>(p) - 1 - j) % p;
        return static_cast<int>(c < 0 ? c + p : c);
    }

    SimTime dtim_release_time(SimTime t_arrival, const DtimConfig &cfg, SimTime offset)
    {
        // first beacon index with time >= t_arrival
        std::int64_t j = floor_div(t_arrival - offset, cfg.t_beac);
        if (beacon_time(cfg, offset, j) < t_arrival)
            ++j;
        // beacons with c == 0 have j = p-1 (mod p)
        const std::int64_t c = dtim_count(j, cfg.p);
        return beacon_time(cfg, offset, j + c);
    }

    std::vector<SimTime> dtim_burst_schedule(SimTime t_release, const std::vector<SimTime> &airtimes)
    {
        std::vector<SimTime> starts;
        starts.reserve(airtimes.size());
        SimTime t = t_release;
        for (SimTime a : airtimes)
        {
            starts.push_back(t);
            t += a;
        }
        return starts;
    }

    DtimState::DtimState(int p) : p_(p), c_(p - 1)
    {
        if (p < 1)
            throw std::invalid_argument("DTIM period must be >= 1");
    }

    std::vector<std::uint64_t> DtimState::on_beacon()
    {
        std::vector<std::uint64_t> released;
        if (c_ == 0)
        {
            released.assign(buffer_.begin(), buffer_.end());
            buffer_.clear();
            c_ = p_ - 1;
        }
        else
        {
            --c_;
        }
        return released;
    }

    // ------------------------------------------------------------------ NM

    void NmConfig::validate() const
    {
        if (n_probes < 1)
            throw std::invalid_argument("nm.n_probes must be >= 1");
        if (probe_dwell <= 0 || probe_gap <= 0)
            throw std::invalid_argument("nm.probe_dwell and nm.probe_gap must be positive");
        if (scan_period <= scan_span())
            throw std::invalid_argument("nm.scan_period must exceed the scan span");
        if (probes_per_release < 1)
            throw std::invalid_argument("nm.probes_per_release must be >= 1");
        if (buffer_capacity < 1)
            throw std::invalid_argument("nm.buffer_capacity must be >= 1");
        if (scan_phase < 0)
            throw std::invalid_argument("nm.scan_phase must be >= 0");
    }

    std::vector<Blackout> nm_blackout_intervals(const NmConfig &cfg, SimTime run_length, int n_adapters,
                                                int probes_per_group)
    {
        if (probes_per_group < 1)
            throw std::invalid_argument("probes_per_group must be >= 1");
        std::vector<Blackout> out;
        if (!cfg.enabled)
            return out;
        const SimTime stride = cfg.probe_dwell + cfg.probe_gap;
        for (int a = 0; a < n_adapters; ++a)
        {
            const SimTime displacement = cfg.simultaneous_on_all_adapters ? 0 : a * (cfg.scan_period / n_adapters);
            for (SimTime cycle = cfg.scan_phase + displacement; cycle < run_length; cycle += cfg.scan_period)
            {
                for (int first = 0; first < cfg.n_probes; first += probes_per_group)
                {
                    const int probes = std::min(probes_per_group, cfg.n_probes - first);
                    const SimTime start = cycle + first * stride;
                    if (start >= run_length)
                        break;
                    out.push_back({a, start, start + probes * cfg.probe_dwell});
                }
            }
        }
        return out;
    }

    std::optional<Blackout> blackout_at(const std::vector<Blackout> &sorted, SimTime t)
    {
        auto it = std::upper_bound(sorted.begin(), sorted.end(), t,
                                   [](SimTime v, const Blackout &b) { return v < b.t_start; });
        if (it == sorted.begin())
            return std::nullopt;
        --it;
        if (t < it->t_end)
            return *it;
        return std::nullopt;
    }

    std::vector<DeferredRequest> nm_apply_unicast(const std::vector<Blackout> &blackouts,
                                                  const std::vector<SimTime> &request_times, int capacity)
    {
        std::vector<DeferredRequest> out(request_times.size());
        std::deque<std::size_t> pending; // deferred requests of the current blackout
        std::optional<Blackout> current;
        for (std::size_t i = 0; i < request_times.size(); ++i)
        {
            const SimTime t = request_times[i];
            out[i].t_request = t;
            auto b = blackout_at(blackouts, t);
            if (!b)
                continue;
            if (!current || !(*current == *b))
            {
                current = b;
                pending.clear();
            }
            out[i].t_request = b->t_end;
            out[i].deferred = true;
            pending.push_back(i);
            if (static_cast<int>(pending.size()) > capacity)
            {
                out[pending.front()].dropped = true;
                pending.pop_front();
            }
        }
        return out;
    }

    std::vector<MulticastFate> nm_apply_multicast(const std::vector<Blackout> &blackouts, NmMulticastMode mode,
                                                  const DtimConfig &dtim, SimTime beacon_offset,
                                                  const std::vector<SimTime> &arrivals)
    {
        std::vector<MulticastFate> out;
        out.reserve(arrivals.size());
        for (SimTime t : arrivals)
        {
            MulticastFate fate{t, false};
            if (mode == NmMulticastMode::drop)
            {
                fate.dropped = blackout_at(blackouts, t).has_value();
            }
            else
            {
                // latest blackout starting at or before t whose release is still ahead
                auto it = std::upper_bound(blackouts.begin(), blackouts.end(), t,
                                           [](SimTime v, const Blackout &b) { return v < b.t_start; });
                if (it != blackouts.begin())
                {
                    --it;
                    const SimTime release = dtim_release_time(it->t_end, dtim, beacon_offset);
                    if (t < release)
                        fate.t_release = release;
                }
            }
            out.push_back(fate);
        }
        return out;
    }

    // ------------------------------------------------------------------ AP stalls

    void ApStallConfig::validate() const
    {
        if (period <= 0 || max_stall <= 0)
            throw std::invalid_argument("ap_stall.period and ap_stall.max_stall must be positive");
        if (max_stall >= period)
            throw std::invalid_argument("ap_stall.max_stall must be smaller than ap_stall.period");
        if (jitter_span() < 0 || jitter_span() > period - max_stall)
            throw std::invalid_argument("ap_stall.onset_jitter must lie in [0, period - max_stall]");
    }

    SimTime ap_stall_delay(SimTime t, const ApStallConfig &cfg, SimTime phase, std::uint64_t jitter_key)
    {
        if (!cfg.enabled)
            return 0;
        const std::int64_t k = floor_div(t - phase, cfg.period);
        SimTime start = phase + k * cfg.period;
        const SimTime span = cfg.jitter_span();
        if (span > 0)
        {
            const double u = counter_uniform01(jitter_key, static_cast<std::uint64_t>(k));
            start += static_cast<SimTime>(u * static_cast<double>(span + 1));
        }
        const SimTime end = start + cfg.max_stall;
        return (t >= start && t < end) ? end - t : 0;
    }

    ApStallModel::ApStallModel(const ApStallConfig &cfg, std::uint64_t seed, int n_aps) : cfg_(cfg)
    {
        for (int i = 0; i < n_aps; ++i)
        {
            const std::string label = "ap" + std::to_string(i) + ".stall";
            if (static_cast<std::size_t>(i) < cfg.phase_offset_per_ap.size())
            {
                phases_.push_back(cfg.phase_offset_per_ap[static_cast<std::size_t>(i)]);
            }
            else
            {
                RngStream rng(seed, label + ".phase");
                phases_.push_back(rng.uniform_int(0, std::max<SimTime>(cfg.period, 1) - 1));
            }
            keys_.push_back(stream_key(seed, label + ".onset"));
        }
    }

    SimTime ApStallModel::delay(SimTime t, int ap_id) const
    {
        const auto i = static_cast<std::size_t>(ap_id);
        return ap_stall_delay(t, cfg_, phases_.at(i), keys_.at(i));
    }

    // ------------------------------------------------------------------ ACI

    void AciConfig::validate() const
    {
        if (coupling_by_step.empty())
            throw std::invalid_argument("aci.coupling_by_step must not be empty");
        for (std::size_t i = 0; i < coupling_by_step.size(); ++i)
        {
            if (!(coupling_by_step[i] >= 0.0 && coupling_by_step[i] <= 1.0))
                throw std::invalid_argument("aci coupling outside [0,1]");
            if (i > 0 && coupling_by_step[i] > coupling_by_step[i - 1])
                throw std::invalid_argument("aci coupling must not increase with separation");
        }
        if (!(p_ack_corrupt >= 0.0 && p_ack_corrupt <= 1.0))
            throw std::invalid_argument("aci.p_ack_corrupt outside [0,1]");
    }

    double aci_coupling(const AciConfig &cfg, int a, int b)
    {
        if (!cfg.enabled || a == b)
            return 0.0;
        const Band band = band_of_channel(a);
        if (band != band_of_channel(b))
            return 0.0;
        const int delta = std::abs(a - b);
        const int width = band == Band::ghz5 ? 4 : 5;
        const int step = std::max(1, (delta + width - 1) / width);
        const auto idx = std::min<std::size_t>(static_cast<std::size_t>(step - 1), cfg.coupling_by_step.size() - 1);
        return cfg.coupling_by_step[idx];
    }

    std::vector<AciCoupledFrame> aci_couple(const std::vector<AirFrame> &timeline_m,
                                            const std::vector<AirFrame> &timeline_i, double coupling,
                                            const AciConfig &cfg, const ChannelConfig &m_cfg,
                                            const std::function<int(int)> &draw_backoff,
                                            const std::function<bool(double)> &draw_corrupt)
    {
        std::vector<AciCoupledFrame> out;
        out.reserve(timeline_m.size());
        const bool senses = aci_senses_busy(cfg, coupling);
        const double p_corrupt = aci_ack_corrupt_probability(cfg, coupling);
        for (const AirFrame &m : timeline_m)
        {
            AciCoupledFrame r;
            const SimTime airtime = m.t_air_end - m.t_air_start;
            SimTime idle_from = m.t_request;
            SimTime start = m.t_request + m_cfg.difs();
            if (!m_cfg.immediate_access)
            {
                r.backoff_slots = draw_backoff(m_cfg.cw_min);
                start += r.backoff_slots * m_cfg.slot;
            }
            bool moved = senses;
            while (moved)
            {
                moved = false;
                SimTime busy_end = idle_from;
                for (const AirFrame &i : timeline_i)
                    if (i.t_air_start <= start && i.t_air_end > idle_from)
                        busy_end = std::max(busy_end, i.t_air_end);
                if (busy_end > idle_from)
                {
                    r.deferred = true;
                    r.backoff_slots = draw_backoff(m_cfg.cw_min);
                    idle_from = busy_end;
                    start = busy_end + m_cfg.difs() + r.backoff_slots * m_cfg.slot;
                    moved = true;
                }
            }
            r.frame = {m.t_request, start, start + airtime};
            if (coupling > 0.0)
            {
                const SimTime ack_start = r.frame.t_air_end + m_cfg.sifs;
                const SimTime ack_end = ack_start + m_cfg.ack_airtime();
                for (const AirFrame &i : timeline_i)
                    if (i.t_air_start < ack_end && i.t_air_end > ack_start && draw_corrupt(p_corrupt))
                    {
                        r.ack_lost = true;
                        break;
                    }
            }
            out.push_back(r);
        }
        return out;
    }

} // namespace prpsim
