#include "prpsim/channel_mac.hpp"

#include <algorithm>
#include <stdexcept>

namespace prpsim
{
    Band band_of_channel(int ch)
    {
        if (ch >= 1 && ch <= 13)
            return Band::ghz2_4;
        if (ch >= 36 && ch <= 165)
            return Band::ghz5;
        throw std::invalid_argument("channel " + std::to_string(ch) + " is neither 1..13 nor 36..165");
    }

    std::string to_string(Band band)
    {
        return band == Band::ghz2_4 ? "2.4GHz" : "5GHz";
    }

    void LossModel::validate() const
    {
        for (double p : {p_loss, p_gb, p_bg, p_loss_good, p_loss_bad})
            if (!(p >= 0.0 && p <= 1.0))
                throw std::invalid_argument("loss probability outside [0,1]");
    }

    LossModel LossModel::bernoulli(double p)
    {
        LossModel m;
        m.p_loss = p;
        return m;
    }

    LossProcess::LossProcess(LossModel model, RngStream rng)
        : model_(model), rng_(std::move(rng))
    {
        model_.validate();
    }

    bool LossProcess::lost()
    {
        if (model_.kind == LossKind::bernoulli)
            return rng_.bernoulli(model_.p_loss);
        bad_ = bad_ ? !rng_.bernoulli(model_.p_bg) : rng_.bernoulli(model_.p_gb);
        return rng_.bernoulli(bad_ ? model_.p_loss_bad : model_.p_loss_good);
    }

    SimTime frame_airtime(int payload_bytes, int mac_overhead_bytes, int bitrate_mbps)
    {
        switch (bitrate_mbps)
        {
        case 6: case 9: case 12: case 18: case 24: case 36: case 48: case 54:
            break;
        default:
            throw std::invalid_argument("unsupported bitrate " + std::to_string(bitrate_mbps) + " Mbit/s");
        }
        if (payload_bytes < 0 || mac_overhead_bytes < 0)
            throw std::invalid_argument("negative frame size");
        const std::int64_t bits = 16 + 8 * static_cast<std::int64_t>(payload_bytes + mac_overhead_bytes) + 6;
        const std::int64_t bits_per_symbol = 4 * bitrate_mbps;
        const std::int64_t symbols = (bits + bits_per_symbol - 1) / bits_per_symbol;
        return 20'000 + 4'000 * symbols;
    }

    SimTime ChannelConfig::ack_airtime() const
    {
        return frame_airtime(0, ack_bytes, ack_bitrate);
    }

    SimTime ChannelConfig::data_airtime(int payload_bytes) const
    {
        return frame_airtime(payload_bytes, frame_overhead(), bitrate);
    }

    void ChannelConfig::validate() const
    {
        if (band_of_channel(channel_number) != band)
            throw std::invalid_argument("channel " + std::to_string(channel_number) + " is not in band " + to_string(band));
        frame_airtime(0, 0, bitrate);
        frame_airtime(0, 0, ack_bitrate);
        if (slot <= 0 || sifs <= 0)
            throw std::invalid_argument("slot and sifs must be positive");
        if (cw_min < 0 || cw_max < cw_min)
            throw std::invalid_argument("invalid contention window bounds");
        if (retry_limit < 0)
            throw std::invalid_argument("retry_limit must be >= 0");
        loss_model.validate();
        ack_loss_model.validate();
    }

    ChannelConfig ChannelConfig::for_channel(int channel_number)
    {
        ChannelConfig c;
        c.channel_number = channel_number;
        c.band = band_of_channel(channel_number);
        c.sifs = c.band == Band::ghz5 ? 16'000 : 10'000;
        return c;
    }

    int contention_window(const ChannelConfig &cfg, int retry)
    {
        std::int64_t cw = cfg.cw_min + 1;
        for (int r = 0; r < retry && cw <= cfg.cw_max; ++r)
            cw *= 2;
        return static_cast<int>(std::min<std::int64_t>(cw - 1, cfg.cw_max));
    }

    DcfAttempt dcf_attempt(const ChannelConfig &cfg, SimTime busy_until, SimTime t_request, int cw,
                           bool backoff_required, RngStream &rng)
    {
        if (busy_until > t_request)
        {
            const int k = static_cast<int>(rng.uniform_int(0, cw));
            return {busy_until + cfg.difs() + k * cfg.slot, k};
        }
        if (backoff_required || !cfg.immediate_access)
        {
            const int k = static_cast<int>(rng.uniform_int(0, cw));
            return {t_request + cfg.difs() + k * cfg.slot, k};
        }
        return {t_request + cfg.difs(), 0};
    }

    std::optional<std::string> check_record(const TxRecord &r)
    {
        const bool aired = r.t_air_start != kAbsent;
        if (aired != (r.t_air_end != kAbsent))
            return "air start/end presence mismatch";
        if (aired)
        {
            if (r.t_air_start < r.t_gen)
                return "t_air_start < t_gen";
            if (r.t_air_end <= r.t_air_start)
                return "t_air_end <= t_air_start";
        }
        if (r.t_ack != kAbsent)
        {
            if (!aired)
                return "ACK without transmission";
            if (r.t_ack <= r.t_air_end)
                return "t_ack <= t_air_end";
        }
        if (r.ack_lost && r.t_ack != kAbsent)
            return "ack_lost with t_ack present";
        if (r.data_lost && r.t_eth != kAbsent)
            return "data_lost with t_eth present";
        if (!r.data_lost && r.t_eth == kAbsent)
            return "neither delivered nor marked lost";
        if (r.t_eth != kAbsent && r.t_eth < r.t_gen)
            return "t_eth < t_gen";
        if (r.retries < 0)
            return "negative retry count";
        return std::nullopt;
    }

    std::optional<SimTime> link_latency(const TxRecord &rec, const ChannelConfig &cfg)
    {
        if (rec.t_ack == kAbsent)
            return std::nullopt;
        return rec.t_ack - cfg.sifs - cfg.ack_airtime() - rec.t_gen;
    }

    SimTime ap_forward(SimTime t_rx_at_ap, const ApConfig &ap, Band band, SimTime stall_extra)
    {
        SimTime t = t_rx_at_ap + ap.forward_delay_base + stall_extra;
        if (ap.mode == ApMode::one_dual_band_ap && band == Band::ghz5)
            t += ap.dual_band_extra;
        return t;
    }

} // namespace prpsim
