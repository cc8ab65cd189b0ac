#pragma once

#include "prpsim/sim_core.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace prpsim
{
    enum class Band
    {
        ghz2_4,
        ghz5
    };

    /// Band of a channel number; throws for numbers outside 1..13 and 36..165.
    Band band_of_channel(int channel_number);
    std::string to_string(Band band);

    enum class LossKind
    {
        bernoulli,
        gilbert_elliott
    };

    struct LossModel
    {
        LossKind kind = LossKind::bernoulli;
        double p_loss = 0.0;
        // Gilbert-Elliott: transition probabilities per frame and per-state loss.
        double p_gb = 0.0;
        double p_bg = 1.0;
        double p_loss_good = 0.0;
        double p_loss_bad = 1.0;

        void validate() const;
        static LossModel bernoulli(double p);
    };

    // Draws per-frame loss decisions. The Gilbert-Elliott chain moves first,
    // then the loss of the current frame is drawn in the new state.
    class LossProcess
    {
    public:
        LossProcess(LossModel model, RngStream rng);
        bool lost();

    private:
        LossModel model_;
        RngStream rng_;
        bool bad_ = false;
    };

    /// Per-frame encryption overhead (CCMP header + MIC) when WPA2 is enabled.
    inline constexpr int kWpa2OverheadBytes = 16;

    struct ChannelConfig
    {
        int channel_number = 1;
        Band band = Band::ghz2_4;
        int bitrate = 54;     // Mbit/s
        int ack_bitrate = 24; // Mbit/s
        SimTime slot = 9'000;
        SimTime sifs = 10'000;
        int cw_min = 15;
        int cw_max = 1023;
        int retry_limit = 7; // 0 = one-shot
        // Idle medium at request: transmit after DIFS without backoff.
        bool immediate_access = true;
        int mac_overhead_bytes = 28;
        int ack_bytes = 14;
        bool wpa2 = false;
        LossModel loss_model;
        LossModel ack_loss_model;

        SimTime difs() const noexcept { return sifs + 2 * slot; }
        int frame_overhead() const noexcept { return mac_overhead_bytes + (wpa2 ? kWpa2OverheadBytes : 0); }
        SimTime ack_airtime() const;
        SimTime data_airtime(int payload_bytes) const;

        void validate() const;

        /// Defaults for a channel number: band and SIFS follow the band.
        static ChannelConfig for_channel(int channel_number);
    };

    /// OFDM airtime: 20 us preamble + 4 us per symbol, 4*bitrate bits/symbol,
    /// 16 service bits and 6 tail bits. Throws for non-802.11a/g rates.
    SimTime frame_airtime(int payload_bytes, int mac_overhead_bytes, int bitrate_mbps);

    /// CW = min(2^retry * (cw_min + 1) - 1, cw_max).
    int contention_window(const ChannelConfig &cfg, int retry);

    struct DcfAttempt
    {
        SimTime t_air_start;
        int backoff_slots;
    };

    // One DCF access decision. busy_until is the end of the busy period
    // covering t_request (or <= t_request when the medium is idle).
    DcfAttempt dcf_attempt(const ChannelConfig &cfg, SimTime busy_until, SimTime t_request, int cw,
                           bool backoff_required, RngStream &rng);

    enum class SetTag
    {
        none,
        a,
        not_a
    };

    struct TxRecord
    {
        std::uint64_t seq = 0;
        int channel = 0;
        SetTag tag = SetTag::none;
        SimTime t_gen = 0;
        SimTime t_air_start = kAbsent; // first attempt
        SimTime t_air_end = kAbsent;   // last attempt's data frame
        SimTime t_ack = kAbsent;
        SimTime t_eth = kAbsent; // arrival at the final recipient
        int retries = 0;
        bool data_lost = false;
        bool ack_lost = false;

        bool delivered() const noexcept { return t_eth != kAbsent; }
        bool acked() const noexcept { return t_ack != kAbsent; }

        friend bool operator==(const TxRecord &, const TxRecord &) = default;
    };

    /// Returns a description of the first violated ordering invariant, if any.
    std::optional<std::string> check_record(const TxRecord &rec);

    /// Link latency from the ACK timestamp: t_ack - SIFS - ACK airtime - t_gen.
    std::optional<SimTime> link_latency(const TxRecord &rec, const ChannelConfig &cfg);

    enum class ApMode
    {
        two_aps,
        one_dual_band_ap
    };

    struct ApConfig
    {
        ApMode mode = ApMode::two_aps;
        SimTime forward_delay_base = 150'000;
        SimTime dual_band_extra = 40'000;
    };

    /// Wireless-to-wired (or wired-to-wireless) forwarding through the AP.
    SimTime ap_forward(SimTime t_rx_at_ap, const ApConfig &ap, Band band, SimTime stall_extra = 0);

} // namespace prpsim
