#pragma once

#include "prpsim/channel_mac.hpp"
#include "prpsim/sim_core.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <optional>
#include <vector>

namespace prpsim
{
    // ---------------------------------------------------------------- DTIM

    struct DtimConfig
    {
        bool enabled = false;
        SimTime t_beac = 102'400'000;
        int p = 1; // DTIM period in beacons
        // Phase of beacon 0; unset means drawn per AP from a dedicated stream.
        std::optional<SimTime> beacon_offset;

        void validate() const;
    };

    /// DTIM count announced by beacon j (beacon 0 carries p-1).
    int dtim_count(std::int64_t beacon_index, int p);

    /// Time of beacon j given the first beacon's phase.
    inline SimTime beacon_time(const DtimConfig &cfg, SimTime offset, std::int64_t j) { return offset + j * cfg.t_beac; }

    /// First beacon at or after t_arrival whose DTIM count is 0.
    SimTime dtim_release_time(SimTime t_arrival, const DtimConfig &cfg, SimTime offset);

    /// Back-to-back start times of a released burst, FIFO, each frame after the previous one's airtime.
    std::vector<SimTime> dtim_burst_schedule(SimTime t_release, const std::vector<SimTime> &airtimes);

    // Beacon-by-beacon state of the AP's DTIM gate: count c and the pending
    // multicast buffer. Frames are released on beacons that carry c == 0.
    class DtimState
    {
    public:
        explicit DtimState(int p);

        int count() const noexcept { return c_; }
        std::size_t buffered() const noexcept { return buffer_.size(); }

        void buffer(std::uint64_t frame_id) { buffer_.push_back(frame_id); }

        /// Processes one beacon; returns the frames released after it (FIFO).
        std::vector<std::uint64_t> on_beacon();

    private:
        int p_;
        int c_;
        std::deque<std::uint64_t> buffer_;
    };

    // ---------------------------------------------------------------- network manager scans

    enum class NmMulticastMode
    {
        drop,
        dtim_buffer
    };

    struct NmConfig
    {
        bool enabled = false;
        SimTime scan_period = 120'000'000'000;
        int n_probes = 13;
        SimTime probe_dwell = 60'000'000;
        SimTime probe_gap = 170'000'000;
        SimTime scan_phase = 0; // start of the first scan
        bool simultaneous_on_all_adapters = true;
        NmMulticastMode multicast_mode = NmMulticastMode::dtim_buffer;
        int probes_per_release = 2;
        int buffer_capacity = 64;

        SimTime scan_span() const noexcept { return n_probes * probe_dwell + (n_probes - 1) * probe_gap; }
        void validate() const;
    };

    struct Blackout
    {
        int adapter;
        SimTime t_start;
        SimTime t_end; // exclusive

        friend bool operator==(const Blackout &, const Blackout &) = default;
    };

    // Off-channel intervals per adapter, sorted by (adapter, start). With
    // probes_per_group > 1 consecutive probes are merged into one contiguous
    // interval (the AP-side buffering used for multicast).
    std::vector<Blackout> nm_blackout_intervals(const NmConfig &cfg, SimTime run_length, int n_adapters,
                                                int probes_per_group = 1);

    /// The interval of one adapter's (sorted) list containing t, if any.
    std::optional<Blackout> blackout_at(const std::vector<Blackout> &sorted, SimTime t);

    struct DeferredRequest
    {
        SimTime t_request; // effective request time after deferral
        bool deferred = false;
        bool dropped = false; // evicted by buffer overflow
    };

    // Requests issued inside a blackout wait for its end (FIFO). When more
    // than `capacity` frames pile up in one blackout the oldest are dropped.
    std::vector<DeferredRequest> nm_apply_unicast(const std::vector<Blackout> &blackouts,
                                                  const std::vector<SimTime> &request_times, int capacity);

    struct MulticastFate
    {
        SimTime t_release; // when the AP may send the frame
        bool dropped = false;
    };

    // AP-side handling of multicast frames toward a scanning STA. Drop mode
    // loses frames arriving during a blackout; dtim-buffer mode holds frames
    // arriving between a blackout's start and the first DTIM beacon after its end.
    std::vector<MulticastFate> nm_apply_multicast(const std::vector<Blackout> &blackouts, NmMulticastMode mode,
                                                  const DtimConfig &dtim, SimTime beacon_offset,
                                                  const std::vector<SimTime> &arrivals);

    // ---------------------------------------------------------------- AP internal stalls

    struct ApStallConfig
    {
        bool enabled = false;
        SimTime period = 10'000'000'000;
        SimTime max_stall = 20'000'000;
        // Unset: shared iff the AP mode is one dual-band AP.
        std::optional<bool> shared_across_channels;
        // Explicit per-AP phases; unset entries are drawn per AP.
        std::vector<SimTime> phase_offset_per_ap;
        // Random onset spread inside each period; unset = period - max_stall.
        std::optional<SimTime> onset_jitter;

        SimTime jitter_span() const noexcept { return onset_jitter.value_or(period - max_stall); }
        void validate() const;
    };

    /// Extra forwarding delay at time t for an AP with the given phase and
    /// per-cycle jitter key; 0 outside the stall window.
    SimTime ap_stall_delay(SimTime t, const ApStallConfig &cfg, SimTime phase, std::uint64_t jitter_key);

    class ApStallModel
    {
    public:
        ApStallModel(const ApStallConfig &cfg, std::uint64_t seed, int n_aps);
        SimTime delay(SimTime t, int ap_id) const;
        SimTime phase(int ap_id) const { return phases_.at(static_cast<std::size_t>(ap_id)); }

    private:
        ApStallConfig cfg_;
        std::vector<SimTime> phases_;
        std::vector<std::uint64_t> keys_;
    };

    // ---------------------------------------------------------------- adjacent channel interference

    struct AciConfig
    {
        bool enabled = false;
        // Coupling by separation step: 5 GHz steps are 4 channel numbers,
        // 2.4 GHz steps are 5. The last entry applies to farther channels.
        std::vector<double> coupling_by_step{1.0, 0.9, 0.5, 0.3, 0.1};
        double p_ack_corrupt = 1.0;
        double busy_sense_threshold = 0.2;

        void validate() const;
    };

    /// Coupling between two co-located adapters; 0 when disabled, cross-band or same channel.
    double aci_coupling(const AciConfig &cfg, int channel_a, int channel_b);

    inline bool aci_senses_busy(const AciConfig &cfg, double coupling) { return coupling > 0.0 && coupling >= cfg.busy_sense_threshold; }
    inline double aci_ack_corrupt_probability(const AciConfig &cfg, double coupling) { return std::min(1.0, cfg.p_ack_corrupt * coupling); }

    struct AirFrame
    {
        SimTime t_request = 0;
        SimTime t_air_start = 0;
        SimTime t_air_end = 0;
    };

    struct AciCoupledFrame
    {
        AirFrame frame;
        int backoff_slots = 0;
        bool deferred = false;
        bool ack_lost = false;
    };

    // Couples the channel-under-test timeline M with the co-located
    // interferer timeline I. M frames carry request time and airtime
    // (t_air_end - t_air_start); I frames are taken as fixed air intervals.
    // Sequential frames on M are assumed not to overlap each other.
    std::vector<AciCoupledFrame> aci_couple(const std::vector<AirFrame> &timeline_m,
                                            const std::vector<AirFrame> &timeline_i, double coupling,
                                            const AciConfig &cfg, const ChannelConfig &m_cfg,
                                            const std::function<int(int)> &draw_backoff,
                                            const std::function<bool(double)> &draw_corrupt);

    struct ImpairmentConfig
    {
        DtimConfig dtim;
        NmConfig nm;
        ApStallConfig ap_stall;
        AciConfig aci;
    };

} // namespace prpsim
