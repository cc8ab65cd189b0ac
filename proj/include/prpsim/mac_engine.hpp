#pragma once

#include "prpsim/channel_mac.hpp"
#include "prpsim/impairments.hpp"
#include "prpsim/sim_core.hpp"

#include <deque>
#include <functional>
#include <string>
#include <vector>

namespace prpsim
{
    enum class FrameKind
    {
        unicast,   // data + SIFS + ACK exchange, retries
        multicast, // single unconfirmed attempt
        load       // interferer occupancy, never recorded
    };

    struct Frame
    {
        FrameKind kind = FrameKind::unicast;
        int payload = 0;
        TxRecord *rec = nullptr; // null for load frames
    };

    struct AirInterval
    {
        SimTime start;
        SimTime data_end;
        SimTime resv_end; // data_end, or the end of SIFS + ACK for confirmed frames
        int owner;
        bool colocated; // sent by an adapter of the redundant station
    };

    // Air activity of one channel, ordered by start time.
    class Medium
    {
    public:
        void add(const AirInterval &iv, SimTime now);
        const std::deque<AirInterval> &log() const noexcept { return log_; }
        SimTime max_len() const noexcept { return max_len_; }
        /// Total reserved air time (data plus ACK exchange) ever added.
        SimTime busy_time() const noexcept { return busy_; }

    private:
        std::deque<AirInterval> log_;
        SimTime max_len_ = 0;
        SimTime busy_ = 0;
    };

    // Shared air state of every channel plus the ACI coupling between the
    // co-located adapters of the redundant station.
    class MacEnvironment
    {
    public:
        MacEnvironment(std::vector<ChannelConfig> channels, AciConfig aci);

        int channel_count() const noexcept { return static_cast<int>(media_.size()); }
        const ChannelConfig &channel(int idx) const { return channels_.at(static_cast<std::size_t>(idx)); }
        double coupling(int a, int b) const { return coupling_[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]; }

        void add(int medium, const AirInterval &iv, SimTime now) { media_[static_cast<std::size_t>(medium)].add(iv, now); }
        const Medium &medium(int idx) const { return media_.at(static_cast<std::size_t>(idx)); }

        // Latest end of activity sensed by `owner` over [from, to]: own-channel
        // reservations starting at or before `to` and ending after `from`, plus
        // co-located data frames on channels coupled above the sense threshold.
        SimTime sense(int medium, int owner, bool colocated, SimTime from, SimTime to) const;

        // Probability that a co-located transmission corrupts an ACK received over [a0, a1).
        double ack_corrupt_probability(int medium, int owner, SimTime a0, SimTime a1) const;

    private:
        std::vector<ChannelConfig> channels_;
        AciConfig aci_;
        std::vector<Medium> media_;
        std::vector<std::vector<double>> coupling_;
    };

    // One DCF transmitter with a FIFO queue. The head frame contends, is sent,
    // waits for its ACK and is retried per the channel's retry limit. Frames
    // are submitted at the current simulation time.
    class Station
    {
    public:
        Station(Simulator &sim, MacEnvironment &env, int medium, int id, const std::string &label, bool colocated,
                std::uint64_t seed);

        Station(const Station &) = delete;
        Station &operator=(const Station &) = delete;

        void submit(const Frame &f);

        std::size_t queued() const noexcept { return queue_.size(); }
        std::uint64_t overflow_drops() const noexcept { return overflow_drops_; }

        // Waiting frames beyond this count evict the oldest waiting one; 0 = unbounded.
        std::size_t capacity = 0;
        // End of the blocking interval containing t, or t when the adapter may transmit.
        std::function<SimTime(SimTime)> blocked_until;
        // True when the multicast receiver cannot hear [start, end).
        std::function<bool(SimTime, SimTime)> receiver_absent;
        // Maps the data frame's end (first successful reception) to t_eth.
        std::function<SimTime(const Frame &, SimTime)> on_delivery;

    private:
        void start_service(bool backoff_required);
        void access(SimTime t_request, bool backoff_required);
        void try_start(SimTime s, SimTime idle_from);
        void transmit(SimTime s);
        void exchange_done();
        void finish();
        int draw_backoff();

        Simulator &sim_;
        MacEnvironment &env_;
        int medium_;
        int id_;
        ChannelConfig cfg_;
        bool colocated_;
        SimTime ack_air_;
        RngStream backoff_rng_;
        LossProcess data_loss_;
        LossProcess ack_loss_;
        RngStream aci_rng_;

        std::deque<Frame> queue_;
        bool in_service_ = false;
        int attempt_ = 0;
        int cw_ = 0;
        bool ever_delivered_ = false;
        bool delivered_now_ = false;
        SimTime data_end_ = 0;
        std::uint64_t overflow_drops_ = 0;
    };

} // namespace prpsim
