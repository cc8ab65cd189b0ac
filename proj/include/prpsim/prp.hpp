#pragma once

#include "prpsim/analysis.hpp"
#include "prpsim/channel_mac.hpp"

#include <cstdint>
#include <optional>
#include <unordered_set>
#include <vector>

namespace prpsim
{
    struct PacketCopy
    {
        std::uint64_t seq;
        int channel;
        SimTime t_gen;

        friend bool operator==(const PacketCopy &, const PacketCopy &) = default;
    };

    /// One copy per channel, sharing seq and t_gen. Throws when no channel is given.
    std::vector<PacketCopy> duplicate(std::uint64_t seq, SimTime t_gen, const std::vector<int> &channels);

    struct Arrival
    {
        std::uint64_t seq;
        int channel;
        SimTime t_arrival;
    };

    struct Accepted
    {
        std::uint64_t seq;
        int channel;
        SimTime t_accept;

        friend bool operator==(const Accepted &, const Accepted &) = default;
    };

    // First-copy-wins duplicate discard over a time-ordered arrival stream.
    // Only accepted sequence numbers are retained.
    class Deduplicator
    {
    public:
        /// The accepted copy, or nothing for a late duplicate. Throws on out-of-order input.
        std::optional<Accepted> offer(const Arrival &a);

        std::uint64_t accepted() const noexcept { return accepted_; }
        std::uint64_t discarded() const noexcept { return discarded_; }

    private:
        std::unordered_set<std::uint64_t> seen_;
        SimTime last_ = 0;
        std::uint64_t accepted_ = 0;
        std::uint64_t discarded_ = 0;
    };

    struct RedundantEntry
    {
        std::uint64_t seq = 0;
        SimTime t_gen = 0;
        int accepted_channel = -1; // channel number; -1 when every copy was lost
        SimTime t_accept = kAbsent;

        bool lost() const noexcept { return t_accept == kAbsent; }
        friend bool operator==(const RedundantEntry &, const RedundantEntry &) = default;
    };

    // Per-seq outcome of a redundant link, sorted by seq. Equal arrival times
    // resolve to the channel listed first.
    struct RedundantLinkView
    {
        std::vector<int> channels;
        std::vector<RedundantEntry> entries;
        std::uint64_t late_duplicates = 0;
    };

    RedundantLinkView build_redundant_view(const std::vector<int> &channels,
                                           const std::vector<const std::vector<TxRecord> *> &traces);

    /// Per-seq minimum over the channels' delivered copies of the chosen metric.
    std::vector<LatencySample> redundant_samples(const std::vector<const std::vector<TxRecord> *> &traces,
                                                 Metric metric);

    /// d samples of an already built view.
    std::vector<LatencySample> redundant_samples(const RedundantLinkView &view);

} // namespace prpsim
