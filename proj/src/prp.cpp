#include "prpsim/prp.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <tuple>

namespace prpsim
{
    std::vector<PacketCopy> duplicate(std::uint64_t seq, SimTime t_gen, const std::vector<int> &channels)
    {
        if (channels.empty())
            throw std::invalid_argument("duplicate: no channel");
        std::vector<PacketCopy> out;
        out.reserve(channels.size());
        for (int ch : channels)
            out.push_back({seq, ch, t_gen});
        return out;
    }

    std::optional<Accepted> Deduplicator::offer(const Arrival &a)
    {
        if (a.t_arrival < last_)
            throw std::invalid_argument("dedup: arrivals are not time-ordered");
        last_ = a.t_arrival;
        if (!seen_.insert(a.seq).second)
        {
            ++discarded_;
            return std::nullopt;
        }
        ++accepted_;
        return Accepted{a.seq, a.channel, a.t_arrival};
    }

    RedundantLinkView build_redundant_view(const std::vector<int> &channels,
                                           const std::vector<const std::vector<TxRecord> *> &traces)
    {
        if (channels.size() != traces.size())
            throw std::invalid_argument("build_redundant_view: one trace per channel is required");
        RedundantLinkView view;
        view.channels = channels;

        struct Keyed
        {
            SimTime t;
            std::size_t idx;
            std::uint64_t seq;
        };
        std::vector<Keyed> arrivals;
        std::map<std::uint64_t, RedundantEntry> by_seq;
        for (std::size_t i = 0; i < traces.size(); ++i)
            for (const TxRecord &r : *traces[i])
            {
                auto [it, fresh] = by_seq.try_emplace(r.seq, RedundantEntry{r.seq, r.t_gen, -1, kAbsent});
                if (!fresh && it->second.t_gen != r.t_gen)
                    throw std::invalid_argument("copies of seq " + std::to_string(r.seq) + " disagree on t_gen");
                if (r.t_eth != kAbsent)
                    arrivals.push_back({r.t_eth, i, r.seq});
            }
        std::sort(arrivals.begin(), arrivals.end(),
                  [](const Keyed &a, const Keyed &b) { return std::tie(a.t, a.idx, a.seq) < std::tie(b.t, b.idx, b.seq); });

        Deduplicator dedup;
        for (const Keyed &k : arrivals)
        {
            const auto acc = dedup.offer({k.seq, channels[k.idx], k.t});
            if (!acc)
                continue;
            RedundantEntry &e = by_seq.at(k.seq);
            if (e.t_accept != kAbsent)
                throw std::logic_error("seq " + std::to_string(k.seq) + " accepted twice");
            e.accepted_channel = acc->channel;
            e.t_accept = acc->t_accept;
        }
        view.late_duplicates = dedup.discarded();
        view.entries.reserve(by_seq.size());
        for (auto &[seq, e] : by_seq)
            view.entries.push_back(e);
        return view;
    }

    std::vector<LatencySample> redundant_samples(const std::vector<const std::vector<TxRecord> *> &traces, Metric metric)
    {
        std::map<std::uint64_t, LatencySample> best;
        for (const auto *trace : traces)
            for (const LatencySample &s : samples_from_records(*trace, metric))
            {
                auto [it, fresh] = best.try_emplace(s.seq, s);
                if (fresh || !s.delivered)
                    continue;
                LatencySample &b = it->second;
                if (!b.delivered || s.latency < b.latency)
                    b = s;
            }
        std::vector<LatencySample> out;
        out.reserve(best.size());
        for (auto &[seq, s] : best)
            out.push_back(s);
        return out;
    }

    std::vector<LatencySample> redundant_samples(const RedundantLinkView &view)
    {
        std::vector<LatencySample> out;
        out.reserve(view.entries.size());
        for (const auto &e : view.entries)
            out.push_back({e.seq, e.lost() ? 0 : e.t_accept - e.t_gen, !e.lost()});
        return out;
    }

} // namespace prpsim
