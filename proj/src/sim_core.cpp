#include "prpsim/sim_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <tuple>

namespace prpsim
{
    namespace
    {
        std::uint64_t splitmix64(std::uint64_t &state) noexcept
        {
            std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
            z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
            z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
            return z ^ (z >> 31);
        }

        constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept
        {
            return (x << k) | (x >> (64 - k));
        }

        std::uint64_t fnv1a(std::string_view s) noexcept
        {
            std::uint64_t h = 0xCBF29CE484222325ULL;
            for (unsigned char c : s)
            {
                h ^= c;
                h *= 0x100000001B3ULL;
            }
            return h;
        }
    } // namespace

    bool Simulator::later(const Entry &a, const Entry &b) noexcept
    {
        return std::tie(a.fire_at, a.priority, a.id) > std::tie(b.fire_at, b.priority, b.id);
    }

    EventId Simulator::schedule(SimTime fire_at, Action action, int priority)
    {
        if (fire_at < now_)
            throw std::logic_error("event scheduled in the past: " + std::to_string(fire_at) + " < " + std::to_string(now_));
        const EventId id = next_id_++;
        heap_.push_back(Entry{fire_at, priority, id, std::move(action)});
        std::push_heap(heap_.begin(), heap_.end(), &Simulator::later);
        return id;
    }

    std::uint64_t Simulator::run_until(SimTime t_end)
    {
        if (t_end < now_)
            throw std::invalid_argument("run_until: t_end precedes the current clock");
        std::uint64_t count = 0;
        while (!heap_.empty() && heap_.front().fire_at <= t_end)
        {
            std::pop_heap(heap_.begin(), heap_.end(), &Simulator::later);
            Entry e = std::move(heap_.back());
            heap_.pop_back();
            now_ = std::max(now_, e.fire_at);
            e.action();
            ++count;
        }
        fired_ += count;
        return count;
    }

    std::uint64_t Simulator::run()
    {
        return run_until(std::numeric_limits<SimTime>::max());
    }

    std::uint64_t stream_key(std::uint64_t master_seed, std::string_view label)
    {
        std::uint64_t st = master_seed ^ rotl(fnv1a(label), 17);
        splitmix64(st);
        return splitmix64(st);
    }

    double counter_uniform01(std::uint64_t key, std::uint64_t counter)
    {
        std::uint64_t st = key ^ (counter * 0xD1B54A32D192ED03ULL);
        splitmix64(st);
        return static_cast<double>(splitmix64(st) >> 11) * 0x1.0p-53;
    }

    RngStream::RngStream(std::uint64_t master_seed, std::string_view label)
        : master_seed_(master_seed), label_(label)
    {
        std::uint64_t st = stream_key(master_seed, label);
        for (auto &w : s_)
            w = splitmix64(st);
    }

    std::uint64_t RngStream::next_u64() noexcept
    {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    double RngStream::uniform01() noexcept
    {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double RngStream::uniform(double lo, double hi)
    {
        if (!(hi >= lo))
            throw std::invalid_argument("uniform: hi < lo");
        if (hi == lo)
            return lo;
        return lo + uniform01() * (hi - lo);
    }

    std::int64_t RngStream::uniform_int(std::int64_t lo, std::int64_t hi)
    {
        if (hi < lo)
            throw std::invalid_argument("uniform_int: hi < lo");
        const std::uint64_t range = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1;
        if (range == 0) // full 64-bit span
            return static_cast<std::int64_t>(next_u64());
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - (std::numeric_limits<std::uint64_t>::max() % range);
        std::uint64_t x;
        do
        {
            x = next_u64();
        } while (x >= limit);
        return lo + static_cast<std::int64_t>(x % range);
    }

    double RngStream::exponential(double mean)
    {
        if (!(mean > 0.0))
            throw std::invalid_argument("exponential: mean must be positive");
        return -mean * std::log1p(-uniform01());
    }

} // namespace prpsim
