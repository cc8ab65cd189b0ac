#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace prpsim
{
    /// Simulated time in integer nanoseconds since the start of a run.
    using SimTime = std::int64_t;

    /// Marker for timestamps that never happened (lost frame, missing ACK).
    inline constexpr SimTime kAbsent = -1;

    namespace literals
    {
        constexpr SimTime operator""_ns(unsigned long long v) { return static_cast<SimTime>(v); }
        constexpr SimTime operator""_us(unsigned long long v) { return static_cast<SimTime>(v) * 1'000; }
        constexpr SimTime operator""_ms(unsigned long long v) { return static_cast<SimTime>(v) * 1'000'000; }
        constexpr SimTime operator""_s(unsigned long long v) { return static_cast<SimTime>(v) * 1'000'000'000; }
    } // namespace literals

    constexpr double to_ms(SimTime t) { return static_cast<double>(t) / 1e6; }
    constexpr double to_us(SimTime t) { return static_cast<double>(t) / 1e3; }

    /// Floor division that rounds toward negative infinity.
    constexpr std::int64_t floor_div(std::int64_t a, std::int64_t b)
    {
        std::int64_t q = a / b;
        if ((a % b != 0) && ((a < 0) != (b < 0)))
            --q;
        return q;
    }

    using EventId = std::uint64_t;

    // Single-threaded event loop. Events with equal fire time are ordered by
    // (priority, insertion id), so every run has one total order.
    class Simulator
    {
    public:
        using Action = std::function<void()>;

        /// Throws std::logic_error when fire_at lies in the past.
        EventId schedule(SimTime fire_at, Action action, int priority = 0);

        /// Fires every event with fire_at <= t_end; returns how many fired.
        std::uint64_t run_until(SimTime t_end);

        /// Drains the queue.
        std::uint64_t run();

        SimTime now() const noexcept { return now_; }
        bool empty() const noexcept { return heap_.empty(); }
        std::size_t pending() const noexcept { return heap_.size(); }
        std::uint64_t fired() const noexcept { return fired_; }

    private:
        struct Entry
        {
            SimTime fire_at;
            int priority;
            EventId id;
            Action action;
        };
        static bool later(const Entry &a, const Entry &b) noexcept;

        std::vector<Entry> heap_;
        SimTime now_ = 0;
        EventId next_id_ = 1;
        std::uint64_t fired_ = 0;
    };

    /// Stable 64-bit key for a (master seed, label) pair.
    std::uint64_t stream_key(std::uint64_t master_seed, std::string_view label);

    /// Counter-based draw in [0,1): the same (key, counter) always yields the same value.
    double counter_uniform01(std::uint64_t key, std::uint64_t counter);

    // Label-keyed random stream (xoshiro256** seeded through splitmix64).
    // Identical (seed, label) pairs replay the same sequence; distinct labels
    // are independent, so enabling one model never shifts another's draws.
    class RngStream
    {
    public:
        RngStream(std::uint64_t master_seed, std::string_view label);

        std::uint64_t next_u64() noexcept;
        double uniform01() noexcept;
        double uniform(double lo, double hi);
        std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
        double exponential(double mean);
        bool bernoulli(double p) noexcept { return p > 0.0 && uniform01() < p; }

        std::uint64_t master_seed() const noexcept { return master_seed_; }
        const std::string &label() const noexcept { return label_; }

    private:
        std::uint64_t master_seed_;
        std::string label_;
        std::array<std::uint64_t, 4> s_{};
    };

} // namespace prpsim
