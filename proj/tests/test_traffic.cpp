#include "prpsim/traffic.hpp"

#include <doctest.h>

#include <algorithm>
#include <stdexcept>

using namespace prpsim;
using namespace prpsim::literals;

namespace
{
    StreamConfig stream(SimTime Tc, std::optional<std::uint64_t> count)
    {
        StreamConfig s;
        s.Tc = Tc;
        s.count = count;
        s.channels = {1, 165};
        return s;
    }
} // namespace

TEST_CASE("cyclic stream numbering and timing")
{
    const auto pk = cyclic_stream(stream(100_ms, 3));
    REQUIRE(pk.size() == 3);
    CHECK(pk[0] == GeneratedPacket{1, 0});
    CHECK(pk[1] == GeneratedPacket{2, 100_ms});
    CHECK(pk[2] == GeneratedPacket{3, 200_ms});

    StreamConfig shifted = stream(100_ms, 2);
    shifted.start_phase = 7_ms;
    const auto sp = cyclic_stream(shifted);
    CHECK(sp[0].t_gen == 7_ms);
    CHECK(sp[1].t_gen == 107_ms);
}

TEST_CASE("duration-bounded stream count")
{
    const auto s = stream(10_ms, std::nullopt);
    CHECK(s.packet_count(3600_s) == 360'000);
    CHECK(cyclic_stream(s, 3600_s).back().t_gen == 3600_s - 10_ms);
    CHECK(s.packet_count(0) == 0);

    StreamConfig own = s;
    own.duration = 1_s;
    CHECK(own.packet_count(3600_s) == 100);
    own.start_phase = 5_ms;
    CHECK(own.packet_count(3600_s) == 100);
}

TEST_CASE("stream validation")
{
    StreamConfig s = stream(0, 1);
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = stream(10_ms, 1);
    s.channels.clear();
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = stream(10_ms, 1);
    s.start_phase = -1;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("burst load long-run request rate")
{
    BurstLoadConfig cfg;
    // frozen from tests/oracles/derived_values.py
    CHECK(cfg.duty_cycle() == doctest::Approx(0.375).epsilon(1e-3));

    BurstProcess p(cfg, RngStream(11, burst_stream_label(165, 0)));
    const std::uint64_t n = 2'000'000;
    SimTime last = 0;
    bool ordered = true;
    for (std::uint64_t i = 0; i < n; ++i)
    {
        const SimTime t = p.next();
        ordered = ordered && t >= last;
        last = t;
    }
    CHECK(ordered);
    const double rate = static_cast<double>(n) / (static_cast<double>(last) / 1e9);
    CHECK(rate == doctest::Approx(937.503).epsilon(0.02));
}

TEST_CASE("burst requests inside a burst are spaced by the intra gap")
{
    BurstLoadConfig cfg;
    const auto t = burst_interferer(cfg, 5, 0, 10_s);
    REQUIRE(t.size() > 100);
    std::size_t intra = 0;
    for (std::size_t i = 1; i < t.size(); ++i)
    {
        const SimTime gap = t[i] - t[i - 1];
        CHECK(gap >= cfg.intra_gap);
        intra += gap == cfg.intra_gap;
    }
    CHECK(intra > t.size() / 2);
    CHECK(t.back() < 10_s);
}

TEST_CASE("burst interferers are per-node streams")
{
    BurstLoadConfig cfg;
    CHECK(burst_interferer(cfg, 5, 0, 5_s) == burst_interferer(cfg, 5, 0, 5_s));
    CHECK(burst_interferer(cfg, 5, 0, 5_s) != burst_interferer(cfg, 5, 1, 5_s));
    cfg.n_nodes = -1;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.n_nodes = 0;
    CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("ACI experiment partitions packets into A and NA")
{
    AciExperimentConfig cfg;
    const auto s = aci_experiment_schedule(cfg, 4);
    REQUIRE(s.size() == 4);
    CHECK(s[0].tag == SetTag::not_a);
    CHECK(s[1].tag == SetTag::a);
    CHECK(s[2].tag == SetTag::not_a);
    CHECK(s[3].tag == SetTag::a);
    CHECK_FALSE(s[0].t_i.has_value());
    REQUIRE(s[1].t_i.has_value());
    CHECK(*s[1].t_i == s[1].t_m - 10_us);
    CHECK(s[1].t_m == cfg.start_phase + cfg.Tc);

    cfg.duplex_every = 1;
    const auto all = aci_experiment_schedule(cfg, 50);
    CHECK(std::all_of(all.begin(), all.end(), [](const AciRequest &r) { return r.tag == SetTag::a && r.t_i; }));

    cfg.duplex_every = 3;
    const auto third = aci_experiment_schedule(cfg, 300);
    const auto n_a = std::count_if(third.begin(), third.end(), [](const AciRequest &r) { return r.tag == SetTag::a; });
    CHECK(n_a == 100);
    for (const auto &r : third)
        CHECK((r.tag == SetTag::a) == r.t_i.has_value());
}

TEST_CASE("ACI experiment validation and count")
{
    AciExperimentConfig cfg;
    CHECK(cfg.packet_count(cfg.start_phase + 10 * cfg.Tc) == 10);
    cfg.count = 7;
    CHECK(cfg.packet_count(0) == 7);
    cfg.m_channel = cfg.i_channel;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.start_phase = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.lead = 10_us;
    CHECK_NOTHROW(cfg.validate());
}
