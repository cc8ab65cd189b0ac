#include "prpsim/channel_mac.hpp"

#include <doctest.h>

#include <stdexcept>

using namespace prpsim;
using namespace prpsim::literals;

// Airtime and timing values below are frozen from tests/oracles/derived_values.py.

TEST_CASE("OFDM airtime")
{
    CHECK(frame_airtime(50, 28, 54) == 32_us);
    CHECK(frame_airtime(0, 14, 24) == 28_us);
    CHECK(frame_airtime(1500, 28, 54) == 248_us);
    CHECK(frame_airtime(0, 28, 6) == 64_us);
    CHECK_THROWS_AS(frame_airtime(50, 28, 11), std::invalid_argument);
    CHECK_THROWS_AS(frame_airtime(-1, 28, 54), std::invalid_argument);
}

TEST_CASE("channel defaults follow the band")
{
    const auto c5 = ChannelConfig::for_channel(165);
    CHECK(c5.band == Band::ghz5);
    CHECK(c5.sifs == 16_us);
    CHECK(c5.difs() == 34_us);
    CHECK(c5.data_airtime(50) == 32_us);
    CHECK(c5.ack_airtime() == 28_us);

    const auto c1 = ChannelConfig::for_channel(1);
    CHECK(c1.band == Band::ghz2_4);
    CHECK(c1.difs() == 28_us);

    ChannelConfig w = c5;
    w.wpa2 = true;
    CHECK(w.data_airtime(50) == 36_us);

    CHECK_THROWS(ChannelConfig::for_channel(14));
    CHECK_THROWS(ChannelConfig::for_channel(0));
    CHECK_THROWS(ChannelConfig::for_channel(166));
    ChannelConfig bad = c1;
    bad.band = Band::ghz5;
    CHECK_THROWS(bad.validate());
    bad = c1;
    bad.loss_model.p_loss = 1.5;
    CHECK_THROWS(bad.validate());
}

TEST_CASE("contention window doubles per retry up to cw_max")
{
    const auto c = ChannelConfig::for_channel(165);
    const int expected[] = {15, 31, 63, 127, 255, 511, 1023, 1023};
    for (int r = 0; r < 8; ++r)
        CHECK(contention_window(c, r) == expected[r]);
}

TEST_CASE("dcf_attempt timing")
{
    const auto c = ChannelConfig::for_channel(165);
    RngStream rng(1, "test.dcf");
    const SimTime t = 1_ms;

    SUBCASE("idle medium without pending backoff transmits after DIFS")
    {
        const auto a = dcf_attempt(c, 0, t, c.cw_min, false, rng);
        CHECK(a.t_air_start == t + 34_us);
        CHECK(a.backoff_slots == 0);
    }
    SUBCASE("busy medium defers to busy end + DIFS + k slots")
    {
        bool saw_k3 = false;
        for (int i = 0; i < 200; ++i)
        {
            const auto a = dcf_attempt(c, t + 240_us, t, c.cw_min, false, rng);
            REQUIRE(a.backoff_slots >= 0);
            REQUIRE(a.backoff_slots <= 15);
            CHECK(a.t_air_start == t + 240_us + 34_us + a.backoff_slots * 9_us);
            if (a.backoff_slots == 3)
            {
                CHECK(a.t_air_start == t + 301_us);
                saw_k3 = true;
            }
        }
        CHECK(saw_k3);
    }
    SUBCASE("required backoff on an idle medium")
    {
        const auto a = dcf_attempt(c, 0, t, c.cw_min, true, rng);
        CHECK(a.t_air_start == t + 34_us + a.backoff_slots * 9_us);
    }
    SUBCASE("legacy access always draws")
    {
        ChannelConfig legacy = c;
        legacy.immediate_access = false;
        int nonzero = 0;
        for (int i = 0; i < 100; ++i)
            nonzero += dcf_attempt(legacy, 0, t, legacy.cw_min, false, rng).backoff_slots > 0;
        CHECK(nonzero > 80);
    }
}

TEST_CASE("loss processes")
{
    SUBCASE("bernoulli rate")
    {
        LossProcess p(LossModel::bernoulli(0.05477), RngStream(4, "test.loss"));
        int lost = 0;
        const int n = 1'000'000;
        for (int i = 0; i < n; ++i)
            lost += p.lost();
        // 0.05 pp is about 2.2 binomial standard deviations
        CHECK(100.0 * lost / n == doctest::Approx(5.477).epsilon(0.05 / 5.477));
    }
    SUBCASE("gilbert-elliott stationary loss")
    {
        LossModel m;
        m.kind = LossKind::gilbert_elliott;
        m.p_gb = 0.01;
        m.p_bg = 0.1;
        m.p_loss_good = 0.0;
        m.p_loss_bad = 0.5;
        LossProcess p(m, RngStream(4, "test.ge"));
        int lost = 0, pairs = 0, prev = 0;
        const int n = 2'000'000;
        for (int i = 0; i < n; ++i)
        {
            const int l = p.lost();
            lost += l;
            pairs += l && prev;
            prev = l;
        }
        const double pi_bad = 0.01 / (0.01 + 0.1);
        CHECK(static_cast<double>(lost) / n == doctest::Approx(pi_bad * 0.5).epsilon(0.03));
        // bursty: consecutive losses are far more likely than under independence
        CHECK(static_cast<double>(pairs) / lost > 3.0 * lost / n);
    }
    SUBCASE("invalid probabilities")
    {
        CHECK_THROWS(LossProcess(LossModel::bernoulli(-0.1), RngStream(1, "x")));
    }
}

TEST_CASE("record invariants")
{
    TxRecord r;
    r.seq = 1;
    r.t_gen = 0;
    r.t_air_start = 34_us;
    r.t_air_end = 66_us;
    r.t_ack = 110_us;
    r.t_eth = 216_us;
    CHECK_FALSE(check_record(r).has_value());

    TxRecord bad = r;
    bad.t_air_start = -5;
    CHECK(check_record(bad).has_value());
    bad = r;
    bad.t_ack = 60_us;
    CHECK(check_record(bad).has_value());
    bad = r;
    bad.ack_lost = true;
    CHECK(check_record(bad).has_value());
    bad = r;
    bad.data_lost = true;
    CHECK(check_record(bad).has_value());
    bad = r;
    bad.t_eth = kAbsent;
    CHECK(check_record(bad).has_value());
}

TEST_CASE("link latency from the ACK timestamp equals the data end latency")
{
    const auto c = ChannelConfig::for_channel(165);
    TxRecord r;
    r.t_gen = 1_ms;
    r.t_air_start = 1_ms + 34_us;
    r.t_air_end = 1_ms + 66_us;
    r.t_ack = r.t_air_end + c.sifs + c.ack_airtime();
    CHECK(*link_latency(r, c) == r.t_air_end - r.t_gen);
    r.t_ack = kAbsent;
    CHECK_FALSE(link_latency(r, c).has_value());
}

TEST_CASE("AP forwarding")
{
    ApConfig two;
    CHECK(ap_forward(1_ms, two, Band::ghz5, 0) - 1_ms == 150_us);
    CHECK(ap_forward(1_ms, two, Band::ghz2_4, 0) - 1_ms == 150_us);
    ApConfig one;
    one.mode = ApMode::one_dual_band_ap;
    CHECK(ap_forward(1_ms, one, Band::ghz5, 0) - 1_ms == 190_us);
    CHECK(ap_forward(1_ms, one, Band::ghz2_4, 0) - 1_ms == 150_us);
    CHECK(ap_forward(1_ms, two, Band::ghz2_4, 20_ms) - 1_ms == 20_ms + 150_us);
}
