#include "prpsim/scenario.hpp"

#include <doctest.h>

#include <nlohmann/json.hpp>

#include <string>

using namespace prpsim;
using namespace prpsim::literals;

namespace
{
    const char *kMinimal = R"({
        "name": "t",
        "seed": 3,
        "duration": 1000000000,
        "channels": [{"channel_number": 165}],
        "streams": [{"name": "s", "Tc": 10000000, "channels": [165]}]
    })";

    std::string error_of(const std::string &text)
    {
        try
        {
            parse_scenario(text);
        }
        catch (const ConfigError &e)
        {
            return e.what();
        }
        return {};
    }

    std::string patched(const char *path, const nlohmann::json &value)
    {
        auto j = nlohmann::json::parse(kMinimal);
        j[nlohmann::json::json_pointer(path)] = value;
        return j.dump();
    }
} // namespace

TEST_CASE("minimal scenario fills defaults")
{
    const auto s = parse_scenario(kMinimal);
    CHECK(s.name == "t");
    CHECK(s.seed == 3);
    REQUIRE(s.channels.size() == 1);
    CHECK(s.channels[0].band == Band::ghz5);
    CHECK(s.channels[0].difs() == 34_us);
    CHECK(s.streams[0].kind == StreamKind::unicast_up);
    CHECK(s.channel_index(165) == 0);
    CHECK(s.channel_index(1) == -1);
    CHECK_FALSE(s.aci_experiment.has_value());
}

TEST_CASE("canonical dump round-trips")
{
    auto s = parse_scenario(kMinimal);
    s.impairments.nm.enabled = true;
    s.impairments.dtim.enabled = true;
    s.impairments.dtim.p = 3;
    s.aci_experiment = AciExperimentConfig{};
    s.loads.push_back({});
    s.channels.push_back(ChannelConfig::for_channel(161));
    s.channels[0].loss_model.kind = LossKind::gilbert_elliott;
    s.channels[0].loss_model.p_gb = 0.02;
    const std::string text = dump_scenario(s);
    const auto back = parse_scenario(text);
    CHECK(dump_scenario(back) == text);
    CHECK(config_hash(back) == config_hash(s));
    CHECK(config_hash(s).size() == 16);

    s.seed += 1;
    CHECK(config_hash(s) != config_hash(back));
}

TEST_CASE("enum spellings")
{
    CHECK(parse_scenario(patched("/streams/0/kind", "multicast-down")).streams[0].kind == StreamKind::multicast_down);
    CHECK(parse_scenario(patched("/ap/mode", "one-dual-band-ap")).ap.mode == ApMode::one_dual_band_ap);
    CHECK(parse_scenario(patched("/impairments/nm/multicast_mode", "drop")).impairments.nm.multicast_mode ==
          NmMulticastMode::drop);
    CHECK(error_of(patched("/streams/0/kind", "broadcast")).find("streams[0].kind") != std::string::npos);
}

TEST_CASE("unknown keys are rejected with their path")
{
    const auto msg = error_of(patched("/channels/0/retry_limt", 3));
    CHECK(msg.find("channels[0].retry_limt") != std::string::npos);
    CHECK(error_of(patched("/colour", "red")).find("colour") != std::string::npos);
}

TEST_CASE("invalid values name the field")
{
    CHECK(error_of(patched("/streams/0/Tc", 0)).find("streams[0]") != std::string::npos);
    CHECK(error_of(patched("/channels/0/loss_model/p_loss", 2.0)).find("channels[0]") != std::string::npos);
    CHECK(error_of(patched("/channels/0/channel_number", 14)).find("channels[0]") != std::string::npos);
    CHECK(error_of(patched("/seed", "x")).find("seed") != std::string::npos);
    CHECK_THROWS_AS(parse_scenario("{not json"), ConfigError);
}

TEST_CASE("streams must reference configured channels")
{
    const auto msg = error_of(patched("/streams/0/channels", nlohmann::json::array({165, 1})));
    CHECK(msg.find("streams[0]") != std::string::npos);
    CHECK(msg.find('1') != std::string::npos);
}

TEST_CASE("stall sharing follows the AP mode unless set")
{
    auto s = parse_scenario(kMinimal);
    CHECK_FALSE(s.stall_shared());
    s.ap.mode = ApMode::one_dual_band_ap;
    CHECK(s.stall_shared());
    s.impairments.ap_stall.shared_across_channels = false;
    CHECK_FALSE(s.stall_shared());
}

TEST_CASE("manifests verify their hash")
{
    const auto s = parse_scenario(kMinimal);
    const std::string m = make_manifest(s);
    const auto j = nlohmann::json::parse(m);
    CHECK(j.at("config_hash") == config_hash(s));
    CHECK(j.at("seed") == 3);
    CHECK(dump_scenario(parse_scenario(m)) == dump_scenario(s));

    auto tampered = j;
    tampered["scenario"]["seed"] = 4;
    CHECK(error_of(tampered.dump()).find("config_hash") != std::string::npos);
}

TEST_CASE("shipped configs load")
{
    const std::filesystem::path dir = PRPSIM_CONFIG_DIR;
    int n = 0;
    for (const auto &e : std::filesystem::directory_iterator(dir))
    {
        if (e.path().extension() != ".json")
            continue;
        CAPTURE(e.path().string());
        CHECK_NOTHROW(load_scenario(e.path()));
        ++n;
    }
    CHECK(n >= 1);
    const auto b = load_scenario(dir / "baseline.json");
    CHECK(b.channels.size() == 2);
    CHECK(b.streams.size() == 2);
    CHECK_THROWS_AS(load_scenario(dir / "missing.json"), std::exception);
}
