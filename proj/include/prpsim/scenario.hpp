#pragma once

#include "prpsim/channel_mac.hpp"
#include "prpsim/impairments.hpp"
#include "prpsim/traffic.hpp"

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace prpsim
{
    // Invalid configuration; the message starts with the offending field path.
    class ConfigError : public std::runtime_error
    {
    public:
        ConfigError(const std::string &path, const std::string &what)
            : std::runtime_error(path.empty() ? what : path + ": " + what), path_(path)
        {
        }
        const std::string &path() const noexcept { return path_; }

    private:
        std::string path_;
    };

    struct Scenario
    {
        std::string name = "scenario";
        std::uint64_t seed = 1;
        SimTime duration = 60'000'000'000;
        std::vector<ChannelConfig> channels;
        ApConfig ap;
        ImpairmentConfig impairments;
        std::vector<StreamConfig> streams;
        std::vector<BurstLoadConfig> loads;
        std::optional<AciExperimentConfig> aci_experiment;

        /// Position of a channel number in `channels`, or -1.
        int channel_index(int channel_number) const;

        /// Whether AP stalls hit every channel at the same instants.
        bool stall_shared() const;

        /// Throws ConfigError naming the first invalid field.
        void validate() const;
    };

    /// Parses a scenario document, or the scenario embedded in a run manifest.
    Scenario parse_scenario(std::string_view text);
    Scenario load_scenario(const std::filesystem::path &path);

    /// Canonical JSON text with every field spelled out; parse_scenario round-trips it.
    std::string dump_scenario(const Scenario &s, int indent = 2);

    /// FNV-1a 64 of the compact canonical dump, as 16 hex digits.
    std::string config_hash(const Scenario &s);

    /// {config_hash, seed, scenario} document that reproduces a run.
    std::string make_manifest(const Scenario &s);

} // namespace prpsim
