#pragma once

#include "prpsim/impairments.hpp"
#include "prpsim/prp.hpp"
#include "prpsim/scenario.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace prpsim
{
    struct ChannelTrace
    {
        int channel_number = 0;
        std::vector<TxRecord> records; // sorted by seq
    };

    struct StreamResult
    {
        std::string name;
        StreamKind kind = StreamKind::unicast_up;
        bool redundant = true; // false for the ACI experiment's M/I pair
        std::vector<ChannelTrace> channels;
        RedundantLinkView view;

        bool acked() const noexcept { return kind == StreamKind::unicast_up; }
        std::vector<const std::vector<TxRecord> *> traces() const;
    };

    struct RunResult
    {
        Scenario scenario;
        std::vector<StreamResult> streams;
        std::vector<Blackout> blackouts; // STA adapter index = channel index
        std::uint64_t events = 0;

        const StreamResult &stream(const std::string &name) const;
    };

    /// Executes one scenario to completion: every generated packet ends delivered or lost.
    RunResult run_scenario(const Scenario &scenario);

    struct SummaryRow
    {
        std::string label;
        StatsSummary stats;
    };

    /// Per-channel, per-set and redundant summaries of a run.
    std::vector<SummaryRow> run_summary(const RunResult &run);

    /// Writes traces, summaries and the manifest under out_dir; returns the files written.
    std::vector<std::filesystem::path> write_run(const RunResult &run, const std::filesystem::path &out_dir);

    std::string channel_trace_name(const std::string &stream, int channel_number);
    std::string redundant_trace_name(const std::string &stream);

} // namespace prpsim
