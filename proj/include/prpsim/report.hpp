#pragma once

#include "prpsim/analysis.hpp"
#include "prpsim/runner.hpp"
#include "prpsim/trace_io.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace prpsim
{
    /// Aligned text table: mean, sigma, min, p50, p99, p99.9, p99.99, max, PLR [, PLR'], n.
    std::string format_summary_table(const std::vector<SummaryRow> &rows);
    std::string summary_csv(const std::vector<SummaryRow> &rows);

    std::string curve_csv(const DistCurve &curve);
    std::string scatter_csv(const JointScatter &scatter);
    /// seq,latency_ms with -1 for lost packets.
    std::string series_csv(const std::vector<LatencySample> &samples);
    std::string format_independence(const IndependenceReport &report, const JointScatter &scatter);

    struct AnalyzeOptions
    {
        SimTime pdf_bin = 1'000;
        SimTime tau = 5'000'000;
        IndependenceThresholds thresholds;
    };

    /// Reads traces, writes the report files under out_dir and returns the summary text.
    std::string analyze_traces(const std::vector<std::filesystem::path> &traces, const std::filesystem::path &out_dir,
                               const AnalyzeOptions &opt = {});

    /// Side-by-side summaries of two traces of the same kind; throws on mismatched kinds.
    std::string compare_traces(const std::filesystem::path &a, const std::filesystem::path &b);

    /// Samples of a loaded trace (d for channel traces, accept latency for redundant ones).
    std::vector<LatencySample> trace_samples(const LoadedTrace &t, Metric metric = Metric::d,
                                             std::optional<SetTag> tag = std::nullopt);
    StatsSummary trace_summary(const LoadedTrace &t, std::optional<SetTag> tag = std::nullopt);

} // namespace prpsim
