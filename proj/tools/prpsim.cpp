// prpsim: run redundant Wi-Fi scenarios, analyze their traces, compare runs.

#include "prpsim/report.hpp"
#include "prpsim/runner.hpp"
#include "prpsim/scenario.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <iostream>

namespace
{
    int cmd_run(const std::string &config, const std::string &out, const std::optional<std::uint64_t> &seed,
                const std::optional<double> &duration_s)
    {
        prpsim::Scenario sc = prpsim::load_scenario(config);
        if (seed)
            sc.seed = *seed;
        if (duration_s)
            sc.duration = static_cast<prpsim::SimTime>(*duration_s * 1e9);
        sc.validate();
        const auto t0 = std::chrono::steady_clock::now();
        const auto run = prpsim::run_scenario(sc);
        const auto files = prpsim::write_run(run, out);
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::cout << prpsim::format_summary_table(prpsim::run_summary(run));
        std::cout << "\nscenario " << sc.name << "  seed " << sc.seed << "  hash " << prpsim::config_hash(sc) << "  events "
                  << run.events << "  wall " << wall << " s\n";
        for (const auto &f : files)
            std::cout << "wrote " << f.string() << '\n';
        return 0;
    }
} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Deterministic simulator and analysis toolkit for redundant Wi-Fi links"};
    app.require_subcommand(1);

    std::string config, out = ".";
    std::optional<std::uint64_t> seed;
    std::optional<double> duration;
    auto *run = app.add_subcommand("run", "Simulate a scenario and write traces, summary and manifest");
    run->add_option("--config", config, "Scenario JSON or a run manifest")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out, "Output directory")->required();
    run->add_option("--seed", seed, "Override the scenario seed");
    run->add_option("--duration", duration, "Override the scenario duration in seconds")->check(CLI::PositiveNumber);

    std::vector<std::string> traces;
    std::string analyze_out = ".";
    double tau_ms = 5.0, bin_us = 1.0;
    auto *analyze = app.add_subcommand("analyze", "Summaries, CCDF/PDF curves, independence report and scatter");
    analyze->add_option("traces", traces, "Channel or redundant trace CSVs")->required()->check(CLI::ExistingFile);
    analyze->add_option("--out", analyze_out, "Report directory");
    analyze->add_option("--tau", tau_ms, "Joint-tail threshold in ms")->check(CLI::PositiveNumber);
    analyze->add_option("--bin", bin_us, "PDF bin width in us")->check(CLI::PositiveNumber);

    std::string trace_a, trace_b;
    auto *compare = app.add_subcommand("compare", "Side-by-side statistics of two traces");
    compare->add_option("trace_a", trace_a)->required()->check(CLI::ExistingFile);
    compare->add_option("trace_b", trace_b)->required()->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (*run)
            return cmd_run(config, out, seed, duration);
        if (*analyze)
        {
            prpsim::AnalyzeOptions opt;
            opt.tau = static_cast<prpsim::SimTime>(tau_ms * 1e6);
            opt.pdf_bin = std::max<prpsim::SimTime>(1, static_cast<prpsim::SimTime>(bin_us * 1e3));
            std::vector<std::filesystem::path> paths(traces.begin(), traces.end());
            std::cout << prpsim::analyze_traces(paths, analyze_out, opt);
            return 0;
        }
        if (*compare)
        {
            std::cout << prpsim::compare_traces(trace_a, trace_b);
            return 0;
        }
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
