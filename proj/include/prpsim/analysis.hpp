#pragma once

#include "prpsim/channel_mac.hpp"
#include "prpsim/sim_core.hpp"

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace prpsim
{
    struct LatencySample
    {
        std::uint64_t seq = 0;
        SimTime latency = 0; // meaningful only when delivered
        bool delivered = false;

        friend bool operator==(const LatencySample &, const LatencySample &) = default;
    };

    enum class Metric
    {
        d,      // end-to-end: t_eth - t_gen
        d_prime // link latency from the ACK: t_air_end - t_gen of the acknowledged attempt
    };

    /// One sample per record, optionally restricted to one ACI set.
    std::vector<LatencySample> samples_from_records(const std::vector<TxRecord> &records, Metric metric,
                                                    std::optional<SetTag> tag = std::nullopt);

    /// Nearest-rank percentile of sorted values; q in hundredths of a percent (9990 = p99.9).
    SimTime nearest_rank(const std::vector<SimTime> &sorted, int q_centi_percent);

    struct StatsSummary
    {
        std::uint64_t n = 0; // generated
        std::uint64_t n_delivered = 0;
        // Latency fields in ms; absent when nothing was delivered.
        std::optional<double> mean, std, min, p50, p99, p999, p9999, max;
        double plr = 0.0;                // percent
        std::optional<double> plr_prime; // percent, confirmed traffic only
    };

    StatsSummary summarize(const std::vector<LatencySample> &samples);

    /// summarize() on d plus PLR' from missing ACKs when the trace is confirmed.
    StatsSummary summarize_trace(const std::vector<TxRecord> &records, bool acked,
                                 std::optional<SetTag> tag = std::nullopt);

    /// Fraction of samples not delivered.
    double loss_fraction(const std::vector<LatencySample> &samples);

    enum class CurveKind
    {
        ccdf,
        pdf
    };

    struct DistCurve
    {
        CurveKind kind = CurveKind::ccdf;
        std::vector<SimTime> grid;
        std::vector<double> values;
    };

    /// Sorted union of delivered latency values.
    std::vector<SimTime> make_grid(const std::vector<const std::vector<LatencySample> *> &sets);

    /// Fraction of delivered samples strictly above each grid point.
    DistCurve ccdf(const std::vector<LatencySample> &samples, const std::vector<SimTime> &grid);

    /// Histogram density in 1/ms; grid holds bin left edges.
    DistCurve pdf(const std::vector<LatencySample> &samples, SimTime bin_width = 1'000);

    /// Redundant-link CCDF estimated from two independent channels. PLRs are fractions.
    DistCurve compose_ccdf(const DistCurve &ccdf1, double plr1, const DistCurve &ccdf2, double plr2);
    double compose_ccdf_point(double ccdf1, double plr1, double ccdf2, double plr2);

    /// Redundant PLR of independent channels; same unit in and out.
    inline double compose_plr(double plr1, double plr2) { return plr1 * plr2; }

    enum class Verdict
    {
        independent,
        dependent
    };

    const char *to_string(Verdict v);

    struct IndependenceThresholds
    {
        double ks = 0.01;
        double plr_relative = 0.10;
        // Packets per channel; when > 0 a PLR gap within 3 binomial standard errors also passes.
        std::uint64_t n_packets = 0;
    };

    struct IndependenceReport
    {
        double ks_distance = 0.0;
        double plr_measured = 0.0;  // percent
        double plr_estimated = 0.0; // percent
        Verdict verdict = Verdict::independent;
    };

    /// PLRs as fractions; curves on the same grid.
    IndependenceReport independence_report(const DistCurve &measured, double plr_measured, const DistCurve &estimated,
                                           double plr_estimated, const IndependenceThresholds &th = {});

    /// Full assessment from two channels and their measured redundant combination.
    IndependenceReport assess_independence(const std::vector<LatencySample> &ch1,
                                           const std::vector<LatencySample> &ch2,
                                           const std::vector<LatencySample> &redundant,
                                           const IndependenceThresholds &th = {});

    struct JointScatter
    {
        std::vector<std::pair<SimTime, SimTime>> points; // (d_ch2, d_ch1)
        SimTime tau = 0;
        double p1 = 0.0, p2 = 0.0, p_joint = 0.0;
        double excess = 1.0; // p_joint / (p1 * p2); 1 when both are 0
    };

    /// Pairs samples by seq; only packets delivered on both channels count.
    JointScatter scatter_joint(const std::vector<LatencySample> &ch1, const std::vector<LatencySample> &ch2,
                               SimTime tau = 5'000'000);

    struct KsResult
    {
        double d = 0.0;
        double p_value = 1.0;
    };

    /// Kolmogorov survival function Q(lambda) = 2 sum (-1)^(j-1) exp(-2 j^2 lambda^2).
    double kolmogorov_q(double lambda);

    /// Two-sample Kolmogorov-Smirnov test on delivered latencies.
    KsResult ks_two_sample(std::vector<SimTime> a, std::vector<SimTime> b);

    std::vector<SimTime> delivered_latencies(const std::vector<LatencySample> &samples);

} // namespace prpsim
