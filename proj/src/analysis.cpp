#include "prpsim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace prpsim
{
    std::vector<LatencySample> samples_from_records(const std::vector<TxRecord> &records, Metric metric,
                                                    std::optional<SetTag> tag)
    {
        std::vector<LatencySample> out;
        out.reserve(records.size());
        for (const TxRecord &r : records)
        {
            if (tag && r.tag != *tag)
                continue;
            LatencySample s{r.seq, 0, false};
            if (metric == Metric::d)
            {
                s.delivered = r.t_eth != kAbsent;
                if (s.delivered)
                    s.latency = r.t_eth - r.t_gen;
            }
            else
            {
                s.delivered = r.t_ack != kAbsent;
                if (s.delivered)
                    s.latency = r.t_air_end - r.t_gen;
            }
            out.push_back(s);
        }
        return out;
    }

    SimTime nearest_rank(const std::vector<SimTime> &sorted, int q)
    {
        if (sorted.empty())
            throw std::invalid_argument("nearest_rank of an empty set");
        if (q <= 0 || q > 10'000)
            throw std::invalid_argument("percentile outside (0, 100]");
        const auto n = static_cast<std::uint64_t>(sorted.size());
        std::uint64_t rank = (static_cast<std::uint64_t>(q) * n + 9'999) / 10'000;
        rank = std::max<std::uint64_t>(rank, 1);
        return sorted[rank - 1];
    }

    std::vector<SimTime> delivered_latencies(const std::vector<LatencySample> &samples)
    {
        std::vector<SimTime> v;
        v.reserve(samples.size());
        for (const auto &s : samples)
            if (s.delivered)
                v.push_back(s.latency);
        return v;
    }

    double loss_fraction(const std::vector<LatencySample> &samples)
    {
        if (samples.empty())
            return 0.0;
        const auto lost = std::count_if(samples.begin(), samples.end(), [](const auto &s) { return !s.delivered; });
        return static_cast<double>(lost) / static_cast<double>(samples.size());
    }

    StatsSummary summarize(const std::vector<LatencySample> &samples)
    {
        StatsSummary s;
        s.n = samples.size();
        s.plr = 100.0 * loss_fraction(samples);
        std::vector<SimTime> v = delivered_latencies(samples);
        s.n_delivered = v.size();
        if (v.empty())
            return s;
        std::sort(v.begin(), v.end());
        double sum = 0.0;
        for (SimTime x : v)
            sum += static_cast<double>(x);
        const double mean = sum / static_cast<double>(v.size());
        double ss = 0.0;
        for (SimTime x : v)
            ss += (static_cast<double>(x) - mean) * (static_cast<double>(x) - mean);
        s.mean = mean / 1e6;
        s.std = std::sqrt(ss / static_cast<double>(v.size())) / 1e6;
        s.min = to_ms(v.front());
        s.p50 = to_ms(nearest_rank(v, 5'000));
        s.p99 = to_ms(nearest_rank(v, 9'900));
        s.p999 = to_ms(nearest_rank(v, 9'990));
        s.p9999 = to_ms(nearest_rank(v, 9'999));
        s.max = to_ms(v.back());
        return s;
    }

    StatsSummary summarize_trace(const std::vector<TxRecord> &records, bool acked, std::optional<SetTag> tag)
    {
        StatsSummary s = summarize(samples_from_records(records, Metric::d, tag));
        if (acked)
            s.plr_prime = 100.0 * loss_fraction(samples_from_records(records, Metric::d_prime, tag));
        return s;
    }

    std::vector<SimTime> make_grid(const std::vector<const std::vector<LatencySample> *> &sets)
    {
        std::vector<SimTime> grid;
        for (const auto *set : sets)
            for (const auto &s : *set)
                if (s.delivered)
                    grid.push_back(s.latency);
        std::sort(grid.begin(), grid.end());
        grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
        return grid;
    }

    DistCurve ccdf(const std::vector<LatencySample> &samples, const std::vector<SimTime> &grid)
    {
        std::vector<SimTime> v = delivered_latencies(samples);
        if (v.empty())
            throw std::invalid_argument("ccdf needs at least one delivered sample");
        std::sort(v.begin(), v.end());
        DistCurve c{CurveKind::ccdf, grid, {}};
        c.values.reserve(grid.size());
        const double n = static_cast<double>(v.size());
        for (SimTime x : grid)
        {
            const auto above = v.end() - std::upper_bound(v.begin(), v.end(), x);
            c.values.push_back(static_cast<double>(above) / n);
        }
        return c;
    }

    DistCurve pdf(const std::vector<LatencySample> &samples, SimTime bin_width)
    {
        if (bin_width <= 0)
            throw std::invalid_argument("bin width must be positive");
        std::vector<SimTime> v = delivered_latencies(samples);
        if (v.empty())
            throw std::invalid_argument("pdf needs at least one delivered sample");
        const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
        const SimTime first = floor_div(*lo_it, bin_width);
        const SimTime last = floor_div(*hi_it, bin_width);
        std::vector<std::uint64_t> counts(static_cast<std::size_t>(last - first + 1), 0);
        for (SimTime x : v)
            ++counts[static_cast<std::size_t>(floor_div(x, bin_width) - first)];
        DistCurve c{CurveKind::pdf, {}, {}};
        const double norm = static_cast<double>(v.size()) * to_ms(bin_width);
        for (std::size_t i = 0; i < counts.size(); ++i)
        {
            c.grid.push_back((first + static_cast<SimTime>(i)) * bin_width);
            c.values.push_back(static_cast<double>(counts[i]) / norm);
        }
        return c;
    }

    double compose_ccdf_point(double c1, double plr1, double c2, double plr2)
    {
        const double denom = 1.0 - plr1 * plr2;
        if (denom <= 0.0)
            throw std::invalid_argument("compose_ccdf: both channels lose every packet");
        return (plr1 * (1.0 - plr2) * c2 + plr2 * (1.0 - plr1) * c1 + (1.0 - plr1) * (1.0 - plr2) * c1 * c2) / denom;
    }

    DistCurve compose_ccdf(const DistCurve &ccdf1, double plr1, const DistCurve &ccdf2, double plr2)
    {
        if (ccdf1.grid != ccdf2.grid || ccdf1.values.size() != ccdf1.grid.size() ||
            ccdf2.values.size() != ccdf2.grid.size())
            throw std::invalid_argument("compose_ccdf: curves are not on a common grid");
        for (double p : {plr1, plr2})
            if (!(p >= 0.0 && p <= 1.0))
                throw std::invalid_argument("compose_ccdf: PLR outside [0,1]");
        if (plr1 * plr2 >= 1.0)
            throw std::invalid_argument("compose_ccdf: both channels lose every packet");
        DistCurve out{CurveKind::ccdf, ccdf1.grid, {}};
        out.values.reserve(ccdf1.values.size());
        for (std::size_t i = 0; i < ccdf1.values.size(); ++i)
            out.values.push_back(compose_ccdf_point(ccdf1.values[i], plr1, ccdf2.values[i], plr2));
        return out;
    }

    const char *to_string(Verdict v)
    {
        return v == Verdict::independent ? "independent" : "dependent";
    }

    IndependenceReport independence_report(const DistCurve &measured, double plr_measured, const DistCurve &estimated,
                                           double plr_estimated, const IndependenceThresholds &th)
    {
        if (measured.grid != estimated.grid)
            throw std::invalid_argument("independence_report: curves are not on a common grid");
        IndependenceReport r;
        for (std::size_t i = 0; i < measured.values.size(); ++i)
            r.ks_distance = std::max(r.ks_distance, std::abs(measured.values[i] - estimated.values[i]));
        r.ks_distance = std::min(r.ks_distance, 1.0);
        r.plr_measured = 100.0 * plr_measured;
        r.plr_estimated = 100.0 * plr_estimated;
        const double gap = std::abs(plr_measured - plr_estimated);
        bool plr_ok = gap == 0.0 || gap < th.plr_relative * std::max(plr_measured, plr_estimated);
        if (!plr_ok && th.n_packets > 0)
        {
            const double se = std::sqrt(plr_estimated * (1.0 - plr_estimated) / static_cast<double>(th.n_packets));
            plr_ok = gap < 3.0 * se;
        }
        r.verdict = (r.ks_distance < th.ks && plr_ok) ? Verdict::independent : Verdict::dependent;
        return r;
    }

    IndependenceReport assess_independence(const std::vector<LatencySample> &ch1,
                                           const std::vector<LatencySample> &ch2,
                                           const std::vector<LatencySample> &redundant,
                                           const IndependenceThresholds &th)
    {
        const auto grid = make_grid({&ch1, &ch2, &redundant});
        const double plr1 = loss_fraction(ch1);
        const double plr2 = loss_fraction(ch2);
        const DistCurve est = compose_ccdf(ccdf(ch1, grid), plr1, ccdf(ch2, grid), plr2);
        return independence_report(ccdf(redundant, grid), loss_fraction(redundant), est, compose_plr(plr1, plr2), th);
    }

    JointScatter scatter_joint(const std::vector<LatencySample> &ch1, const std::vector<LatencySample> &ch2,
                               SimTime tau)
    {
        std::unordered_map<std::uint64_t, SimTime> second;
        second.reserve(ch2.size());
        for (const auto &s : ch2)
            if (s.delivered)
                second.emplace(s.seq, s.latency);
        JointScatter js;
        js.tau = tau;
        std::uint64_t n1 = 0, n2 = 0, n12 = 0;
        for (const auto &s : ch1)
        {
            if (!s.delivered)
                continue;
            auto it = second.find(s.seq);
            if (it == second.end())
                continue;
            js.points.emplace_back(it->second, s.latency);
            const bool a = s.latency > tau, b = it->second > tau;
            n1 += a;
            n2 += b;
            n12 += a && b;
        }
        if (js.points.empty())
            return js;
        const double n = static_cast<double>(js.points.size());
        js.p1 = static_cast<double>(n1) / n;
        js.p2 = static_cast<double>(n2) / n;
        js.p_joint = static_cast<double>(n12) / n;
        if (js.p1 * js.p2 > 0.0)
            js.excess = js.p_joint / (js.p1 * js.p2);
        return js;
    }

    double kolmogorov_q(double lambda)
    {
        if (lambda < 1e-3)
            return 1.0;
        double sum = 0.0, sign = 1.0, prev = 0.0;
        for (int j = 1; j <= 200; ++j)
        {
            const double term = sign * std::exp(-2.0 * j * j * lambda * lambda);
            sum += term;
            if (std::abs(term) <= 1e-12 * std::abs(sum) || std::abs(term) <= 1e-300 || std::abs(term) == prev)
                return std::clamp(2.0 * sum, 0.0, 1.0);
            prev = std::abs(term);
            sign = -sign;
        }
        return 1.0; // series failed to converge: lambda is tiny
    }

    KsResult ks_two_sample(std::vector<SimTime> a, std::vector<SimTime> b)
    {
        if (a.empty() || b.empty())
            throw std::invalid_argument("ks_two_sample needs two non-empty samples");
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
        std::size_t i = 0, j = 0;
        double d = 0.0;
        while (i < a.size() && j < b.size())
        {
            const SimTime x = std::min(a[i], b[j]);
            while (i < a.size() && a[i] == x)
                ++i;
            while (j < b.size() && b[j] == x)
                ++j;
            d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
        }
        const double en = std::sqrt(na * nb / (na + nb));
        return {d, kolmogorov_q((en + 0.12 + 0.11 / en) * d)};
    }

} // namespace prpsim
