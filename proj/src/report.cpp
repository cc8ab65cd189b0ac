#include "prpsim/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace prpsim
{
    namespace
    {
        std::string fmt(double v, int precision = 3)
        {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.*f", precision, v);
            return buf;
        }

        std::string fmt_opt(const std::optional<double> &v, int precision = 3)
        {
            return v ? fmt(*v, precision) : "-";
        }

        std::string pad_left(const std::string &s, std::size_t w)
        {
            return s.size() >= w ? s : std::string(w - s.size(), ' ') + s;
        }

        std::string pad_right(const std::string &s, std::size_t w)
        {
            return s.size() >= w ? s : s + std::string(w - s.size(), ' ');
        }

        std::vector<std::string> stat_cells(const StatsSummary &s)
        {
            return {fmt_opt(s.mean),  fmt_opt(s.std),   fmt_opt(s.min), fmt_opt(s.p50),
                    fmt_opt(s.p99),   fmt_opt(s.p999),  fmt_opt(s.p9999), fmt_opt(s.max),
                    fmt(s.plr, 6),    s.plr_prime ? fmt(*s.plr_prime, 6) : "-", std::to_string(s.n)};
        }

        const std::vector<std::string> kColumns{"mean_ms", "std_ms",  "min_ms", "p50_ms",   "p99_ms", "p99.9_ms",
                                                "p99.99_ms", "max_ms", "plr_pct", "plr_prime_pct", "n"};

        void write_file(const std::filesystem::path &p, const std::string &content)
        {
            std::ofstream out(p, std::ios::binary);
            if (!out)
                throw std::runtime_error("cannot write " + p.string());
            out << content;
        }

        std::string table(const std::vector<std::string> &header, const std::vector<std::vector<std::string>> &rows)
        {
            std::vector<std::size_t> w(header.size());
            for (std::size_t i = 0; i < header.size(); ++i)
                w[i] = header[i].size();
            for (const auto &r : rows)
                for (std::size_t i = 0; i < r.size(); ++i)
                    w[i] = std::max(w[i], r[i].size());
            std::ostringstream out;
            auto line = [&](const std::vector<std::string> &cells) {
                for (std::size_t i = 0; i < cells.size(); ++i)
                {
                    out << (i == 0 ? pad_right(cells[i], w[i]) : pad_left(cells[i], w[i]));
                    out << (i + 1 < cells.size() ? "  " : "\n");
                }
            };
            line(header);
            for (const auto &r : rows)
                line(r);
            return out.str();
        }

        std::string stem(const std::filesystem::path &p)
        {
            return p.stem().string();
        }
    } // namespace

    std::string format_summary_table(const std::vector<SummaryRow> &rows)
    {
        std::vector<std::string> header{"link"};
        header.insert(header.end(), kColumns.begin(), kColumns.end());
        std::vector<std::vector<std::string>> cells;
        for (const auto &r : rows)
        {
            std::vector<std::string> c{r.label};
            const auto s = stat_cells(r.stats);
            c.insert(c.end(), s.begin(), s.end());
            cells.push_back(std::move(c));
        }
        return table(header, cells);
    }

    std::string summary_csv(const std::vector<SummaryRow> &rows)
    {
        std::ostringstream out;
        out << "link";
        for (const auto &c : kColumns)
            out << ',' << c;
        out << '\n';
        for (const auto &r : rows)
        {
            out << r.label;
            for (const auto &c : stat_cells(r.stats))
                out << ',' << (c == "-" ? "" : c);
            out << '\n';
        }
        return out.str();
    }

    std::string curve_csv(const DistCurve &curve)
    {
        std::ostringstream out;
        out << "latency_ms," << (curve.kind == CurveKind::ccdf ? "ccdf" : "pdf_per_ms") << '\n';
        for (std::size_t i = 0; i < curve.grid.size(); ++i)
        {
            char buf[96];
            std::snprintf(buf, sizeof buf, "%.6f,%.9g\n", to_ms(curve.grid[i]), curve.values[i]);
            out << buf;
        }
        return out.str();
    }

    std::string scatter_csv(const JointScatter &scatter)
    {
        std::ostringstream out;
        out << "d_ch2_ms,d_ch1_ms\n";
        for (const auto &[x, y] : scatter.points)
        {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.6f,%.6f\n", to_ms(x), to_ms(y));
            out << buf;
        }
        return out.str();
    }

    std::string series_csv(const std::vector<LatencySample> &samples)
    {
        std::ostringstream out;
        out << "seq,latency_ms\n";
        for (const auto &s : samples)
        {
            out << s.seq << ',';
            if (s.delivered)
                out << fmt(to_ms(s.latency), 6);
            else
                out << "-1";
            out << '\n';
        }
        return out.str();
    }

    std::string format_independence(const IndependenceReport &r, const JointScatter &js)
    {
        std::ostringstream out;
        out << "ks_distance " << fmt(r.ks_distance, 6) << '\n'
            << "plr_measured_pct " << fmt(r.plr_measured, 6) << '\n'
            << "plr_estimated_pct " << fmt(r.plr_estimated, 6) << '\n'
            << "verdict " << to_string(r.verdict) << '\n'
            << "tau_ms " << fmt(to_ms(js.tau), 3) << '\n'
            << "p_ch1_above_tau " << fmt(js.p1, 6) << '\n'
            << "p_ch2_above_tau " << fmt(js.p2, 6) << '\n'
            << "p_both_above_tau " << fmt(js.p_joint, 6) << '\n'
            << "joint_tail_excess " << fmt(js.excess, 4) << '\n';
        return out.str();
    }

    std::vector<LatencySample> trace_samples(const LoadedTrace &t, Metric metric, std::optional<SetTag> tag)
    {
        if (t.kind == TraceKind::channel)
            return samples_from_records(t.records, metric, tag);
        std::vector<LatencySample> out;
        out.reserve(t.entries.size());
        for (const auto &e : t.entries)
            out.push_back({e.seq, e.lost() ? 0 : e.t_accept - e.t_gen, !e.lost()});
        return out;
    }

    StatsSummary trace_summary(const LoadedTrace &t, std::optional<SetTag> tag)
    {
        if (t.kind == TraceKind::channel)
            return summarize_trace(t.records, t.acked, tag);
        return summarize(trace_samples(t));
    }

    std::string analyze_traces(const std::vector<std::filesystem::path> &paths, const std::filesystem::path &out_dir,
                               const AnalyzeOptions &opt)
    {
        if (paths.empty())
            throw std::invalid_argument("analyze: no trace given");
        std::vector<LoadedTrace> traces;
        for (const auto &p : paths)
            traces.push_back(load_trace(p));
        std::filesystem::create_directories(out_dir);

        std::vector<SummaryRow> rows;
        std::vector<const LoadedTrace *> channel_traces;
        for (const auto &t : traces)
        {
            const std::string name = stem(t.path);
            rows.push_back({name, trace_summary(t)});
            const auto samples = trace_samples(t);
            write_file(out_dir / (name + "_series.csv"), series_csv(samples));
            if (std::any_of(samples.begin(), samples.end(), [](const auto &s) { return s.delivered; }))
            {
                write_file(out_dir / (name + "_ccdf.csv"), curve_csv(ccdf(samples, make_grid({&samples}))));
                write_file(out_dir / (name + "_pdf.csv"), curve_csv(pdf(samples, opt.pdf_bin)));
            }
            if (t.kind != TraceKind::channel)
                continue;
            channel_traces.push_back(&t);
            if (!t.tagged)
                continue;
            const Metric m = t.acked ? Metric::d_prime : Metric::d;
            for (SetTag tag : {SetTag::a, SetTag::not_a})
            {
                rows.push_back({name + " " + tag_code(tag), trace_summary(t, tag)});
                const auto set = samples_from_records(t.records, m, tag);
                if (std::any_of(set.begin(), set.end(), [](const auto &s) { return s.delivered; }))
                    write_file(out_dir / (name + "_" + tag_code(tag) + "_pdf.csv"), curve_csv(pdf(set, opt.pdf_bin)));
            }
        }

        std::string text = format_summary_table(rows);
        if (channel_traces.size() >= 2)
        {
            const auto &a = *channel_traces[0];
            const auto &b = *channel_traces[1];
            const auto s1 = samples_from_records(a.records, Metric::d);
            const auto s2 = samples_from_records(b.records, Metric::d);
            const auto u = redundant_samples({&a.records, &b.records}, Metric::d);
            const auto js = scatter_joint(s1, s2, opt.tau);
            write_file(out_dir / "scatter.csv", scatter_csv(js));
            auto th = opt.thresholds;
            th.n_packets = u.size();
            const bool deliverable = std::any_of(s1.begin(), s1.end(), [](const auto &s) { return s.delivered; }) &&
                                     std::any_of(s2.begin(), s2.end(), [](const auto &s) { return s.delivered; });
            if (deliverable)
            {
                const auto rep = assess_independence(s1, s2, u, th);
                const std::string ind = "channels " + stem(a.path) + " + " + stem(b.path) + "\n" + format_independence(rep, js);
                write_file(out_dir / "independence.txt", ind);
                text += "\n" + ind;
            }
        }
        write_file(out_dir / "summary.txt", text);
        write_file(out_dir / "summary.csv", summary_csv(rows));
        return text;
    }

    std::string compare_traces(const std::filesystem::path &pa, const std::filesystem::path &pb)
    {
        const LoadedTrace a = load_trace(pa);
        const LoadedTrace b = load_trace(pb);
        if (a.kind != b.kind)
            throw std::invalid_argument("compare: a channel trace cannot be compared with a redundant trace");
        if (a.kind == TraceKind::channel && a.acked != b.acked)
            throw std::invalid_argument("compare: mismatched stream kinds (confirmed vs multicast)");
        const StatsSummary sa = trace_summary(a);
        const StatsSummary sb = trace_summary(b);

        struct Row
        {
            const char *name;
            std::optional<double> x, y;
        };
        const std::vector<Row> metrics{{"mean_ms", sa.mean, sb.mean},
                                          {"std_ms", sa.std, sb.std},
                                          {"min_ms", sa.min, sb.min},
                                          {"p50_ms", sa.p50, sb.p50},
                                          {"p99_ms", sa.p99, sb.p99},
                                          {"p99.9_ms", sa.p999, sb.p999},
                                          {"p99.99_ms", sa.p9999, sb.p9999},
                                          {"max_ms", sa.max, sb.max},
                                          {"plr_pct", sa.plr, sb.plr},
                                          {"plr_prime_pct", sa.plr_prime, sb.plr_prime},
                                          {"n", double(sa.n), double(sb.n)}};
        std::vector<std::vector<std::string>> rows;
        for (const auto &m : metrics)
        {
            if (!m.x && !m.y)
                continue;
            std::string delta = "-", ratio = "-", flag;
            if (m.x && m.y)
            {
                const double d = *m.y - *m.x;
                delta = fmt(d, 6);
                if (*m.x != 0.0)
                    ratio = fmt(*m.y / *m.x, 4);
                const double scale = std::max(std::abs(*m.x), std::abs(*m.y));
                if (scale > 0.0 && std::abs(d) > 0.1 * scale)
                    flag = "*";
            }
            rows.push_back({m.name, fmt_opt(m.x, 6), fmt_opt(m.y, 6), delta, ratio, flag});
        }
        std::string out = "A: " + pa.string() + "\nB: " + pb.string() + "\n";
        out += table({"metric", "A", "B", "B-A", "B/A", ""}, rows);
        out += "(* marks differences above 10%)\n";
        return out;
    }

} // namespace prpsim
