#include "prpsim/runner.hpp"

#include "prpsim/mac_engine.hpp"
#include "prpsim/report.hpp"
#include "prpsim/trace_io.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <memory>
#include <stdexcept>

namespace prpsim
{
    namespace
    {
        std::vector<Blackout> adapter_intervals(const std::vector<Blackout> &all, int adapter)
        {
            std::vector<Blackout> out;
            for (const Blackout &b : all)
                if (b.adapter == adapter)
                    out.push_back(b);
            return out;
        }

        bool overlaps_any(const std::vector<Blackout> &sorted, SimTime s, SimTime e)
        {
            auto it = std::lower_bound(sorted.begin(), sorted.end(), e,
                                       [](const Blackout &b, SimTime v) { return b.t_start < v; });
            // intervals starting before e; the latest of them may reach past s
            return it != sorted.begin() && std::prev(it)->t_end > s;
        }

        class Run
        {
        public:
            explicit Run(const Scenario &sc)
                : sc_(sc), env_(sc.channels, sc.impairments.aci), stall_(sc.impairments.ap_stall, sc.seed, nch()),
                  horizon_(last_generation(sc))
            {
                build_stations();
                build_nm();
                for (int c = 0; c < nch(); ++c)
                {
                    const auto &dtim = sc_.impairments.dtim;
                    RngStream rng(sc_.seed, label(c) + ".beacon");
                    offsets_.push_back(dtim.beacon_offset ? *dtim.beacon_offset : rng.uniform_int(0, std::max<SimTime>(dtim.t_beac, 1) - 1));
                }
            }

            RunResult execute()
            {
                for (std::size_t k = 0; k < sc_.streams.size(); ++k)
                    start_stream(k);
                start_loads();
                if (sc_.aci_experiment)
                    start_aci();
                sim_.run();
                return collect();
            }

        private:
            struct StreamState
            {
                const StreamConfig *cfg = nullptr;
                std::vector<int> idx; // channel indices
                std::vector<std::deque<TxRecord>> recs;
                std::uint64_t n = 0;
            };

            // Count-based streams may outlast the nominal duration; loads and scans cover both.
            static SimTime last_generation(const Scenario &sc)
            {
                SimTime t = sc.duration;
                for (const auto &st : sc.streams)
                    if (const std::uint64_t n = st.packet_count(sc.duration); n > 0)
                        t = std::max(t, st.t_gen(n) + 1);
                if (sc.aci_experiment)
                {
                    const auto &a = *sc.aci_experiment;
                    if (const std::uint64_t n = a.packet_count(sc.duration); n > 0)
                        t = std::max(t, a.start_phase + static_cast<SimTime>(n - 1) * a.Tc + std::max<SimTime>(a.lead, 0) + 1);
                }
                return t;
            }

            int nch() const { return static_cast<int>(sc_.channels.size()); }
            std::string label(int c) const { return "ch" + std::to_string(sc_.channels[static_cast<std::size_t>(c)].channel_number); }

            SimTime stall(SimTime t, int c) const
            {
                if (!sc_.impairments.ap_stall.enabled)
                    return 0;
                return stall_.delay(t, sc_.stall_shared() ? 0 : c);
            }

            SimTime forward(SimTime t, int c) const
            {
                return ap_forward(t, sc_.ap, sc_.channels[static_cast<std::size_t>(c)].band, stall(t, c));
            }

            void build_stations()
            {
                int id = 0;
                for (int c = 0; c < nch(); ++c)
                {
                    sta_.push_back(std::make_unique<Station>(sim_, env_, c, id++, label(c) + ".sta", true, sc_.seed));
                    ap_.push_back(std::make_unique<Station>(sim_, env_, c, id++, label(c) + ".ap", false, sc_.seed));
                    sta_.back()->on_delivery = [this, c](const Frame &, SimTime t_rx) { return forward(t_rx, c); };
                }
                for (const auto &l : sc_.loads)
                {
                    const int c = sc_.channel_index(l.channel);
                    for (int node = 0; node < l.n_nodes; ++node)
                        loads_.push_back(std::make_unique<Station>(sim_, env_, c, id++, burst_stream_label(l.channel, node) + ".mac",
                                                                   false, sc_.seed));
                }
            }

            void build_nm()
            {
                const auto &nm = sc_.impairments.nm;
                raw_.resize(static_cast<std::size_t>(nch()));
                grouped_.resize(static_cast<std::size_t>(nch()));
                if (!nm.enabled)
                    return;
                const SimTime horizon = horizon_ + nm.scan_period;
                blackouts_ = nm_blackout_intervals(nm, horizon, nch());
                const auto grouped = nm_blackout_intervals(nm, horizon, nch(), nm.probes_per_release);
                for (int c = 0; c < nch(); ++c)
                {
                    auto &raw = raw_[static_cast<std::size_t>(c)];
                    raw = adapter_intervals(blackouts_, c);
                    grouped_[static_cast<std::size_t>(c)] = adapter_intervals(grouped, c);
                    Station &sta = *sta_[static_cast<std::size_t>(c)];
                    sta.capacity = static_cast<std::size_t>(nm.buffer_capacity);
                    sta.blocked_until = [&raw](SimTime t) {
                        const auto b = blackout_at(raw, t);
                        return b ? b->t_end : t;
                    };
                    ap_[static_cast<std::size_t>(c)]->receiver_absent = [&raw](SimTime s, SimTime e) { return overlaps_any(raw, s, e); };
                }
            }

            SimTime multicast_ready(SimTime t_ap, int c) const
            {
                const auto &imp = sc_.impairments;
                const SimTime offset = offsets_[static_cast<std::size_t>(c)];
                SimTime t = t_ap;
                if (imp.dtim.enabled)
                    t = dtim_release_time(t_ap, imp.dtim, offset);
                if (imp.nm.enabled && imp.nm.multicast_mode == NmMulticastMode::dtim_buffer)
                {
                    const auto fate = nm_apply_multicast(grouped_[static_cast<std::size_t>(c)], NmMulticastMode::dtim_buffer,
                                                         imp.dtim, offset, {t_ap});
                    t = std::max(t, fate.front().t_release);
                }
                return t;
            }

            void start_stream(std::size_t k)
            {
                const StreamConfig &cfg = sc_.streams[k];
                StreamState &st = streams_.emplace_back();
                st.cfg = &cfg;
                for (int ch : cfg.channels)
                    st.idx.push_back(sc_.channel_index(ch));
                st.recs.resize(st.idx.size());
                st.n = cfg.packet_count(sc_.duration);
                if (st.n > 0)
                    sim_.schedule(cfg.t_gen(1), [this, k] { generate(k, 1); });
            }

            void generate(std::size_t k, std::uint64_t seq)
            {
                StreamState &st = streams_[k];
                const StreamConfig &cfg = *st.cfg;
                const SimTime t = sim_.now();
                for (std::size_t j = 0; j < st.idx.size(); ++j)
                {
                    const int c = st.idx[j];
                    TxRecord &rec = st.recs[j].emplace_back();
                    rec.seq = seq;
                    rec.channel = cfg.channels[j];
                    rec.t_gen = t;
                    if (cfg.kind == StreamKind::unicast_up)
                    {
                        sta_[static_cast<std::size_t>(c)]->submit({FrameKind::unicast, cfg.payload, &rec});
                    }
                    else
                    {
                        const SimTime ready = multicast_ready(forward(t, c), c);
                        Station *ap = ap_[static_cast<std::size_t>(c)].get();
                        const Frame f{FrameKind::multicast, cfg.payload, &rec};
                        sim_.schedule(ready, [ap, f] { ap->submit(f); });
                    }
                }
                if (seq < st.n)
                    sim_.schedule(cfg.t_gen(seq + 1), [this, k, seq] { generate(k, seq + 1); });
            }

            void start_loads()
            {
                std::size_t station = 0;
                for (const auto &l : sc_.loads)
                    for (int node = 0; node < l.n_nodes; ++node)
                    {
                        auto proc = std::make_shared<BurstProcess>(l, RngStream(sc_.seed, burst_stream_label(l.channel, node)));
                        load_request(proc, loads_[station++].get(), l.payload, proc->next());
                    }
            }

            void load_request(std::shared_ptr<BurstProcess> proc, Station *st, int payload, SimTime t)
            {
                if (t >= horizon_)
                    return;
                sim_.schedule(t, [this, proc, st, payload] {
                    st->submit({FrameKind::load, payload, nullptr});
                    load_request(proc, st, payload, proc->next());
                });
            }

            void start_aci()
            {
                const auto &a = *sc_.aci_experiment;
                aci_n_ = a.packet_count(sc_.duration);
                aci_m_ = sc_.channel_index(a.m_channel);
                aci_i_ = sc_.channel_index(a.i_channel);
                if (aci_n_ == 0)
                    return;
                sim_.schedule(a.start_phase, [this] { aci_m_step(1); });
                const std::uint64_t first_a = static_cast<std::uint64_t>(a.duplex_every);
                if (first_a <= aci_n_)
                    sim_.schedule(aci_t_m(first_a) + a.lead, [this, first_a] { aci_i_step(first_a); });
            }

            SimTime aci_t_m(std::uint64_t seq) const
            {
                const auto &a = *sc_.aci_experiment;
                return a.start_phase + static_cast<SimTime>(seq - 1) * a.Tc;
            }

            void aci_m_step(std::uint64_t seq)
            {
                const auto &a = *sc_.aci_experiment;
                TxRecord &rec = aci_recs_m_.emplace_back();
                rec.seq = seq;
                rec.channel = a.m_channel;
                rec.tag = aci_tag(seq, a.duplex_every);
                rec.t_gen = sim_.now();
                sta_[static_cast<std::size_t>(aci_m_)]->submit({FrameKind::unicast, a.payload, &rec});
                if (seq < aci_n_)
                    sim_.schedule(aci_t_m(seq + 1), [this, seq] { aci_m_step(seq + 1); });
            }

            void aci_i_step(std::uint64_t seq)
            {
                const auto &a = *sc_.aci_experiment;
                TxRecord &rec = aci_recs_i_.emplace_back();
                rec.seq = seq;
                rec.channel = a.i_channel;
                rec.tag = SetTag::a;
                rec.t_gen = sim_.now();
                sta_[static_cast<std::size_t>(aci_i_)]->submit({FrameKind::unicast, a.i_payload, &rec});
                const std::uint64_t next = seq + static_cast<std::uint64_t>(a.duplex_every);
                if (next <= aci_n_)
                    sim_.schedule(aci_t_m(next) + a.lead, [this, next] { aci_i_step(next); });
            }

            RunResult collect()
            {
                RunResult r;
                r.scenario = sc_;
                r.events = sim_.fired();
                r.blackouts = blackouts_;
                for (StreamState &st : streams_)
                {
                    StreamResult s;
                    s.name = st.cfg->name;
                    s.kind = st.cfg->kind;
                    for (std::size_t j = 0; j < st.idx.size(); ++j)
                        s.channels.push_back({st.cfg->channels[j], {st.recs[j].begin(), st.recs[j].end()}});
                    s.view = build_redundant_view(st.cfg->channels, s.traces());
                    r.streams.push_back(std::move(s));
                }
                if (sc_.aci_experiment)
                {
                    const auto &a = *sc_.aci_experiment;
                    StreamResult s;
                    s.name = a.name;
                    s.kind = StreamKind::unicast_up;
                    s.redundant = false;
                    s.channels.push_back({a.m_channel, {aci_recs_m_.begin(), aci_recs_m_.end()}});
                    s.channels.push_back({a.i_channel, {aci_recs_i_.begin(), aci_recs_i_.end()}});
                    r.streams.push_back(std::move(s));
                }
                for (const auto &s : r.streams)
                    for (const auto &ch : s.channels)
                        for (const auto &rec : ch.records)
                            if (auto err = check_record(rec))
                                throw std::logic_error("stream " + s.name + " seq " + std::to_string(rec.seq) + ": " + *err);
                return r;
            }

            const Scenario &sc_;
            Simulator sim_;
            MacEnvironment env_;
            ApStallModel stall_;
            SimTime horizon_;
            std::vector<SimTime> offsets_;
            std::vector<std::unique_ptr<Station>> sta_, ap_, loads_;
            std::vector<Blackout> blackouts_;
            std::vector<std::vector<Blackout>> raw_, grouped_;
            std::deque<StreamState> streams_;
            std::uint64_t aci_n_ = 0;
            int aci_m_ = 0, aci_i_ = 0;
            std::deque<TxRecord> aci_recs_m_, aci_recs_i_;
        };

        void write_file(const std::filesystem::path &p, const std::string &content)
        {
            std::ofstream out(p, std::ios::binary);
            if (!out)
                throw std::runtime_error("cannot write " + p.string());
            out << content;
            if (!out)
                throw std::runtime_error("write failed: " + p.string());
        }
    } // namespace

    std::vector<const std::vector<TxRecord> *> StreamResult::traces() const
    {
        std::vector<const std::vector<TxRecord> *> out;
        for (const auto &ch : channels)
            out.push_back(&ch.records);
        return out;
    }

    const StreamResult &RunResult::stream(const std::string &name) const
    {
        for (const auto &s : streams)
            if (s.name == name)
                return s;
        throw std::out_of_range("no stream named " + name);
    }

    RunResult run_scenario(const Scenario &scenario)
    {
        scenario.validate();
        Run run(scenario);
        return run.execute();
    }

    std::string channel_trace_name(const std::string &stream, int channel_number)
    {
        return stream + "_ch" + std::to_string(channel_number) + ".csv";
    }

    std::string redundant_trace_name(const std::string &stream)
    {
        return stream + "_redundant.csv";
    }

    std::vector<SummaryRow> run_summary(const RunResult &run)
    {
        std::vector<SummaryRow> rows;
        for (const auto &s : run.streams)
        {
            for (const auto &ch : s.channels)
            {
                const std::string base = s.name + " ch" + std::to_string(ch.channel_number);
                rows.push_back({base, summarize_trace(ch.records, s.acked())});
                if (!s.redundant)
                {
                    rows.push_back({base + " A", summarize_trace(ch.records, s.acked(), SetTag::a)});
                    rows.push_back({base + " NA", summarize_trace(ch.records, s.acked(), SetTag::not_a)});
                }
            }
            if (s.redundant)
            {
                StatsSummary u = summarize(redundant_samples(s.view));
                if (s.acked())
                    u.plr_prime = 100.0 * loss_fraction(redundant_samples(s.traces(), Metric::d_prime));
                rows.push_back({s.name + " redundant", u});
            }
        }
        return rows;
    }

    std::vector<std::filesystem::path> write_run(const RunResult &run, const std::filesystem::path &out_dir)
    {
        std::filesystem::create_directories(out_dir);
        std::vector<std::filesystem::path> files;
        for (const auto &s : run.streams)
        {
            for (const auto &ch : s.channels)
            {
                const auto p = out_dir / channel_trace_name(s.name, ch.channel_number);
                std::ofstream out(p, std::ios::binary);
                if (!out)
                    throw std::runtime_error("cannot write " + p.string());
                write_channel_trace(out, ch.records);
                files.push_back(p);
            }
            if (s.redundant)
            {
                const auto p = out_dir / redundant_trace_name(s.name);
                std::ofstream out(p, std::ios::binary);
                if (!out)
                    throw std::runtime_error("cannot write " + p.string());
                write_redundant_trace(out, s.view);
                files.push_back(p);
            }
        }
        const auto rows = run_summary(run);
        files.push_back(out_dir / "summary.txt");
        write_file(files.back(), format_summary_table(rows));
        files.push_back(out_dir / "summary.csv");
        write_file(files.back(), summary_csv(rows));
        files.push_back(out_dir / "manifest.json");
        write_file(files.back(), make_manifest(run.scenario));
        return files;
    }

} // namespace prpsim
