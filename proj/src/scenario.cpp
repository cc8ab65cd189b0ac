#include "prpsim/scenario.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace prpsim
{
    using nlohmann::json;

    namespace
    {
        // Reads the fields of one JSON object, remembering which keys were
        // consumed so that unknown keys can be reported with their path.
        class Fields
        {
        public:
            Fields(const json &j, std::string path) : j_(j), path_(std::move(path))
            {
                if (!j_.is_object())
                    throw ConfigError(path_, "expected an object");
            }

            std::string at(const std::string &key) const { return path_.empty() ? key : path_ + "." + key; }

            bool has(const std::string &key) const { return j_.contains(key) && !j_.at(key).is_null(); }

            const json *raw(const std::string &key)
            {
                used_.insert(key);
                return has(key) ? &j_.at(key) : nullptr;
            }

            template <class T>
            void get(const std::string &key, T &out)
            {
                if (const json *v = raw(key))
                    out = convert<T>(*v, at(key));
            }

            template <class T>
            void get(const std::string &key, std::optional<T> &out)
            {
                used_.insert(key);
                if (!j_.contains(key) || j_.at(key).is_null())
                    return;
                out = convert<T>(j_.at(key), at(key));
            }

            template <class T>
            T required(const std::string &key)
            {
                const json *v = raw(key);
                if (!v)
                    throw ConfigError(at(key), "missing required field");
                return convert<T>(*v, at(key));
            }

            void finish() const
            {
                for (auto it = j_.begin(); it != j_.end(); ++it)
                    if (!used_.count(it.key()))
                        throw ConfigError(at(it.key()), "unknown field");
            }

            template <class T>
            static T convert(const json &v, const std::string &path)
            {
                if constexpr (std::is_same_v<T, bool>)
                {
                    if (!v.is_boolean())
                        throw ConfigError(path, "expected true or false");
                    return v.get<bool>();
                }
                else if constexpr (std::is_integral_v<T>)
                {
                    if (!v.is_number_integer())
                        throw ConfigError(path, "expected an integer");
                    if constexpr (std::is_unsigned_v<T>)
                    {
                        if (v.is_number_unsigned())
                            return static_cast<T>(v.get<std::uint64_t>());
                        if (v.get<std::int64_t>() < 0)
                            throw ConfigError(path, "expected a non-negative integer");
                        return static_cast<T>(v.get<std::int64_t>());
                    }
                    else
                    {
                        return static_cast<T>(v.get<std::int64_t>());
                    }
                }
                else if constexpr (std::is_floating_point_v<T>)
                {
                    if (!v.is_number())
                        throw ConfigError(path, "expected a number");
                    return v.get<T>();
                }
                else if constexpr (std::is_same_v<T, std::string>)
                {
                    if (!v.is_string())
                        throw ConfigError(path, "expected a string");
                    return v.get<std::string>();
                }
                else
                {
                    static_assert(sizeof(T) == 0, "unsupported field type");
                }
            }

        private:
            const json &j_;
            std::string path_;
            std::set<std::string> used_;
        };

        template <class T>
        std::vector<T> number_list(const json *v, const std::string &path)
        {
            std::vector<T> out;
            if (!v)
                return out;
            if (!v->is_array())
                throw ConfigError(path, "expected an array");
            for (std::size_t i = 0; i < v->size(); ++i)
                out.push_back(Fields::convert<T>(v->at(i), path + "[" + std::to_string(i) + "]"));
            return out;
        }

        std::string indexed(const std::string &base, std::size_t i)
        {
            return base + "[" + std::to_string(i) + "]";
        }

        template <class E>
        E parse_enum(Fields &f, const std::string &key, E fallback, std::initializer_list<std::pair<const char *, E>> names)
        {
            const json *v = f.raw(key);
            if (!v)
                return fallback;
            const std::string s = Fields::convert<std::string>(*v, f.at(key));
            std::string allowed;
            for (const auto &[name, value] : names)
            {
                if (s == name)
                    return value;
                allowed += allowed.empty() ? name : std::string(" | ") + name;
            }
            throw ConfigError(f.at(key), "'" + s + "' is not one of " + allowed);
        }

        template <class F>
        void checked(const std::string &path, F &&fn)
        {
            try
            {
                fn();
            }
            catch (const ConfigError &)
            {
                throw;
            }
            catch (const std::invalid_argument &e)
            {
                throw ConfigError(path, e.what());
            }
        }

        // ------------------------------------------------------------ parsing

        LossModel parse_loss(const json &j, const std::string &path)
        {
            Fields f(j, path);
            LossModel m;
            m.kind = parse_enum(f, "kind", LossKind::bernoulli,
                                {{"bernoulli", LossKind::bernoulli}, {"gilbert-elliott", LossKind::gilbert_elliott}});
            f.get("p_loss", m.p_loss);
            f.get("p_gb", m.p_gb);
            f.get("p_bg", m.p_bg);
            f.get("p_loss_good", m.p_loss_good);
            f.get("p_loss_bad", m.p_loss_bad);
            f.finish();
            checked(path, [&] { m.validate(); });
            return m;
        }

        ChannelConfig parse_channel(const json &j, const std::string &path)
        {
            Fields f(j, path);
            const int number = f.required<int>("channel_number");
            ChannelConfig c;
            checked(f.at("channel_number"), [&] { c = ChannelConfig::for_channel(number); });
            c.band = parse_enum(f, "band", c.band, {{"2.4GHz", Band::ghz2_4}, {"5GHz", Band::ghz5}});
            f.get("bitrate", c.bitrate);
            f.get("ack_bitrate", c.ack_bitrate);
            f.get("slot", c.slot);
            f.get("sifs", c.sifs);
            f.get("cw_min", c.cw_min);
            f.get("cw_max", c.cw_max);
            f.get("retry_limit", c.retry_limit);
            f.get("immediate_access", c.immediate_access);
            f.get("mac_overhead_bytes", c.mac_overhead_bytes);
            f.get("ack_bytes", c.ack_bytes);
            f.get("wpa2", c.wpa2);
            if (const json *v = f.raw("loss_model"))
                c.loss_model = parse_loss(*v, f.at("loss_model"));
            if (const json *v = f.raw("ack_loss_model"))
                c.ack_loss_model = parse_loss(*v, f.at("ack_loss_model"));
            f.finish();
            return c;
        }

        ApConfig parse_ap(const json &j, const std::string &path)
        {
            Fields f(j, path);
            ApConfig a;
            a.mode = parse_enum(f, "mode", a.mode,
                                {{"two-aps", ApMode::two_aps}, {"one-dual-band-ap", ApMode::one_dual_band_ap}});
            f.get("forward_delay_base", a.forward_delay_base);
            f.get("dual_band_extra", a.dual_band_extra);
            f.finish();
            return a;
        }

        ImpairmentConfig parse_impairments(const json &j, const std::string &path)
        {
            Fields f(j, path);
            ImpairmentConfig imp;
            if (const json *v = f.raw("dtim"))
            {
                Fields g(*v, f.at("dtim"));
                g.get("enabled", imp.dtim.enabled);
                g.get("t_beac", imp.dtim.t_beac);
                g.get("p", imp.dtim.p);
                g.get("beacon_offset", imp.dtim.beacon_offset);
                g.finish();
            }
            if (const json *v = f.raw("nm"))
            {
                Fields g(*v, f.at("nm"));
                auto &nm = imp.nm;
                g.get("enabled", nm.enabled);
                g.get("scan_period", nm.scan_period);
                g.get("n_probes", nm.n_probes);
                g.get("probe_dwell", nm.probe_dwell);
                g.get("probe_gap", nm.probe_gap);
                g.get("scan_phase", nm.scan_phase);
                g.get("simultaneous_on_all_adapters", nm.simultaneous_on_all_adapters);
                nm.multicast_mode = parse_enum(g, "multicast_mode", nm.multicast_mode,
                                               {{"drop", NmMulticastMode::drop}, {"dtim-buffer", NmMulticastMode::dtim_buffer}});
                g.get("probes_per_release", nm.probes_per_release);
                g.get("buffer_capacity", nm.buffer_capacity);
                g.finish();
            }
            if (const json *v = f.raw("ap_stall"))
            {
                Fields g(*v, f.at("ap_stall"));
                auto &st = imp.ap_stall;
                g.get("enabled", st.enabled);
                g.get("period", st.period);
                g.get("max_stall", st.max_stall);
                g.get("shared_across_channels", st.shared_across_channels);
                st.phase_offset_per_ap = number_list<SimTime>(g.raw("phase_offset_per_ap"), g.at("phase_offset_per_ap"));
                g.get("onset_jitter", st.onset_jitter);
                g.finish();
            }
            if (const json *v = f.raw("aci"))
            {
                Fields g(*v, f.at("aci"));
                auto &aci = imp.aci;
                g.get("enabled", aci.enabled);
                if (const json *c = g.raw("coupling_by_step"))
                    aci.coupling_by_step = number_list<double>(c, g.at("coupling_by_step"));
                g.get("p_ack_corrupt", aci.p_ack_corrupt);
                g.get("busy_sense_threshold", aci.busy_sense_threshold);
                g.finish();
            }
            f.finish();
            return imp;
        }

        StreamConfig parse_stream(const json &j, const std::string &path)
        {
            Fields f(j, path);
            StreamConfig s;
            s.name = f.required<std::string>("name");
            s.kind = parse_enum(f, "kind", s.kind,
                                {{"unicast-up", StreamKind::unicast_up}, {"multicast-down", StreamKind::multicast_down}});
            f.get("Tc", s.Tc);
            f.get("payload", s.payload);
            f.get("count", s.count);
            f.get("duration", s.duration);
            f.get("start_phase", s.start_phase);
            s.channels = number_list<int>(f.raw("channels"), f.at("channels"));
            f.finish();
            return s;
        }

        BurstLoadConfig parse_load(const json &j, const std::string &path)
        {
            Fields f(j, path);
            BurstLoadConfig l;
            l.channel = f.required<int>("channel");
            f.get("n_nodes", l.n_nodes);
            f.get("payload", l.payload);
            f.get("intra_gap", l.intra_gap);
            f.get("mean_burst_len", l.mean_burst_len);
            f.get("mean_gap", l.mean_gap);
            f.finish();
            return l;
        }

        AciExperimentConfig parse_aci_experiment(const json &j, const std::string &path)
        {
            Fields f(j, path);
            AciExperimentConfig a;
            f.get("name", a.name);
            f.get("Tc", a.Tc);
            f.get("lead", a.lead);
            f.get("duplex_every", a.duplex_every);
            a.m_channel = f.required<int>("m_channel");
            a.i_channel = f.required<int>("i_channel");
            f.get("payload", a.payload);
            f.get("i_payload", a.i_payload);
            f.get("count", a.count);
            f.get("start_phase", a.start_phase);
            f.finish();
            return a;
        }

        Scenario parse(const json &j)
        {
            Fields f(j, "");
            Scenario s;
            f.get("name", s.name);
            f.get("seed", s.seed);
            f.get("duration", s.duration);
            const json *chans = f.raw("channels");
            if (!chans || !chans->is_array())
                throw ConfigError("channels", "expected an array of channel blocks");
            for (std::size_t i = 0; i < chans->size(); ++i)
                s.channels.push_back(parse_channel(chans->at(i), indexed("channels", i)));
            if (const json *v = f.raw("ap"))
                s.ap = parse_ap(*v, "ap");
            if (const json *v = f.raw("impairments"))
                s.impairments = parse_impairments(*v, "impairments");
            if (const json *v = f.raw("streams"))
            {
                if (!v->is_array())
                    throw ConfigError("streams", "expected an array");
                for (std::size_t i = 0; i < v->size(); ++i)
                    s.streams.push_back(parse_stream(v->at(i), indexed("streams", i)));
            }
            if (const json *v = f.raw("loads"))
            {
                if (!v->is_array())
                    throw ConfigError("loads", "expected an array");
                for (std::size_t i = 0; i < v->size(); ++i)
                    s.loads.push_back(parse_load(v->at(i), indexed("loads", i)));
            }
            if (const json *v = f.raw("aci_experiment"))
                s.aci_experiment = parse_aci_experiment(*v, "aci_experiment");
            f.finish();
            s.validate();
            return s;
        }

        // ------------------------------------------------------------ serialization

        template <class T>
        json opt(const std::optional<T> &v)
        {
            return v ? json(*v) : json(nullptr);
        }

        json loss_json(const LossModel &m)
        {
            return {{"kind", m.kind == LossKind::bernoulli ? "bernoulli" : "gilbert-elliott"},
                    {"p_loss", m.p_loss},
                    {"p_gb", m.p_gb},
                    {"p_bg", m.p_bg},
                    {"p_loss_good", m.p_loss_good},
                    {"p_loss_bad", m.p_loss_bad}};
        }

        json to_json(const Scenario &s)
        {
            json j;
            j["name"] = s.name;
            j["seed"] = s.seed;
            j["duration"] = s.duration;
            j["channels"] = json::array();
            for (const auto &c : s.channels)
                j["channels"].push_back({{"channel_number", c.channel_number},
                                         {"band", to_string(c.band)},
                                         {"bitrate", c.bitrate},
                                         {"ack_bitrate", c.ack_bitrate},
                                         {"slot", c.slot},
                                         {"sifs", c.sifs},
                                         {"cw_min", c.cw_min},
                                         {"cw_max", c.cw_max},
                                         {"retry_limit", c.retry_limit},
                                         {"immediate_access", c.immediate_access},
                                         {"mac_overhead_bytes", c.mac_overhead_bytes},
                                         {"ack_bytes", c.ack_bytes},
                                         {"wpa2", c.wpa2},
                                         {"loss_model", loss_json(c.loss_model)},
                                         {"ack_loss_model", loss_json(c.ack_loss_model)}});
            j["ap"] = {{"mode", s.ap.mode == ApMode::two_aps ? "two-aps" : "one-dual-band-ap"},
                       {"forward_delay_base", s.ap.forward_delay_base},
                       {"dual_band_extra", s.ap.dual_band_extra}};
            const auto &imp = s.impairments;
            j["impairments"]["dtim"] = {{"enabled", imp.dtim.enabled},
                                        {"t_beac", imp.dtim.t_beac},
                                        {"p", imp.dtim.p},
                                        {"beacon_offset", opt(imp.dtim.beacon_offset)}};
            j["impairments"]["nm"] = {{"enabled", imp.nm.enabled},
                                      {"scan_period", imp.nm.scan_period},
                                      {"n_probes", imp.nm.n_probes},
                                      {"probe_dwell", imp.nm.probe_dwell},
                                      {"probe_gap", imp.nm.probe_gap},
                                      {"scan_phase", imp.nm.scan_phase},
                                      {"simultaneous_on_all_adapters", imp.nm.simultaneous_on_all_adapters},
                                      {"multicast_mode", imp.nm.multicast_mode == NmMulticastMode::drop ? "drop" : "dtim-buffer"},
                                      {"probes_per_release", imp.nm.probes_per_release},
                                      {"buffer_capacity", imp.nm.buffer_capacity}};
            j["impairments"]["ap_stall"] = {{"enabled", imp.ap_stall.enabled},
                                            {"period", imp.ap_stall.period},
                                            {"max_stall", imp.ap_stall.max_stall},
                                            {"shared_across_channels", opt(imp.ap_stall.shared_across_channels)},
                                            {"phase_offset_per_ap", imp.ap_stall.phase_offset_per_ap},
                                            {"onset_jitter", opt(imp.ap_stall.onset_jitter)}};
            j["impairments"]["aci"] = {{"enabled", imp.aci.enabled},
                                       {"coupling_by_step", imp.aci.coupling_by_step},
                                       {"p_ack_corrupt", imp.aci.p_ack_corrupt},
                                       {"busy_sense_threshold", imp.aci.busy_sense_threshold}};
            j["streams"] = json::array();
            for (const auto &st : s.streams)
                j["streams"].push_back({{"name", st.name},
                                        {"kind", to_string(st.kind)},
                                        {"Tc", st.Tc},
                                        {"payload", st.payload},
                                        {"count", opt(st.count)},
                                        {"duration", opt(st.duration)},
                                        {"start_phase", st.start_phase},
                                        {"channels", st.channels}});
            j["loads"] = json::array();
            for (const auto &l : s.loads)
                j["loads"].push_back({{"channel", l.channel},
                                      {"n_nodes", l.n_nodes},
                                      {"payload", l.payload},
                                      {"intra_gap", l.intra_gap},
                                      {"mean_burst_len", l.mean_burst_len},
                                      {"mean_gap", l.mean_gap}});
            if (s.aci_experiment)
            {
                const auto &a = *s.aci_experiment;
                j["aci_experiment"] = {{"name", a.name},
                                       {"Tc", a.Tc},
                                       {"lead", a.lead},
                                       {"duplex_every", a.duplex_every},
                                       {"m_channel", a.m_channel},
                                       {"i_channel", a.i_channel},
                                       {"payload", a.payload},
                                       {"i_payload", a.i_payload},
                                       {"count", opt(a.count)},
                                       {"start_phase", a.start_phase}};
            }
            else
            {
                j["aci_experiment"] = nullptr;
            }
            return j;
        }

        bool file_safe(const std::string &name)
        {
            if (name.empty())
                return false;
            for (char c : name)
                if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.'))
                    return false;
            return true;
        }
    } // namespace

    int Scenario::channel_index(int number) const
    {
        for (std::size_t i = 0; i < channels.size(); ++i)
            if (channels[i].channel_number == number)
                return static_cast<int>(i);
        return -1;
    }

    bool Scenario::stall_shared() const
    {
        return impairments.ap_stall.shared_across_channels.value_or(ap.mode == ApMode::one_dual_band_ap);
    }

    void Scenario::validate() const
    {
        if (duration <= 0)
            throw ConfigError("duration", "must be positive");
        if (channels.empty())
            throw ConfigError("channels", "at least one channel is required");
        std::set<int> numbers;
        for (std::size_t i = 0; i < channels.size(); ++i)
        {
            const std::string path = indexed("channels", i);
            checked(path, [&] { channels[i].validate(); });
            if (!numbers.insert(channels[i].channel_number).second)
                throw ConfigError(path + ".channel_number",
                                  "channel " + std::to_string(channels[i].channel_number) + " is listed twice");
        }
        if (ap.forward_delay_base < 0 || ap.dual_band_extra < 0)
            throw ConfigError("ap", "forwarding delays must be >= 0");

        const auto &imp = impairments;
        if (imp.dtim.enabled)
            checked("impairments.dtim", [&] { imp.dtim.validate(); });
        if (imp.dtim.beacon_offset && *imp.dtim.beacon_offset < 0)
            throw ConfigError("impairments.dtim.beacon_offset", "must be >= 0");
        if (imp.nm.enabled)
            checked("impairments.nm", [&] { imp.nm.validate(); });
        if (imp.ap_stall.enabled)
            checked("impairments.ap_stall", [&] { imp.ap_stall.validate(); });
        if (imp.ap_stall.phase_offset_per_ap.size() > channels.size())
            throw ConfigError("impairments.ap_stall.phase_offset_per_ap", "more phases than APs");
        if (imp.aci.enabled)
            checked("impairments.aci", [&] { imp.aci.validate(); });

        std::set<std::string> names;
        for (std::size_t i = 0; i < streams.size(); ++i)
        {
            const auto &st = streams[i];
            const std::string path = indexed("streams", i);
            if (!file_safe(st.name))
                throw ConfigError(path + ".name", "'" + st.name + "' must be non-empty and use only [A-Za-z0-9_.-]");
            if (!names.insert(st.name).second)
                throw ConfigError(path + ".name", "duplicate stream name '" + st.name + "'");
            checked(path, [&] { st.validate(); });
            std::set<int> seen;
            for (std::size_t k = 0; k < st.channels.size(); ++k)
            {
                if (channel_index(st.channels[k]) < 0)
                    throw ConfigError(indexed(path + ".channels", k), "channel " + std::to_string(st.channels[k]) +
                                                                          " is not configured (stream '" + st.name + "')");
                if (!seen.insert(st.channels[k]).second)
                    throw ConfigError(indexed(path + ".channels", k), "channel listed twice (stream '" + st.name + "')");
            }
        }
        for (std::size_t i = 0; i < loads.size(); ++i)
        {
            const std::string path = indexed("loads", i);
            checked(path, [&] { loads[i].validate(); });
            if (channel_index(loads[i].channel) < 0)
                throw ConfigError(path + ".channel", "channel " + std::to_string(loads[i].channel) + " is not configured");
        }
        if (aci_experiment)
        {
            const auto &a = *aci_experiment;
            checked("aci_experiment", [&] { a.validate(); });
            if (!file_safe(a.name))
                throw ConfigError("aci_experiment.name", "'" + a.name + "' must use only [A-Za-z0-9_.-]");
            if (names.count(a.name))
                throw ConfigError("aci_experiment.name", "clashes with stream '" + a.name + "'");
            if (channel_index(a.m_channel) < 0)
                throw ConfigError("aci_experiment.m_channel", "channel " + std::to_string(a.m_channel) + " is not configured");
            if (channel_index(a.i_channel) < 0)
                throw ConfigError("aci_experiment.i_channel", "channel " + std::to_string(a.i_channel) + " is not configured");
        }
    }

    Scenario parse_scenario(std::string_view text)
    {
        json j;
        try
        {
            j = json::parse(text.begin(), text.end());
        }
        catch (const json::parse_error &e)
        {
            throw ConfigError("", std::string("malformed JSON: ") + e.what());
        }
        if (j.is_object() && j.contains("scenario") && j.contains("config_hash"))
        {
            Scenario s = parse(j.at("scenario"));
            const std::string expected = j.at("config_hash").is_string() ? j.at("config_hash").get<std::string>() : "";
            if (config_hash(s) != expected)
                throw ConfigError("config_hash", "does not match the embedded scenario");
            return s;
        }
        return parse(j);
    }

    Scenario load_scenario(const std::filesystem::path &path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw std::runtime_error("cannot open config " + path.string());
        std::ostringstream ss;
        ss << in.rdbuf();
        return parse_scenario(ss.str());
    }

    std::string dump_scenario(const Scenario &s, int indent)
    {
        return to_json(s).dump(indent);
    }

    std::string config_hash(const Scenario &s)
    {
        const std::string text = to_json(s).dump();
        std::uint64_t h = 0xCBF29CE484222325ULL;
        for (unsigned char c : text)
        {
            h ^= c;
            h *= 0x100000001B3ULL;
        }
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
        return buf;
    }

    std::string make_manifest(const Scenario &s)
    {
        json m;
        m["config_hash"] = config_hash(s);
        m["seed"] = s.seed;
        m["scenario"] = to_json(s);
        return m.dump(2) + "\n";
    }

} // namespace prpsim
