#include "prpsim/trace_io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

namespace prpsim
{
    namespace
    {
        class RowWriter
        {
        public:
            explicit RowWriter(std::ostream &out) : out_(out) {}

            template <class T>
            RowWriter &field(T v)
            {
                sep();
                auto [p, ec] = std::to_chars(buf_.data(), buf_.data() + buf_.size(), v);
                (void)ec;
                out_.write(buf_.data(), p - buf_.data());
                return *this;
            }

            RowWriter &text(const char *s)
            {
                sep();
                out_ << s;
                return *this;
            }

            void end()
            {
                out_.put('\n');
                first_ = true;
            }

        private:
            void sep()
            {
                if (!first_)
                    out_.put(',');
                first_ = false;
            }

            std::ostream &out_;
            std::array<char, 32> buf_{};
            bool first_ = true;
        };

        std::vector<std::string_view> split(std::string_view line)
        {
            std::vector<std::string_view> cols;
            std::size_t start = 0;
            for (;;)
            {
                const auto pos = line.find(',', start);
                cols.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
                if (pos == std::string_view::npos)
                    break;
                start = pos + 1;
            }
            return cols;
        }

        struct RowContext
        {
            const std::string &source;
            std::size_t line;

            [[noreturn]] void fail(const std::string &what) const
            {
                throw TraceError(source + ":" + std::to_string(line) + ": " + what);
            }
        };

        template <class T>
        T number(std::string_view s, const char *column, const RowContext &ctx)
        {
            T v{};
            auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (ec != std::errc() || p != s.data() + s.size())
                ctx.fail(std::string("column ") + column + ": '" + std::string(s) + "' is not an integer");
            return v;
        }

        bool flag(std::string_view s, const char *column, const RowContext &ctx)
        {
            if (s == "0")
                return false;
            if (s == "1")
                return true;
            ctx.fail(std::string("column ") + column + ": expected 0 or 1, got '" + std::string(s) + "'");
        }

        SimTime timestamp(std::string_view s, const char *column, const RowContext &ctx)
        {
            const auto t = number<SimTime>(s, column, ctx);
            if (t < kAbsent)
                ctx.fail(std::string("column ") + column + ": negative timestamp other than -1");
            return t;
        }

        std::string_view strip_cr(std::string_view line)
        {
            if (!line.empty() && line.back() == '\r')
                line.remove_suffix(1);
            return line;
        }

        void expect_header(std::istream &in, const std::string &source, const char *header)
        {
            std::string line;
            if (!std::getline(in, line))
                throw TraceError(source + ": empty trace (no header)");
            if (strip_cr(line) != header)
                throw TraceError(source + ":1: unexpected header '" + line + "'");
        }
    } // namespace

    const char *tag_code(SetTag tag)
    {
        switch (tag)
        {
        case SetTag::a:
            return "A";
        case SetTag::not_a:
            return "NA";
        default:
            return "-";
        }
    }

    void write_channel_trace(std::ostream &out, const std::vector<TxRecord> &records)
    {
        out << kChannelTraceHeader << '\n';
        RowWriter w(out);
        for (const TxRecord &r : records)
        {
            w.field(r.seq).field(r.channel).text(tag_code(r.tag)).field(r.t_gen).field(r.t_air_start).field(r.t_air_end);
            w.field(r.t_ack).field(r.t_eth).field(r.retries).field(int(r.data_lost)).field(int(r.ack_lost)).end();
        }
    }

    void write_redundant_trace(std::ostream &out, const RedundantLinkView &view)
    {
        out << kRedundantTraceHeader << '\n';
        RowWriter w(out);
        for (const RedundantEntry &e : view.entries)
            w.field(e.seq).field(e.accepted_channel).field(e.t_gen).field(e.t_accept).field(int(e.lost())).end();
    }

    std::vector<TxRecord> read_channel_trace(std::istream &in, const std::string &source)
    {
        expect_header(in, source, kChannelTraceHeader);
        std::vector<TxRecord> out;
        std::string line;
        for (std::size_t n = 2; std::getline(in, line); ++n)
        {
            const std::string_view row = strip_cr(line);
            if (row.empty())
                continue;
            const RowContext ctx{source, n};
            const auto c = split(row);
            if (c.size() != 11)
                ctx.fail("expected 11 columns, found " + std::to_string(c.size()));
            TxRecord r;
            r.seq = number<std::uint64_t>(c[0], "seq", ctx);
            r.channel = number<int>(c[1], "channel", ctx);
            if (c[2] == "A")
                r.tag = SetTag::a;
            else if (c[2] == "NA")
                r.tag = SetTag::not_a;
            else if (c[2] == "-")
                r.tag = SetTag::none;
            else
                ctx.fail("column set_tag: expected A, NA or -");
            r.t_gen = timestamp(c[3], "t_gen_ns", ctx);
            r.t_air_start = timestamp(c[4], "t_air_start_ns", ctx);
            r.t_air_end = timestamp(c[5], "t_air_end_ns", ctx);
            r.t_ack = timestamp(c[6], "t_ack_ns", ctx);
            r.t_eth = timestamp(c[7], "t_eth_ns", ctx);
            r.retries = number<int>(c[8], "retries", ctx);
            r.data_lost = flag(c[9], "data_lost", ctx);
            r.ack_lost = flag(c[10], "ack_lost", ctx);
            if (r.t_gen == kAbsent)
                ctx.fail("column t_gen_ns: must be present");
            if (auto err = check_record(r))
                ctx.fail(*err);
            out.push_back(r);
        }
        return out;
    }

    std::vector<RedundantEntry> read_redundant_trace(std::istream &in, const std::string &source)
    {
        expect_header(in, source, kRedundantTraceHeader);
        std::vector<RedundantEntry> out;
        std::string line;
        for (std::size_t n = 2; std::getline(in, line); ++n)
        {
            const std::string_view row = strip_cr(line);
            if (row.empty())
                continue;
            const RowContext ctx{source, n};
            const auto c = split(row);
            if (c.size() != 5)
                ctx.fail("expected 5 columns, found " + std::to_string(c.size()));
            RedundantEntry e;
            e.seq = number<std::uint64_t>(c[0], "seq", ctx);
            e.accepted_channel = number<int>(c[1], "accepted_channel", ctx);
            e.t_gen = timestamp(c[2], "t_gen_ns", ctx);
            e.t_accept = timestamp(c[3], "t_accept_ns", ctx);
            const bool lost = flag(c[4], "lost", ctx);
            if (lost != e.lost() || lost != (e.accepted_channel == -1))
                ctx.fail("lost flag disagrees with t_accept_ns / accepted_channel");
            if (!lost && e.t_accept < e.t_gen)
                ctx.fail("t_accept_ns < t_gen_ns");
            out.push_back(e);
        }
        return out;
    }

    bool trace_is_acked(const std::vector<TxRecord> &records)
    {
        for (const TxRecord &r : records)
            if (r.t_ack != kAbsent || r.ack_lost || r.retries > 0)
                return true;
        return false;
    }

    LoadedTrace load_trace(const std::filesystem::path &path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw TraceError("cannot open trace " + path.string());
        std::string header;
        if (!std::getline(in, header))
            throw TraceError(path.string() + ": empty trace (no header)");
        in.seekg(0);
        LoadedTrace t;
        t.path = path;
        if (strip_cr(header) == kRedundantTraceHeader)
        {
            t.kind = TraceKind::redundant;
            t.entries = read_redundant_trace(in, path.string());
            if (t.entries.empty())
                throw TraceError(path.string() + ": trace has no rows");
            return t;
        }
        t.records = read_channel_trace(in, path.string());
        if (t.records.empty())
            throw TraceError(path.string() + ": trace has no rows");
        t.acked = trace_is_acked(t.records);
        for (const TxRecord &r : t.records)
            t.tagged = t.tagged || r.tag != SetTag::none;
        return t;
    }

} // namespace prpsim
