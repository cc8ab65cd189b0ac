#include "prpsim/trace_io.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace prpsim;
using namespace prpsim::literals;

namespace
{
    TxRecord acked(std::uint64_t seq, SetTag tag)
    {
        TxRecord r;
        r.seq = seq;
        r.channel = 165;
        r.tag = tag;
        r.t_gen = static_cast<SimTime>(seq) * 10_ms;
        r.t_air_start = r.t_gen + 34_us;
        r.t_air_end = r.t_gen + 66_us;
        r.t_ack = r.t_gen + 110_us;
        r.t_eth = r.t_gen + 216_us;
        return r;
    }

    std::string error_of(const std::string &text)
    {
        std::istringstream in(text);
        try
        {
            read_channel_trace(in, "mem");
        }
        catch (const TraceError &e)
        {
            return e.what();
        }
        return {};
    }

    std::filesystem::path temp_file(const std::string &name, const std::string &content)
    {
        const auto dir = std::filesystem::temp_directory_path() / "prpsim_trace_io_test";
        std::filesystem::create_directories(dir);
        const auto p = dir / name;
        std::ofstream(p, std::ios::binary) << content;
        return p;
    }
} // namespace

TEST_CASE("headers are fixed")
{
    CHECK(std::string(kChannelTraceHeader) ==
          "seq,channel,set_tag,t_gen_ns,t_air_start_ns,t_air_end_ns,t_ack_ns,t_eth_ns,retries,data_lost,ack_lost");
    CHECK(std::string(kRedundantTraceHeader) == "seq,accepted_channel,t_gen_ns,t_accept_ns,lost");
    CHECK(std::string(tag_code(SetTag::a)) == "A");
    CHECK(std::string(tag_code(SetTag::not_a)) == "NA");
    CHECK(std::string(tag_code(SetTag::none)) == "-");
}

TEST_CASE("channel trace round trip")
{
    TxRecord lost;
    lost.seq = 3;
    lost.channel = 165;
    lost.t_gen = 30_ms;
    lost.t_air_start = 30_ms + 34_us;
    lost.t_air_end = 31_ms;
    lost.retries = 7;
    lost.data_lost = true;
    const std::vector<TxRecord> recs{acked(1, SetTag::not_a), acked(2, SetTag::a), lost};

    std::ostringstream out;
    write_channel_trace(out, recs);
    const std::string text = out.str();
    CHECK(text.rfind(std::string(kChannelTraceHeader) + "\n1,165,NA,10000000,10034000,", 0) == 0);
    CHECK(text.find("3,165,-,30000000,30034000,31000000,-1,-1,7,1,0\n") != std::string::npos);

    std::istringstream in(text);
    CHECK(read_channel_trace(in, "mem") == recs);
}

TEST_CASE("redundant trace round trip")
{
    RedundantLinkView v;
    v.entries = {{1, 0, 165, 5_ms}, {2, 100_ms, -1, kAbsent}};
    std::ostringstream out;
    write_redundant_trace(out, v);
    CHECK(out.str() == std::string(kRedundantTraceHeader) + "\n1,165,0,5000000,0\n2,-1,100000000,-1,1\n");
    std::istringstream in(out.str());
    CHECK(read_redundant_trace(in, "mem") == v.entries);

    std::istringstream bad(std::string(kRedundantTraceHeader) + "\n1,165,0,-1,0\n");
    CHECK_THROWS_AS(read_redundant_trace(bad, "mem"), TraceError);
}

TEST_CASE("schema errors carry the line number")
{
    const std::string h = std::string(kChannelTraceHeader) + "\n";
    CHECK(error_of(h + "1,165,-,0,34000,66000,110000,216000,0,0,0\n1,165,-,0\n").find("mem:3:") == 0);
    CHECK(error_of(h + "1,165,B,0,34000,66000,110000,216000,0,0,0\n").find("mem:2: column set_tag") == 0);
    CHECK(error_of(h + "x,165,-,0,34000,66000,110000,216000,0,0,0\n").find("column seq") != std::string::npos);
    CHECK(error_of(h + "1,165,-,0,-5,66000,110000,216000,0,0,0\n").find("mem:2:") == 0);
    CHECK(error_of(h + "1,165,-,0,34000,66000,110000,216000,0,2,0\n").find("data_lost") != std::string::npos);
    // t_ack before t_air_end violates the record ordering
    CHECK(error_of(h + "1,165,-,0,34000,66000,50000,216000,0,0,0\n").find("mem:2:") == 0);
    CHECK(error_of("seq,foo\n").find("mem:1: unexpected header") == 0);
    CHECK(error_of("").find("empty trace") != std::string::npos);
    CHECK(error_of(h + "1,165,-,0,34000,66000,110000,216000,0,0,0\r\n").empty());
}

TEST_CASE("loading picks the schema from the header")
{
    std::ostringstream ch;
    write_channel_trace(ch, {acked(1, SetTag::a), acked(2, SetTag::not_a)});
    const auto t = load_trace(temp_file("ch.csv", ch.str()));
    CHECK(t.kind == TraceKind::channel);
    CHECK(t.records.size() == 2);
    CHECK(t.acked);
    CHECK(t.tagged);

    RedundantLinkView v;
    v.entries = {{1, 0, 1, 5_ms}};
    std::ostringstream rd;
    write_redundant_trace(rd, v);
    const auto r = load_trace(temp_file("red.csv", rd.str()));
    CHECK(r.kind == TraceKind::redundant);
    CHECK(r.entries.size() == 1);

    CHECK_THROWS_AS(load_trace(temp_file("empty.csv", "")), TraceError);
    CHECK_THROWS_AS(load_trace(temp_file("header_only.csv", std::string(kChannelTraceHeader) + "\n")), TraceError);
    CHECK_THROWS_AS(load_trace(temp_file("gone.csv", "") / "nope"), TraceError);
}

TEST_CASE("confirmed traffic detection")
{
    TxRecord mc;
    mc.seq = 1;
    mc.t_gen = 0;
    mc.t_air_start = 34_us;
    mc.t_air_end = 66_us;
    mc.t_eth = 66_us;
    CHECK_FALSE(trace_is_acked({mc}));
    CHECK(trace_is_acked({mc, acked(2, SetTag::none)}));
    TxRecord lost_ack = mc;
    lost_ack.t_eth = 216_us;
    lost_ack.ack_lost = true;
    CHECK(trace_is_acked({lost_ack}));
}
