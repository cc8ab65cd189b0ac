#pragma once

#include "prpsim/channel_mac.hpp"
#include "prpsim/prp.hpp"

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace prpsim
{
    inline constexpr const char *kChannelTraceHeader =
        "seq,channel,set_tag,t_gen_ns,t_air_start_ns,t_air_end_ns,t_ack_ns,t_eth_ns,retries,data_lost,ack_lost";
    inline constexpr const char *kRedundantTraceHeader = "seq,accepted_channel,t_gen_ns,t_accept_ns,lost";

    // Schema violation; the message names the source and the 1-based line.
    class TraceError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    const char *tag_code(SetTag tag);

    void write_channel_trace(std::ostream &out, const std::vector<TxRecord> &records);
    void write_redundant_trace(std::ostream &out, const RedundantLinkView &view);

    std::vector<TxRecord> read_channel_trace(std::istream &in, const std::string &source);
    std::vector<RedundantEntry> read_redundant_trace(std::istream &in, const std::string &source);

    enum class TraceKind
    {
        channel,
        redundant
    };

    struct LoadedTrace
    {
        std::filesystem::path path;
        TraceKind kind = TraceKind::channel;
        std::vector<TxRecord> records;        // channel traces
        std::vector<RedundantEntry> entries;  // redundant traces
        bool acked = false;                   // confirmed (unicast) traffic
        bool tagged = false;                  // carries A / NA set tags
    };

    /// Reads either schema, chosen by the header line. Empty traces are an error.
    LoadedTrace load_trace(const std::filesystem::path &path);

    /// Whether any row shows evidence of an ACK exchange.
    bool trace_is_acked(const std::vector<TxRecord> &records);

} // namespace prpsim
