// pcap.hpp
//
// Classic pcap capture files (Ethernet link type). Both byte orders are
// accepted, as is the nanosecond-timestamp magic. IPv4 frames become
// PacketRecords; everything else is skipped and counted.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "tracekit/trace.hpp"

namespace tracekit {

struct PcapData {
    Trace trace;
    uint64_t accepted_frames = 0;
    uint64_t skipped_frames = 0;
    uint64_t accepted_bytes = 0;  // captured lengths, as stored in the file
    uint64_t skipped_bytes = 0;
};

/// Parses a capture. Records are sorted by time (stable) and rebased so the
/// first packet is at t=0; the original wall-clock start lands in
/// trace.origin. Throws on malformed headers; truncation errors carry the
/// file byte offset.
PcapData read_pcap(std::istream& in);
PcapData read_pcap_file(const std::string& path);

/// Writes a microsecond-magic Ethernet capture. Frames carry synthesized
/// link/IP/transport headers; payload bytes beyond the headers are not
/// stored (capture length < original length, like a snapped capture).
void write_pcap(std::ostream& out, const Trace& trace);
void write_pcap_file(const std::string& path, const Trace& trace);

}  // namespace tracekit
