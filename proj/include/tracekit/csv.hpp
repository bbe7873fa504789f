// csv.hpp
//
// Canonical trace CSV format:
//   timestamp,size,src_ip,dst_ip,src_port,dst_port,protocol,ttl,tcp_flags
// Timestamps carry exactly six decimal places, lines end with LF.

#pragma once

#include <iosfwd>
#include <string>

#include "tracekit/trace.hpp"

namespace tracekit {

extern const char* const kCsvHeader;

/// Parses canonical CSV. Validation failures report the 1-based line number.
/// The trace duration is the last packet timestamp.
Trace read_csv(std::istream& in);
Trace read_csv_file(const std::string& path);

void write_csv(std::ostream& out, const Trace& trace);
void write_csv_file(const std::string& path, const Trace& trace);
std::string write_csv_string(const Trace& trace);

}  // namespace tracekit
