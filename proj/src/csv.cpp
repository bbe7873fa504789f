#include "tracekit/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace tracekit {

const char* const kCsvHeader =
    "timestamp,size,src_ip,dst_ip,src_port,dst_port,protocol,ttl,tcp_flags";

namespace {

[[noreturn]] void fail(size_t line, const std::string& what) {
    throw std::runtime_error("csv line " + std::to_string(line) + ": " + what);
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    size_t start = 0;
    while (true) {
        size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return out;
}

uint64_t parse_uint(const std::string& s, uint64_t max, size_t line,
                    const char* field) {
    if (s.empty()) fail(line, std::string("empty ") + field);
    uint64_t v = 0;
    for (char c : s) {
        if (c < '0' || c > '9')
            fail(line, std::string("bad ") + field + " '" + s + "'");
        v = v * 10 + static_cast<uint64_t>(c - '0');
        if (v > max) fail(line, std::string(field) + " out of range: " + s);
    }
    return v;
}

double parse_timestamp(const std::string& s, size_t line) {
    if (s.empty()) fail(line, "empty timestamp");
    const char* begin = s.c_str();
    char* end = nullptr;
    double v = strtod(begin, &end);
    if (end != begin + s.size()) fail(line, "bad timestamp '" + s + "'");
    if (!(v >= 0.0)) fail(line, "negative timestamp");
    return v;
}

}  // namespace

Trace read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("csv: empty input, expected header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kCsvHeader)
        throw std::runtime_error("csv: bad header '" + line + "'");

    Trace trace;
    size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        auto fields = split_fields(line);
        if (fields.size() != 9)
            fail(lineno, "expected 9 fields, got " + std::to_string(fields.size()));

        PacketRecord p;
        p.timestamp = parse_timestamp(fields[0], lineno);
        p.size = static_cast<uint32_t>(
            parse_uint(fields[1], 0xFFFFFFFFull, lineno, "size"));
        if (p.size < 20) fail(lineno, "size below IPv4 minimum: " + fields[1]);
        try {
            p.src_ip = parse_ipv4(fields[2]);
            p.dst_ip = parse_ipv4(fields[3]);
        } catch (const std::exception& e) {
            fail(lineno, e.what());
        }
        p.src_port =
            static_cast<uint16_t>(parse_uint(fields[4], 65535, lineno, "src_port"));
        p.dst_port =
            static_cast<uint16_t>(parse_uint(fields[5], 65535, lineno, "dst_port"));
        p.protocol =
            static_cast<uint8_t>(parse_uint(fields[6], 255, lineno, "protocol"));
        p.ttl = static_cast<uint8_t>(parse_uint(fields[7], 255, lineno, "ttl"));
        if (p.ttl == 0) fail(lineno, "ttl must be >= 1");
        p.tcp_flags =
            static_cast<uint8_t>(parse_uint(fields[8], 255, lineno, "tcp_flags"));

        if (p.protocol != kProtoTcp && p.protocol != kProtoUdp &&
            (p.src_port != 0 || p.dst_port != 0))
            fail(lineno, "ports must be 0 for protocol " +
                             std::to_string(p.protocol));

        if (!trace.packets.empty() && p.timestamp < trace.packets.back().timestamp)
            fail(lineno, "timestamp decreases");

        trace.packets.push_back(p);
    }
    trace.duration = trace.last_timestamp();
    return trace;
}

Trace read_csv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    return read_csv(in);
}

void write_csv(std::ostream& out, const Trace& trace) {
    out << kCsvHeader << '\n';
    char buf[128];
    for (const auto& p : trace.packets) {
        snprintf(buf, sizeof(buf), "%.6f,%u,%s,%s,%u,%u,%u,%u,%u\n", p.timestamp,
                 p.size, format_ipv4(p.src_ip).c_str(),
                 format_ipv4(p.dst_ip).c_str(), p.src_port, p.dst_port,
                 p.protocol, p.ttl, p.tcp_flags);
        out << buf;
    }
}

void write_csv_file(const std::string& path, const Trace& trace) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    write_csv(out, trace);
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::string write_csv_string(const Trace& trace) {
    std::ostringstream ss;
    write_csv(ss, trace);
    return ss.str();
}

}  // namespace tracekit
