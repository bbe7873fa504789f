// helpers.hpp
//
// Small builders shared by the test suites.

#pragma once

#include <string>
#include <vector>

#include "tracekit/trace.hpp"

namespace testutil {

inline tracekit::PacketRecord packet(double t, uint32_t size,
                                     const std::string& src,
                                     const std::string& dst,
                                     uint16_t sport = 1000,
                                     uint16_t dport = 80, uint8_t proto = 6,
                                     uint8_t ttl = 64, uint8_t flags = 0) {
    tracekit::PacketRecord p;
    p.timestamp = t;
    p.size = size;
    p.src_ip = tracekit::parse_ipv4(src);
    p.dst_ip = tracekit::parse_ipv4(dst);
    p.src_port = sport;
    p.dst_port = dport;
    p.protocol = proto;
    p.ttl = ttl;
    p.tcp_flags = flags;
    return p;
}

inline tracekit::Trace trace_of(std::vector<tracekit::PacketRecord> packets,
                                double duration = -1.0) {
    tracekit::Trace t;
    t.packets = std::move(packets);
    t.duration = duration >= 0.0 ? duration : t.last_timestamp();
    return t;
}

}  // namespace testutil
