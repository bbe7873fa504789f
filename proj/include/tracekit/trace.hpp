// trace.hpp
//
// Packet/trace data model shared by all analyses.

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace tracekit {

constexpr uint8_t kProtoTcp = 6;
constexpr uint8_t kProtoUdp = 17;

namespace tcpflag {
constexpr uint8_t kFin = 0x01;
constexpr uint8_t kSyn = 0x02;
constexpr uint8_t kRst = 0x04;
constexpr uint8_t kPsh = 0x08;
constexpr uint8_t kAck = 0x10;
constexpr uint8_t kUrg = 0x20;
constexpr uint8_t kEce = 0x40;
constexpr uint8_t kCwr = 0x80;
}  // namespace tcpflag

/// SYN set, ACK clear. ECN setup bits are ignored.
bool is_pure_syn(uint8_t flags);
/// SYN and ACK both set.
bool is_syn_ack(uint8_t flags);
/// ACK set with no SYN/FIN/RST/PSH/URG; the bare ack that closes a handshake.
bool is_handshake_ack(uint8_t flags);

/// Parses dotted-quad IPv4 into host order. Throws std::runtime_error on bad input.
uint32_t parse_ipv4(const std::string& text);
std::string format_ipv4(uint32_t addr);

/// One captured packet. `size` is the IP datagram length (not the capture
/// length), `timestamp` is seconds since the trace start at microsecond
/// resolution. Ports are 0 for protocols without them and for non-first
/// fragments.
struct PacketRecord {
    double timestamp = 0.0;
    uint32_t size = 0;
    uint32_t src_ip = 0;
    uint32_t dst_ip = 0;
    uint16_t src_port = 0;
    uint16_t dst_port = 0;
    uint8_t protocol = 0;
    uint8_t ttl = 0;
    uint8_t tcp_flags = 0;
};

/// Directional 5-tuple flow identity.
struct FlowKey {
    uint32_t src_ip = 0;
    uint32_t dst_ip = 0;
    uint16_t src_port = 0;
    uint16_t dst_port = 0;
    uint8_t protocol = 0;

    static FlowKey of(const PacketRecord& p) {
        return FlowKey{p.src_ip, p.dst_ip, p.src_port, p.dst_port, p.protocol};
    }

    FlowKey reversed() const {
        return FlowKey{dst_ip, src_ip, dst_port, src_port, protocol};
    }

    /// Bidirectional form: the endpoint with the smaller (ip, port) pair
    /// becomes the source side, so both directions map to the same key.
    FlowKey canonical() const;

    /// True when this key already is its canonical form.
    bool is_canonical() const;

    std::string to_string() const;

    auto operator<=>(const FlowKey&) const = default;
};

struct FlowKeyHash {
    size_t operator()(const FlowKey& k) const;
};

/// An ordered packet sequence. `duration` may exceed the last timestamp
/// (e.g. a fixed capture window); `origin` is the wall-clock time of the
/// first packet when known, informational only.
struct Trace {
    std::vector<PacketRecord> packets;
    double duration = 0.0;
    double origin = 0.0;

    bool sorted_by_time() const;
    double last_timestamp() const;
    uint64_t total_bytes() const;
};

/// Packets with start <= t < start+length, rebased to t=0. The result
/// duration is the part of the window that overlaps the input trace.
Trace slice(const Trace& trace, double start, double length);

}  // namespace tracekit
