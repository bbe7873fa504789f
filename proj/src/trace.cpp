#include "tracekit/trace.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

namespace tracekit {

bool is_pure_syn(uint8_t flags) {
    return (flags & (tcpflag::kSyn | tcpflag::kAck)) == tcpflag::kSyn;
}

bool is_syn_ack(uint8_t flags) {
    return (flags & (tcpflag::kSyn | tcpflag::kAck)) ==
           (tcpflag::kSyn | tcpflag::kAck);
}

bool is_handshake_ack(uint8_t flags) {
    constexpr uint8_t mask = tcpflag::kSyn | tcpflag::kAck | tcpflag::kFin |
                             tcpflag::kRst | tcpflag::kPsh | tcpflag::kUrg;
    return (flags & mask) == tcpflag::kAck;
}

uint32_t parse_ipv4(const std::string& text) {
    uint32_t parts[4];
    size_t pos = 0;
    for (int i = 0; i < 4; ++i) {
        if (pos >= text.size() || !isdigit(static_cast<unsigned char>(text[pos])))
            throw std::runtime_error("bad IPv4 address: " + text);
        uint32_t v = 0;
        size_t digits = 0;
        while (pos < text.size() && isdigit(static_cast<unsigned char>(text[pos]))) {
            v = v * 10 + static_cast<uint32_t>(text[pos] - '0');
            ++pos;
            if (++digits > 3 || v > 255)
                throw std::runtime_error("bad IPv4 address: " + text);
        }
        parts[i] = v;
        if (i < 3) {
            if (pos >= text.size() || text[pos] != '.')
                throw std::runtime_error("bad IPv4 address: " + text);
            ++pos;
        }
    }
    if (pos != text.size())
        throw std::runtime_error("bad IPv4 address: " + text);
    return (parts[0] << 24) | (parts[1] << 16) | (parts[2] << 8) | parts[3];
}

std::string format_ipv4(uint32_t addr) {
    char buf[16];
    snprintf(buf, sizeof(buf), "%u.%u.%u.%u", (addr >> 24) & 0xFF,
             (addr >> 16) & 0xFF, (addr >> 8) & 0xFF, addr & 0xFF);
    return buf;
}

FlowKey FlowKey::canonical() const {
    if (std::pair{dst_ip, dst_port} < std::pair{src_ip, src_port})
        return reversed();
    return *this;
}

bool FlowKey::is_canonical() const {
    return !(std::pair{dst_ip, dst_port} < std::pair{src_ip, src_port});
}

std::string FlowKey::to_string() const {
    return format_ipv4(src_ip) + ":" + std::to_string(src_port) + "->" +
           format_ipv4(dst_ip) + ":" + std::to_string(dst_port) + "/" +
           std::to_string(protocol);
}

size_t FlowKeyHash::operator()(const FlowKey& k) const {
    // FNV-1a over the five fields.
    uint64_t h = 1469598103934665603ull;
    auto mix = [&h](uint64_t v, int bytes) {
        for (int i = 0; i < bytes; ++i) {
            h ^= (v >> (8 * i)) & 0xFF;
            h *= 1099511628211ull;
        }
    };
    mix(k.src_ip, 4);
    mix(k.dst_ip, 4);
    mix(k.src_port, 2);
    mix(k.dst_port, 2);
    mix(k.protocol, 1);
    return static_cast<size_t>(h);
}

bool Trace::sorted_by_time() const {
    return std::is_sorted(packets.begin(), packets.end(),
                          [](const PacketRecord& a, const PacketRecord& b) {
                              return a.timestamp < b.timestamp;
                          });
}

double Trace::last_timestamp() const {
    return packets.empty() ? 0.0 : packets.back().timestamp;
}

uint64_t Trace::total_bytes() const {
    uint64_t total = 0;
    for (const auto& p : packets) total += p.size;
    return total;
}

Trace slice(const Trace& trace, double start, double length) {
    if (start < 0.0)
        throw std::invalid_argument("slice: start must be >= 0");
    if (length <= 0.0)
        throw std::invalid_argument("slice: length must be > 0");
    Trace out;
    double end = start + length;
    for (const auto& p : trace.packets) {
        if (p.timestamp < start) continue;
        if (p.timestamp >= end) break;
        PacketRecord q = p;
        q.timestamp = p.timestamp - start;
        out.packets.push_back(q);
    }
    out.duration = std::max(0.0, std::min(trace.duration, end) - start);
    out.origin = trace.origin == 0.0 ? 0.0 : trace.origin + start;
    return out;
}

}  // namespace tracekit
