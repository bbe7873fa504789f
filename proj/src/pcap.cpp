#include "tracekit/pcap.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace tracekit {

namespace {

constexpr uint32_t kMagicUsec = 0xa1b2c3d4;
constexpr uint32_t kMagicUsecSwapped = 0xd4c3b2a1;
constexpr uint32_t kMagicNsec = 0xa1b23c4d;
constexpr uint32_t kMagicNsecSwapped = 0x4d3cb2a1;
constexpr uint32_t kLinkEthernet = 1;

uint32_t rd32(const uint8_t* p, bool swapped) {
    uint32_t v;
    memcpy(&v, p, 4);
    if (swapped) v = __builtin_bswap32(v);
    return v;
}

uint16_t rd16be(const uint8_t* p) {
    return static_cast<uint16_t>((p[0] << 8) | p[1]);
}

uint32_t rd32be(const uint8_t* p) {
    return (static_cast<uint32_t>(p[0]) << 24) |
           (static_cast<uint32_t>(p[1]) << 16) |
           (static_cast<uint32_t>(p[2]) << 8) | p[3];
}

// Pulls the IPv4 fields out of one Ethernet frame. Returns false when the
// frame is not a usable IPv4 packet.
bool parse_frame(const uint8_t* frame, uint32_t caplen, PacketRecord* out) {
    if (caplen < 14 + 20) return false;
    if (rd16be(frame + 12) != 0x0800) return false;

    const uint8_t* ip = frame + 14;
    if ((ip[0] >> 4) != 4) return false;
    uint32_t ihl = static_cast<uint32_t>(ip[0] & 0x0F) * 4;
    if (ihl < 20) return false;
    uint16_t total_len = rd16be(ip + 2);
    if (total_len < ihl) return false;
    if (ip[8] == 0) return false;  // TTL 0 never appears in valid traffic

    out->size = total_len;
    out->ttl = ip[8];
    out->protocol = ip[9];
    out->src_ip = rd32be(ip + 12);
    out->dst_ip = rd32be(ip + 16);
    out->src_port = 0;
    out->dst_port = 0;
    out->tcp_flags = 0;

    uint16_t frag_offset = rd16be(ip + 6) & 0x1FFF;
    bool has_l4 = (out->protocol == kProtoTcp || out->protocol == kProtoUdp) &&
                  frag_offset == 0;
    if (has_l4 && caplen >= 14 + ihl + 4) {
        const uint8_t* l4 = ip + ihl;
        out->src_port = rd16be(l4);
        out->dst_port = rd16be(l4 + 2);
        if (out->protocol == kProtoTcp && caplen >= 14 + ihl + 14)
            out->tcp_flags = l4[13];
    }
    return true;
}

}  // namespace

PcapData read_pcap(std::istream& in) {
    uint8_t hdr[24];
    in.read(reinterpret_cast<char*>(hdr), sizeof(hdr));
    if (in.gcount() != sizeof(hdr))
        throw std::runtime_error("pcap: file shorter than global header");

    uint32_t magic;
    memcpy(&magic, hdr, 4);
    bool swapped, nsec;
    switch (magic) {
        case kMagicUsec: swapped = false; nsec = false; break;
        case kMagicUsecSwapped: swapped = true; nsec = false; break;
        case kMagicNsec: swapped = false; nsec = true; break;
        case kMagicNsecSwapped: swapped = true; nsec = true; break;
        default:
            throw std::runtime_error("pcap: unrecognized magic number");
    }
    uint32_t link = rd32(hdr + 20, swapped);
    if (link != kLinkEthernet)
        throw std::runtime_error("pcap: unsupported link type " +
                                 std::to_string(link) + " (expected Ethernet)");

    PcapData result;
    std::vector<double> stamps;
    std::vector<uint8_t> frame;
    uint64_t offset = 24;

    while (true) {
        uint8_t rec[16];
        in.read(reinterpret_cast<char*>(rec), sizeof(rec));
        std::streamsize got = in.gcount();
        if (got == 0) break;
        if (got != sizeof(rec))
            throw std::runtime_error(
                "pcap: truncated record header at offset " +
                std::to_string(offset));

        double ts = static_cast<double>(rd32(rec, swapped)) +
                    static_cast<double>(rd32(rec + 4, swapped)) *
                        (nsec ? 1e-9 : 1e-6);
        uint32_t incl_len = rd32(rec + 8, swapped);
        offset += 16;

        frame.resize(incl_len);
        if (incl_len > 0) {
            in.read(reinterpret_cast<char*>(frame.data()), incl_len);
            if (in.gcount() != static_cast<std::streamsize>(incl_len))
                throw std::runtime_error(
                    "pcap: truncated packet record at offset " +
                    std::to_string(offset) + " (expected " +
                    std::to_string(incl_len) + " bytes)");
        }
        offset += incl_len;

        PacketRecord p;
        if (parse_frame(frame.data(), incl_len, &p)) {
            p.timestamp = ts;
            stamps.push_back(ts);
            result.trace.packets.push_back(p);
            ++result.accepted_frames;
            result.accepted_bytes += incl_len;
        } else {
            ++result.skipped_frames;
            result.skipped_bytes += incl_len;
        }
    }

    auto& packets = result.trace.packets;
    std::stable_sort(packets.begin(), packets.end(),
                     [](const PacketRecord& a, const PacketRecord& b) {
                         return a.timestamp < b.timestamp;
                     });
    if (!packets.empty()) {
        double origin = packets.front().timestamp;
        for (auto& p : packets) p.timestamp -= origin;
        result.trace.origin = origin;
    }
    result.trace.duration = result.trace.last_timestamp();
    return result;
}

PcapData read_pcap_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    return read_pcap(in);
}

namespace {

void wr16be(std::vector<uint8_t>& v, uint16_t x) {
    v.push_back(static_cast<uint8_t>(x >> 8));
    v.push_back(static_cast<uint8_t>(x & 0xFF));
}

void wr32be(std::vector<uint8_t>& v, uint32_t x) {
    v.push_back(static_cast<uint8_t>(x >> 24));
    v.push_back(static_cast<uint8_t>((x >> 16) & 0xFF));
    v.push_back(static_cast<uint8_t>((x >> 8) & 0xFF));
    v.push_back(static_cast<uint8_t>(x & 0xFF));
}

void wr32le(std::ostream& out, uint32_t x) {
    uint8_t b[4] = {static_cast<uint8_t>(x & 0xFF),
                    static_cast<uint8_t>((x >> 8) & 0xFF),
                    static_cast<uint8_t>((x >> 16) & 0xFF),
                    static_cast<uint8_t>(x >> 24)};
    out.write(reinterpret_cast<char*>(b), 4);
}

uint16_t ipv4_checksum(const uint8_t* hdr, size_t len) {
    uint32_t sum = 0;
    for (size_t i = 0; i + 1 < len; i += 2)
        sum += static_cast<uint32_t>((hdr[i] << 8) | hdr[i + 1]);
    while (sum >> 16) sum = (sum & 0xFFFF) + (sum >> 16);
    return static_cast<uint16_t>(~sum);
}

}  // namespace

void write_pcap(std::ostream& out, const Trace& trace) {
    wr32le(out, kMagicUsec);
    wr32le(out, 0x00040002u);  // version 2.4
    wr32le(out, 0);            // thiszone
    wr32le(out, 0);            // sigfigs
    wr32le(out, 65535);        // snaplen
    wr32le(out, kLinkEthernet);

    std::vector<uint8_t> buf;
    for (const auto& p : trace.packets) {
        buf.clear();
        // Ethernet: zero MACs, IPv4 ethertype.
        buf.insert(buf.end(), 12, 0);
        wr16be(buf, 0x0800);
        // IPv4 header, no options.
        size_t ip_off = buf.size();
        buf.push_back(0x45);
        buf.push_back(0);
        wr16be(buf, static_cast<uint16_t>(p.size));
        wr16be(buf, 0);  // id
        wr16be(buf, 0);  // flags/fragment
        buf.push_back(p.ttl);
        buf.push_back(p.protocol);
        wr16be(buf, 0);  // checksum placeholder
        wr32be(buf, p.src_ip);
        wr32be(buf, p.dst_ip);
        uint16_t csum = ipv4_checksum(buf.data() + ip_off, 20);
        buf[ip_off + 10] = static_cast<uint8_t>(csum >> 8);
        buf[ip_off + 11] = static_cast<uint8_t>(csum & 0xFF);
        if (p.protocol == kProtoTcp) {
            wr16be(buf, p.src_port);
            wr16be(buf, p.dst_port);
            wr32be(buf, 0);  // seq
            wr32be(buf, 0);  // ack
            buf.push_back(0x50);  // data offset 5
            buf.push_back(p.tcp_flags);
            wr16be(buf, 65535);  // window
            wr16be(buf, 0);      // checksum
            wr16be(buf, 0);      // urgent
        } else if (p.protocol == kProtoUdp) {
            wr16be(buf, p.src_port);
            wr16be(buf, p.dst_port);
            uint32_t udp_len = p.size >= 20 ? p.size - 20 : 8;
            wr16be(buf, static_cast<uint16_t>(std::min(udp_len, 65535u)));
            wr16be(buf, 0);  // checksum
        }

        double abs_ts = trace.origin + p.timestamp;
        auto total_us = static_cast<uint64_t>(std::llround(abs_ts * 1e6));
        wr32le(out, static_cast<uint32_t>(total_us / 1000000));
        wr32le(out, static_cast<uint32_t>(total_us % 1000000));
        wr32le(out, static_cast<uint32_t>(buf.size()));         // incl_len
        wr32le(out, static_cast<uint32_t>(14 + p.size));        // orig_len
        out.write(reinterpret_cast<const char*>(buf.data()),
                  static_cast<std::streamsize>(buf.size()));
    }
}

void write_pcap_file(const std::string& path, const Trace& trace) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    write_pcap(out, trace);
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace tracekit
