// path.hpp
//
// Path properties recovered from one observation point: hop counts from TTL
// decrements and round-trip times from TCP handshake timing.

#pragma once

#include <cstdint>
#include <vector>

#include "tracekit/stats.hpp"
#include "tracekit/trace.hpp"

namespace tracekit {

/// Smallest of the common initial TTLs {32, 64, 128, 255} at or above the
/// observed value. An observed TTL of 0 is an invalid packet.
uint8_t infer_initial_ttl(uint8_t observed);

/// Hop count between the endpoints of one bidirectional key, through the
/// observation point: decrement of each direction plus the link it was
/// captured on. Ambiguous estimates (inconsistent TTLs) are kept but marked.
struct HopEstimate {
    FlowKey key;          // canonical bidirectional form
    int hops = 0;         // dec_src + dec_dst + 1
    int dec_src = 0;      // initial - modal observed TTL, canonical source side
    int dec_dst = 0;
    bool ambiguous = false;
};

/// One estimate per bidirectional key seen in both directions. The modal
/// observed TTL of each direction (ties to the smaller TTL) fixes the
/// decrement. A key is ambiguous when one direction's TTLs map to different
/// initial values, or when a sender IP shows inconsistent decrements across
/// keys. Output is sorted by key.
std::vector<HopEstimate> estimate_hops(const Trace& trace);

/// Timing of one TCP three-way handshake as seen at the observation point.
struct HandshakeRecord {
    FlowKey key;  // canonical bidirectional form
    double t_syn = 0.0;
    double t_synack = 0.0;
    double t_ack = 0.0;
    double rtt = 0.0;  // t_ack - t_syn
    bool clean = true;
};

/// Matches, per key, the first SYN (defines the initiator), the first
/// SYN+ACK back from the responder, and the first bare ACK from the
/// initiator after it. Retransmitted SYNs or SYN+ACKs before that ACK mark
/// the record clean=false. Only the first handshake per key is reported,
/// and only when rtt > 0.
std::vector<HandshakeRecord> estimate_rtts(const Trace& trace);

struct HopRttGroup {
    int hops = 0;
    double mean_rtt = 0.0;
    size_t flows = 0;   // joint estimates in this group
    double share = 0.0; // flows / total joint estimates
};

struct HopsVsRtt {
    std::vector<HopRttGroup> groups;  // all groups, ascending hops
    RegressionFit fit;                // over qualifying groups only
    size_t used_groups = 0;
};

/// Joins clean handshakes with unambiguous hop estimates per key, averages
/// RTT per hop count and fits mean RTT against hops over the groups whose
/// flow share exceeds min_share. Errors when fewer than two groups qualify.
HopsVsRtt hops_vs_rtt(const Trace& trace, double min_share = 0.01);

}  // namespace tracekit
